import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from redline.models.classifier import LabeledCorpus, train_classifier
from redline.models.embeddings import load_embeddings
from redline.models.ngram import train_ngram
from redline.tokens import tokenize

FIXTURES = Path(__file__).parent / "fixtures"

TABLE_ORIGINAL = "My husband and I enjoy LA Hilton Hotel."

# The two worked revision histories: each row is the sentence text after one
# labeled editing step.
RH1_STEPS = [
    "Family enjoy LA Hilton Hotel.",
    "Family enjoy Hilton Hotel in LA.",
    "All family members enjoy Hilton Hotel in LA.",
    "All family members love Hilton Hotel in LA.",
]
RH2_STEPS = [
    "My husband and I love LA Hilton Hotel.",
    "My husband and I love Hilton Hotel.",
    "My husband and I love Hilton Hotel in Los Angeles.",
    "My husband and I love Hilton Hotel in LA.",
    "Family love Hilton Hotel in LA.",
    "All family members love Hilton Hotel in LA.",
]
# Revision indices in the replay fixture where each step's text appears.
RH1_STEP_INDICES = [3, 5, 8, 9]
RH2_STEP_INDICES = [0, 1, 4, 6, 10, 13]


@pytest.fixture
def table_original():
    return tokenize(TABLE_ORIGINAL)


@pytest.fixture
def tiny_embeddings():
    return load_embeddings(
        io.StringIO(
            "a 1 0\n"
            "b 1 0\n"
            "c 0 1\n"
            "d 0 0\n"  # zero-norm vector, skipped by similarity ranking
            "e 3 4\n"
        )
    )


@pytest.fixture
def good_bad_classifier():
    corpus = LabeledCorpus(labels=("F", "M"), records=(("good good", "F"), ("bad", "M")))
    return train_classifier(corpus, beta=1.0)


@pytest.fixture
def review_lm():
    return train_ngram(["my husband and i", "my husband and i enjoy hotels"], order=2, alpha=1.0)


# -- live service -------------------------------------------------------------

DEMO_WORDS = [
    "my", "husband", "wife", "and", "i", "we", "enjoy", "love", "la",
    "hilton", "hotel", "hotels", "family", "members", "all", "in", "los",
    "angeles", "the", ".", "!", "yummy", "dessert", "is",
]

DEMO_LM_CORPUS = [
    "my husband and i enjoy la hilton hotel .",
    "my wife and i love the hotel .",
    "all family members love hotels .",
    "we enjoy los angeles .",
    "the dessert is yummy !",
]

DEMO_CLASSIFIER_CORPUS = [
    ("F", "my husband and i enjoy la hilton hotel ."),
    ("F", "the dessert is yummy !"),
    ("F", "my husband loves los angeles ."),
    ("M", "my wife and i love the hotel ."),
    ("M", "we enjoy hotels in la ."),
    ("M", "my wife likes the dessert ."),
]


def write_demo_models(root: Path) -> dict[str, Path]:
    """Write deterministic embedding/LM/classifier inputs under root."""
    import random

    rng = random.Random(42)
    emb_lines = []
    for word in DEMO_WORDS:
        values = " ".join(f"{rng.uniform(-1, 1):.6f}" for _ in range(8))
        emb_lines.append(f"{word} {values}")
    emb_path = root / "vectors.txt"
    emb_path.write_text("\n".join(emb_lines) + "\n", encoding="utf-8")

    lm_corpus = root / "lm_corpus.txt"
    lm_corpus.write_text("\n".join(DEMO_LM_CORPUS) + "\n", encoding="utf-8")

    clf_corpus = root / "clf_corpus.tsv"
    clf_corpus.write_text(
        "".join(f"{label}\t{text}\n" for label, text in DEMO_CLASSIFIER_CORPUS),
        encoding="utf-8",
    )
    return {"embeddings": emb_path, "lm_corpus": lm_corpus, "classifier_corpus": clf_corpus}


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    """A running ApiServer over a fresh store with demo models and two users."""
    from redline.config import ApiConfig
    from redline.service import ApiServer
    from redline.store import Store

    root = tmp_path_factory.mktemp("service")
    paths = write_demo_models(root)
    config = ApiConfig(
        listen_host="127.0.0.1",
        listen_port=0,
        store_dir=str(root / "store"),
        embeddings_path=str(paths["embeddings"]),
        lm_corpus_path=str(paths["lm_corpus"]),
        lm_order=2,
        classifier_corpus_path=str(paths["classifier_corpus"]),
        providers=("ed", "wmd", "ppl", "class", "entropy"),
        recommend_k=5,
    )
    store = Store(config.store_dir)
    admin = store.create_user("Root", "administrator", user_id="admin", token="admintok")
    annotator = store.create_user("Alice", "annotator", user_id="alice", token="alicetok")
    server = ApiServer(config, store=store)
    server.start()
    yield {
        "base_url": server.base_url,
        "admin": admin,
        "annotator": annotator,
        "store": store,
        "server": server,
    }
    server.shutdown()
