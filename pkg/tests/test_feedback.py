import math
import random

import pytest

from oracles import entropy_direct, levenshtein_distance, stepwise_perplexity
from redline.errors import (
    DistributionError,
    EmptyInputError,
    LabelError,
)
from redline.feedback import (
    EditDistanceProvider,
    EntropyProvider,
    build_registry,
    class_score,
    edit_distance,
    entropy,
    perplexity,
    salience,
    score_all,
)
from redline.models.classifier import LabeledCorpus, train_classifier
from redline.models.ngram import NGramLM, train_ngram
from redline.tokens import tokenize


# -- edit distance -----------------------------------------------------------


def test_edit_distance_examples(table_original):
    assert edit_distance(table_original, table_original) == 0
    assert edit_distance(table_original, tokenize("My husband and I love LA Hilton Hotel.")) == 1
    assert edit_distance(table_original, tokenize("Family enjoy LA Hilton Hotel.")) == 4


def test_edit_distance_is_case_sensitive():
    assert edit_distance(("Family",), ("family",)) == 1


def test_edit_distance_against_oracle_with_metric_properties():
    rng = random.Random(11)
    vocab = [f"w{i}" for i in range(20)]
    sentences = [
        tuple(rng.choice(vocab) for _ in range(rng.randrange(0, 13))) for _ in range(60)
    ]
    for _ in range(1000):
        a, b = rng.choice(sentences), rng.choice(sentences)
        assert edit_distance(a, b) == levenshtein_distance(a, b)
        assert edit_distance(a, b) == edit_distance(b, a)
    for _ in range(200):
        a, b, c = (rng.choice(sentences) for _ in range(3))
        assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


# -- perplexity ---------------------------------------------------------------


def test_uniform_model_perplexity_equals_vocab_size():
    vocab = frozenset([f"v{i}" for i in range(5)] + ["<s>", "</s>", "<unk>"])
    lm = NGramLM(order=2, alpha=1.0, vocab=vocab, counts={}, history_totals={})
    assert perplexity(("anything", "here"), lm) == float(len(vocab))


def test_trigram_perplexity_matches_stepwise_oracle():
    text = "my husband and i enjoy la hilton hotel"
    lm = train_ngram([text], order=3, alpha=1.0)
    sentence = tokenize(text)
    expected = stepwise_perplexity([list(sentence)], 3, 1.0, list(sentence))
    assert perplexity(sentence, lm) == pytest.approx(expected, abs=1e-9)


def test_perplexity_ignores_case():
    lm = train_ngram(["my husband"], order=2)
    assert perplexity(("My", "Husband"), lm) == perplexity(("my", "husband"), lm)


def test_perplexity_rejects_empty_sentence():
    lm = train_ngram(["a"], order=1)
    with pytest.raises(EmptyInputError):
        perplexity((), lm)


def test_perplexity_decreases_with_alpha_on_training_sentence():
    text = "the hotel was lovely"
    sentence = tokenize(text)
    values = [
        perplexity(sentence, train_ngram([text], order=1, alpha=alpha))
        for alpha in (1.0, 0.1, 0.01)
    ]
    assert values[0] > values[1] > values[2]


# -- class score & entropy -----------------------------------------------------


def test_class_score_symmetric_setup():
    clf = train_classifier(LabeledCorpus(("F", "M"), (("a", "F"), ("b", "M"))), beta=1.0)
    assert class_score(("zzz",), clf, "F") == pytest.approx(0.5, abs=1e-15)


def test_class_score_hand_value(good_bad_classifier):
    assert class_score(("good",), good_bad_classifier, "F") == pytest.approx(0.706, abs=5e-4)


def test_class_scores_sum_to_one(good_bad_classifier):
    total = sum(
        class_score(("good", "bad"), good_bad_classifier, label) for label in ("F", "M")
    )
    assert total == pytest.approx(1.0, abs=1e-12)


def test_class_score_unknown_label(good_bad_classifier):
    with pytest.raises(LabelError):
        class_score(("good",), good_bad_classifier, "X")


def test_entropy_values():
    assert entropy([1.0, 0.0]) == 0.0
    assert entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)
    assert entropy([0.25, 0.75]) == pytest.approx(0.5623, abs=1e-4)
    assert entropy([0.25, 0.75]) == pytest.approx(entropy_direct([0.25, 0.75]), abs=1e-12)


def test_entropy_rejects_non_distributions():
    with pytest.raises(DistributionError):
        entropy([0.5, 0.6])
    with pytest.raises(DistributionError):
        entropy([-0.1, 1.1])


def test_entropy_max_at_uniform():
    rng = random.Random(5)
    for k in range(2, 6):
        uniform = [1.0 / k] * k
        assert entropy(uniform) == pytest.approx(math.log(k), abs=1e-12)
        for _ in range(25):
            raw = [rng.random() + 1e-9 for _ in range(k)]
            total = sum(raw)
            p = [x / total for x in raw]
            assert entropy(p) <= math.log(k) + 1e-12


# -- salience -------------------------------------------------------------------


def test_salience_hand_value(good_bad_classifier):
    vector = salience(("good",), good_bad_classifier, "F")
    assert vector.scores[0] == pytest.approx(0.206, abs=1e-3)


def test_salience_matches_two_posterior_evaluations(good_bad_classifier):
    sentence = tokenize("good bad good day")
    vector = salience(sentence, good_bad_classifier, "M")
    full = good_bad_classifier.posterior(sentence)["M"]
    for i, score in enumerate(vector.scores):
        reduced = sentence[:i] + sentence[i + 1 :]
        expected = full - good_bad_classifier.posterior(reduced)["M"]
        assert score == pytest.approx(expected, abs=1e-12)
    assert len(vector.scores) == len(sentence)
    assert all(-1.0 <= s <= 1.0 for s in vector.scores)


def test_salience_neutral_token_scores_zero():
    corpus = LabeledCorpus(("F", "M"), (("same good", "F"), ("same bad", "M")))
    clf = train_classifier(corpus, beta=1.0)
    vector = salience(("same",), clf, "F")
    # "same" has identical likelihood in both classes and priors are equal
    assert vector.scores[0] == pytest.approx(0.0, abs=1e-12)


def test_salience_default_target_is_argmax(good_bad_classifier):
    vector = salience(("good",), good_bad_classifier)
    assert vector.target == "F"


def test_salience_rejects_empty_sentence(good_bad_classifier):
    with pytest.raises(EmptyInputError):
        salience((), good_bad_classifier, "F")


# -- score_all -------------------------------------------------------------------


def test_score_all_on_identity(table_original, tiny_embeddings, good_bad_classifier):
    lm = train_ngram(["my husband"], order=2)
    registry = build_registry(
        ["ed", "wmd", "ppl", "class", "entropy"],
        embeddings=tiny_embeddings,
        lm=lm,
        classifier=good_bad_classifier,
        target_label="F",
    )
    sentence = ("a", "b")
    snapshot = score_all(sentence, sentence, registry)
    assert snapshot["ed"] == 0.0
    assert snapshot["wmd"] == 0.0
    assert snapshot["ppl"] is not None and snapshot["ppl"] >= 1.0
    assert 0.0 <= snapshot["class"] <= 1.0
    assert snapshot["entropy"] is not None


def test_score_all_empty_registry(table_original):
    assert score_all(table_original, table_original, {}) == {}


def test_score_all_marks_failures_as_none(tiny_embeddings):
    registry = build_registry(["ed", "wmd"], embeddings=tiny_embeddings)
    # "zzz" is out of vocabulary: wmd cannot score, ed still can
    snapshot = score_all(("zzz",), ("a",), registry)
    assert snapshot["ed"] == 1.0
    assert snapshot["wmd"] is None


def test_registry_composition(good_bad_classifier, table_original):
    registry = build_registry(["ed", "entropy"], classifier=good_bad_classifier)
    edited = tokenize("My husband and I love LA Hilton Hotel.")
    snapshot = score_all(table_original, edited, registry)
    assert snapshot["ed"] == 1.0
    posterior = good_bad_classifier.posterior(edited)
    assert snapshot["entropy"] == pytest.approx(
        entropy_direct([posterior["F"], posterior["M"]]), abs=1e-12
    )


def test_registry_rejects_unknown_or_unresolvable_names(good_bad_classifier):
    with pytest.raises(LabelError):
        build_registry(["nope"])
    with pytest.raises(LabelError):
        build_registry(["wmd"])  # no embeddings given
    with pytest.raises(LabelError):
        build_registry(["class"], classifier=good_bad_classifier)  # no target


def test_provider_names_are_stable(tiny_embeddings, good_bad_classifier):
    assert EditDistanceProvider().name == "ed"
    assert EntropyProvider(good_bad_classifier).name == "entropy"
