from .classifier import (
    AttributeClassifier,
    LabeledCorpus,
    load_classifier,
    load_labeled_corpus,
    save_classifier,
    train_classifier,
)
from .embeddings import EmbeddingTable, load_embeddings
from .ngram import BOS, EOS, UNK, NGramLM, load_ngram, save_ngram, train_ngram

__all__ = [
    "AttributeClassifier",
    "BOS",
    "EOS",
    "EmbeddingTable",
    "LabeledCorpus",
    "NGramLM",
    "UNK",
    "load_classifier",
    "load_embeddings",
    "load_labeled_corpus",
    "load_ngram",
    "save_classifier",
    "save_ngram",
    "train_classifier",
    "train_ngram",
]
