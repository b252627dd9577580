"""Multinomial naive-Bayes classifier over bags of words.

Stores raw counts plus the smoothing constant, so serialized models rebuild
identical probabilities. Posteriors are computed in log space with the
summands taken in token order, which keeps results bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import FormatError, TrainError
from ..tokens import tokenize
from .ngram import UNK

_FORMAT = "redline-nbc"
_VERSION = "1"


@dataclass
class LabeledCorpus:
    """(text, label) records under a declared, ordered label set."""

    labels: tuple[str, ...]
    records: tuple[tuple[str, str], ...]


def load_labeled_corpus(lines: Iterable[str], labels: Sequence[str] | None = None) -> LabeledCorpus:
    """Parse "label<TAB>text" lines; label set defaults to sorted labels seen."""
    records: list[tuple[str, str]] = []
    seen: list[str] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        label, sep, text = line.partition("\t")
        if not sep or not label or not text.strip():
            raise FormatError(f"line {line_no}: expected 'label<TAB>text'")
        if not tokenize(text):
            raise FormatError(f"line {line_no}: text is empty after tokenization")
        records.append((text, label))
        if label not in seen:
            seen.append(label)
    label_set = tuple(labels) if labels is not None else tuple(sorted(seen))
    for _, label in records:
        if label not in label_set:
            raise FormatError(f"label {label!r} is not in the declared label set")
    return LabeledCorpus(labels=label_set, records=tuple(records))


@dataclass
class AttributeClassifier:
    labels: tuple[str, ...]
    beta: float
    doc_counts: dict[str, int]
    token_counts: dict[str, dict[str, int]]
    token_totals: dict[str, int]
    vocab: frozenset[str]

    def prior(self, label: str) -> float:
        return self.doc_counts[label] / sum(self.doc_counts.values())

    def likelihood(self, word: str, label: str) -> float:
        """Smoothed P(word | label); word must already be lowercased."""
        w = word if word in self.vocab else UNK
        count = self.token_counts[label].get(w, 0)
        return (count + self.beta) / (self.token_totals[label] + self.beta * len(self.vocab))

    def posterior(self, sentence: Sequence[str]) -> dict[str, float]:
        """P(label | sentence) for every label, normalized to sum to 1.

        An empty sentence carries no evidence and returns the priors.
        """
        words = [tok.lower() for tok in sentence]
        scores: list[float] = []
        for label in self.labels:
            log_p = math.log(self.prior(label))
            for w in words:
                log_p += math.log(self.likelihood(w, label))
            scores.append(log_p)
        peak = max(scores)
        weights = [math.exp(s - peak) for s in scores]
        total = math.fsum(weights)
        return {label: w / total for label, w in zip(self.labels, weights)}


def train_classifier(corpus: LabeledCorpus, beta: float = 1.0) -> AttributeClassifier:
    if len(corpus.labels) < 2:
        raise TrainError("need at least two labels")
    if not beta > 0:
        raise TrainError(f"beta must be positive, got {beta!r}")
    doc_counts = {label: 0 for label in corpus.labels}
    token_counts: dict[str, dict[str, int]] = {label: {} for label in corpus.labels}
    token_totals = {label: 0 for label in corpus.labels}
    vocab = {UNK}
    for text, label in corpus.records:
        if label not in doc_counts:
            raise TrainError(f"record labeled {label!r} outside the label set")
        words = [tok.lower() for tok in tokenize(text)]
        if not words:
            raise TrainError(f"empty text for label {label!r}")
        doc_counts[label] += 1
        bucket = token_counts[label]
        for w in words:
            bucket[w] = bucket.get(w, 0) + 1
            vocab.add(w)
        token_totals[label] += len(words)
    for label, n in doc_counts.items():
        if n == 0:
            raise TrainError(f"label {label!r} has no training documents")
    return AttributeClassifier(
        labels=corpus.labels,
        beta=float(beta),
        doc_counts=doc_counts,
        token_counts=token_counts,
        token_totals=token_totals,
        vocab=frozenset(vocab),
    )


def save_classifier(clf: AttributeClassifier, path: str | Path) -> None:
    lines = [
        f"{_FORMAT}\t{_VERSION}",
        f"beta\t{clf.beta!r}",
        "labels\t" + " ".join(clf.labels),
        "vocab\t" + " ".join(sorted(clf.vocab)),
    ]
    for label in clf.labels:
        lines.append(f"docs\t{label}\t{clf.doc_counts[label]}")
    for label in clf.labels:
        bucket = clf.token_counts[label]
        for word in sorted(bucket):
            lines.append(f"count\t{label}\t{word}\t{bucket[word]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_classifier(path: str | Path) -> AttributeClassifier:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != [_FORMAT, _VERSION]:
        raise FormatError(f"not a {_FORMAT} v{_VERSION} file: {path}")
    beta: float | None = None
    labels: tuple[str, ...] | None = None
    vocab: frozenset[str] | None = None
    doc_counts: dict[str, int] = {}
    token_counts: dict[str, dict[str, int]] = {}
    token_totals: dict[str, int] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        try:
            if fields[0] == "beta":
                beta = float(fields[1])
            elif fields[0] == "labels":
                labels = tuple(fields[1].split(" "))
            elif fields[0] == "vocab":
                vocab = frozenset(fields[1].split(" "))
            elif fields[0] == "docs":
                doc_counts[fields[1]] = int(fields[2])
            elif fields[0] == "count":
                label, word, n = fields[1], fields[2], int(fields[3])
                token_counts.setdefault(label, {})[word] = n
                token_totals[label] = token_totals.get(label, 0) + n
            else:
                raise FormatError(f"line {line_no}: unknown field {fields[0]!r}")
        except (IndexError, ValueError) as exc:
            raise FormatError(f"line {line_no}: {exc}") from None
    if beta is None or labels is None or vocab is None or not doc_counts:
        raise FormatError("model file is missing beta, labels, vocab or docs")
    for label in labels:
        token_counts.setdefault(label, {})
        token_totals.setdefault(label, 0)
    return AttributeClassifier(
        labels=labels,
        beta=beta,
        doc_counts=doc_counts,
        token_counts=token_counts,
        token_totals=token_totals,
        vocab=vocab,
    )
