"""Sentence-level feedback providers and word-level salience.

Every provider exposes `name` and `score(original, edited)`. Distance-style
providers (ed, wmd) compare the edit against the job's original sentence;
model-based providers (ppl, class, entropy) score the edited sentence alone.
A provider that raises contributes a None entry to the batch instead of
failing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    DistributionError,
    EmptyInputError,
    LabelError,
    RedlineError,
)
from .models.classifier import AttributeClassifier
from .models.embeddings import EmbeddingTable
from .models.ngram import EOS, NGramLM
from .tokens import Sentence
from .wmd import wmd


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance, case-sensitive, unit costs."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i]
        for j, tok_b in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (0 if tok_a == tok_b else 1),
                )
            )
        previous = current
    return previous[-1]


def perplexity(sentence: Sequence[str], lm: NGramLM) -> float:
    """exp of the mean negative log probability of the tokens plus EOS.

    Computed in base-2 logs, which keeps uniform models over power-of-two
    vocabularies exact; the value is base-independent.
    """
    if not sentence:
        raise EmptyInputError("cannot score an empty sentence")
    words = [tok.lower() for tok in sentence]
    stream = words + [EOS]
    log_probs = []
    for i, word in enumerate(stream):
        log_probs.append(math.log2(lm.cond_prob(stream[:i], word)))
    return 2.0 ** (-math.fsum(log_probs) / len(stream))


def class_score(sentence: Sequence[str], clf: AttributeClassifier, target: str) -> float:
    """Posterior probability of the target label given the sentence."""
    if target not in clf.labels:
        raise LabelError(f"unknown label {target!r}; expected one of {clf.labels}")
    return clf.posterior(sentence)[target]


def entropy(probabilities: Sequence[float]) -> float:
    """Shannon entropy -sum(p * ln p), natural log, with 0 ln 0 = 0."""
    total = math.fsum(probabilities)
    if any(p < 0 for p in probabilities) or abs(total - 1.0) > 1e-9:
        raise DistributionError(
            f"not a probability distribution (sum={total!r})"
        )
    return -math.fsum(p * math.log(p) for p in probabilities if p > 0)


@dataclass(frozen=True)
class SalienceVector:
    """Per-token leave-one-out posterior changes for one target label."""

    target: str
    scores: tuple[float, ...]


def salience(
    sentence: Sequence[str], clf: AttributeClassifier, target: str | None = None
) -> SalienceVector:
    """score[i] = P(target | sentence) - P(target | sentence without token i).

    With no explicit target, the argmax label of the full sentence is used.
    A one-token sentence falls back to the empty-sentence posterior (priors).
    """
    if not sentence:
        raise EmptyInputError("cannot compute salience for an empty sentence")
    full = clf.posterior(sentence)
    if target is None:
        target = max(clf.labels, key=lambda lab: full[lab])
    elif target not in clf.labels:
        raise LabelError(f"unknown label {target!r}; expected one of {clf.labels}")
    base = full[target]
    scores = []
    for i in range(len(sentence)):
        reduced = tuple(sentence[:i]) + tuple(sentence[i + 1 :])
        scores.append(base - clf.posterior(reduced)[target])
    return SalienceVector(target=target, scores=tuple(scores))


# ---------------------------------------------------------------------------
# Providers


@dataclass(frozen=True)
class EditDistanceProvider:
    name: str = "ed"

    def score(self, original: Sentence, edited: Sentence) -> float:
        return float(edit_distance(original, edited))


@dataclass(frozen=True)
class WmdProvider:
    embeddings: EmbeddingTable
    name: str = "wmd"

    def score(self, original: Sentence, edited: Sentence) -> float:
        return wmd(original, edited, self.embeddings)


@dataclass(frozen=True)
class PerplexityProvider:
    lm: NGramLM
    name: str = "ppl"

    def score(self, original: Sentence, edited: Sentence) -> float:
        return perplexity(edited, self.lm)


@dataclass(frozen=True)
class ClassProvider:
    classifier: AttributeClassifier
    target: str
    name: str = "class"

    def score(self, original: Sentence, edited: Sentence) -> float:
        return class_score(edited, self.classifier, self.target)


@dataclass(frozen=True)
class EntropyProvider:
    """Entropy of the classifier posterior; higher = better obfuscation."""

    classifier: AttributeClassifier
    name: str = "entropy"

    def score(self, original: Sentence, edited: Sentence) -> float:
        posterior = self.classifier.posterior(edited)
        return entropy([posterior[label] for label in self.classifier.labels])


PROVIDER_NAMES = ("ed", "wmd", "ppl", "class", "entropy")


def build_registry(
    names: Sequence[str],
    *,
    embeddings: EmbeddingTable | None = None,
    lm: NGramLM | None = None,
    classifier: AttributeClassifier | None = None,
    target_label: str | None = None,
) -> dict[str, object]:
    """Instantiate providers by name, validating their models are present."""
    registry: dict[str, object] = {}
    for name in names:
        if name == "ed":
            registry[name] = EditDistanceProvider()
        elif name == "wmd":
            if embeddings is None:
                raise LabelError("wmd provider requires an embedding table")
            registry[name] = WmdProvider(embeddings)
        elif name == "ppl":
            if lm is None:
                raise LabelError("ppl provider requires a language model")
            registry[name] = PerplexityProvider(lm)
        elif name == "class":
            if classifier is None or target_label is None:
                raise LabelError("class provider requires a classifier and target label")
            if target_label not in classifier.labels:
                raise LabelError(f"target label {target_label!r} unknown to the classifier")
            registry[name] = ClassProvider(classifier, target_label)
        elif name == "entropy":
            if classifier is None:
                raise LabelError("entropy provider requires a classifier")
            registry[name] = EntropyProvider(classifier)
        else:
            raise LabelError(f"unknown feedback provider {name!r}")
    return registry


def score_all(
    original: Sentence, edited: Sentence, registry: Mapping[str, object]
) -> dict[str, float | None]:
    """Run every provider; failures become None entries, never batch errors."""
    snapshot: dict[str, float | None] = {}
    for name, provider in registry.items():
        try:
            snapshot[name] = float(provider.score(original, edited))
        except RedlineError:
            snapshot[name] = None
    return snapshot
