"""Add-alpha smoothed n-gram language model.

Sentences are lowercased, padded with n-1 BOS symbols and closed with one
EOS. Out-of-vocabulary words map to UNK, so conditional distributions stay
proper over the vocabulary. For order >= 2 the BOS symbol is part of the
vocabulary (it appears in histories); a unigram model never uses it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import FormatError, TrainError
from ..tokens import tokenize

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

_FORMAT = "redline-ngram"
_VERSION = "1"


@dataclass
class NGramLM:
    order: int
    alpha: float
    vocab: frozenset[str]
    counts: dict[tuple[str, ...], dict[str, int]]
    history_totals: dict[tuple[str, ...], int]

    def vocab_size(self) -> int:
        return len(self.vocab)

    def normalize_word(self, word: str) -> str:
        lowered = word.lower()
        return lowered if lowered in self.vocab else UNK

    def normalize_history(self, history: Sequence[str]) -> tuple[str, ...]:
        """Last order-1 words, BOS-padded on the left, mapped into the vocab."""
        width = self.order - 1
        if width == 0:
            return ()
        window = [self.normalize_word(w) for w in history[-width:]]
        return tuple([BOS] * (width - len(window)) + window)

    def cond_prob(self, history: Sequence[str], word: str) -> float:
        """Smoothed P(word | history) = (c(h,w) + a) / (c(h) + a*|V|)."""
        h = self.normalize_history(history)
        w = self.normalize_word(word)
        count = self.counts.get(h, {}).get(w, 0)
        total = self.history_totals.get(h, 0)
        return (count + self.alpha) / (total + self.alpha * len(self.vocab))


def train_ngram(texts: Iterable[str], order: int, alpha: float = 1.0) -> NGramLM:
    """Count n-grams over whitespace/punctuation-tokenized, lowercased texts."""
    if not isinstance(order, int) or order < 1:
        raise TrainError(f"order must be an integer >= 1, got {order!r}")
    if not alpha > 0:
        raise TrainError(f"alpha must be positive, got {alpha!r}")
    sentences = [[tok.lower() for tok in tokenize(text)] for text in texts]
    if not sentences:
        raise TrainError("training corpus is empty")

    vocab = {UNK, EOS}
    if order >= 2:
        vocab.add(BOS)
    for sent in sentences:
        vocab.update(sent)

    counts: dict[tuple[str, ...], dict[str, int]] = {}
    totals: dict[tuple[str, ...], int] = {}
    pad = [BOS] * (order - 1)
    for sent in sentences:
        stream = pad + sent + [EOS]
        for i in range(order - 1, len(stream)):
            history = tuple(stream[i - order + 1 : i])
            word = stream[i]
            bucket = counts.setdefault(history, {})
            bucket[word] = bucket.get(word, 0) + 1
            totals[history] = totals.get(history, 0) + 1
    return NGramLM(
        order=order,
        alpha=float(alpha),
        vocab=frozenset(vocab),
        counts=counts,
        history_totals=totals,
    )


def save_ngram(lm: NGramLM, path: str | Path) -> None:
    """Write the model as sorted, tab-separated text; round-trips bit-exactly."""
    lines = [
        f"{_FORMAT}\t{_VERSION}",
        f"order\t{lm.order}",
        f"alpha\t{lm.alpha!r}",
        "vocab\t" + " ".join(sorted(lm.vocab)),
    ]
    for history in sorted(lm.counts):
        bucket = lm.counts[history]
        for word in sorted(bucket):
            lines.append(f"count\t{' '.join(history)}\t{word}\t{bucket[word]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_ngram(path: str | Path) -> NGramLM:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != [_FORMAT, _VERSION]:
        raise FormatError(f"not a {_FORMAT} v{_VERSION} file: {path}")
    order: int | None = None
    alpha: float | None = None
    vocab: frozenset[str] | None = None
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    totals: dict[tuple[str, ...], int] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        try:
            if fields[0] == "order":
                order = int(fields[1])
            elif fields[0] == "alpha":
                alpha = float(fields[1])
            elif fields[0] == "vocab":
                vocab = frozenset(fields[1].split(" "))
            elif fields[0] == "count":
                history = tuple(fields[1].split(" ")) if fields[1] else ()
                word, n = fields[2], int(fields[3])
                counts.setdefault(history, {})[word] = n
                totals[history] = totals.get(history, 0) + n
            else:
                raise FormatError(f"line {line_no}: unknown field {fields[0]!r}")
        except (IndexError, ValueError) as exc:
            raise FormatError(f"line {line_no}: {exc}") from None
    if order is None or alpha is None or vocab is None:
        raise FormatError("model file is missing order, alpha or vocab")
    return NGramLM(order=order, alpha=alpha, vocab=vocab, counts=counts, history_totals=totals)
