"""Word embedding tables in the word2vec text format."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import FormatError


@dataclass
class EmbeddingTable:
    """Fixed-dimension word vectors keyed by lowercased surface form."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def lookup(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(source: Iterable[str]) -> EmbeddingTable:
    """Parse a word-vector text stream.

    Accepts an optional "count dim" first line, then one "word v1 .. vd"
    line per vector. Lookup keys are lowercased; duplicate words keep the
    last vector seen.
    """
    declared_dim: int | None = None
    dimension: int | None = None
    vectors: dict[str, np.ndarray] = {}
    first_data_line = True
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split()
        if first_data_line and len(fields) == 2:
            try:
                _, declared_dim = int(fields[0]), int(fields[1])
                first_data_line = False
                continue
            except ValueError:
                pass  # a 1-dim vector line, not a header
        first_data_line = False
        word, values = fields[0], fields[1:]
        if not values:
            raise FormatError(f"line {line_no}: no vector values for {word!r}")
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"line {line_no}: bad vector value ({exc})") from None
        if dimension is None:
            dimension = declared_dim if declared_dim is not None else len(vec)
        if len(vec) != dimension:
            raise FormatError(
                f"line {line_no}: expected {dimension} values, got {len(vec)}"
            )
        vectors[word.lower()] = vec
    if dimension is None or not vectors:
        raise FormatError("embedding stream contains no vectors")
    return EmbeddingTable(dimension=dimension, vectors=vectors)
