"""Word substitution recommendations.

Two independent rankers: embedding cosine similarity around a query word,
and n-gram language-model prediction from the left context of a position.
Both return lists sorted by descending score with lexicographic tie-breaks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PositionError
from .models.embeddings import EmbeddingTable
from .models.ngram import BOS, EOS, UNK, NGramLM

PROVIDER_SIMILARITY = "similarity"
PROVIDER_LM = "language_model"


@dataclass(frozen=True)
class Recommendation:
    word: str
    score: float
    provider: str


def _top_k(scored: list[tuple[str, float]], k: int, provider: str) -> list[Recommendation]:
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [Recommendation(word, score, provider) for word, score in scored[:k]]


def similar_words(word: str, k: int, emb: EmbeddingTable) -> list[Recommendation]:
    """Top-k vocabulary words by cosine similarity to the query word.

    The query itself is excluded; zero-norm vectors are skipped; an
    out-of-vocabulary query yields an empty list.
    """
    if k <= 0:
        return []
    query = word.lower()
    query_vec = emb.lookup(query)
    if query_vec is None:
        return []
    query_norm = float(np.linalg.norm(query_vec))
    if query_norm == 0.0:
        return []
    scored: list[tuple[str, float]] = []
    for candidate, vec in emb.vectors.items():
        if candidate == query:
            continue
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            continue
        cosine = float(np.dot(query_vec, vec)) / (query_norm * norm)
        scored.append((candidate, cosine))
    return _top_k(scored, k, PROVIDER_SIMILARITY)


def lm_predict(
    sentence: Sequence[str], position: int, k: int, lm: NGramLM
) -> list[Recommendation]:
    """Top-k in-context words at a position, ranked by n-gram probability.

    Uses the left context only (a causal n-gram has no right context).
    Reserved symbols and the word currently at the position are excluded.
    """
    if not 0 <= position < len(sentence):
        raise PositionError(
            f"position {position} outside 0..{len(sentence) - 1}"
        )
    if k <= 0:
        return []
    history = [tok.lower() for tok in sentence[:position]]
    current = sentence[position].lower()
    excluded = {BOS, EOS, UNK, current}
    scored = [
        (word, lm.cond_prob(history, word))
        for word in lm.vocab
        if word not in excluded
    ]
    return _top_k(scored, k, PROVIDER_LM)
