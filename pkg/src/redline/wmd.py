"""Word mover's distance between two sentences.

Both sentences become normalized bag-of-words distributions over their
lowercased in-vocabulary types; the distance is the exact optimal-transport
cost between the two distributions with Euclidean ground cost between
embedding vectors. Sentences here are short, so the exact LP is cheap.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import CoverageError, RedlineError
from .models.embeddings import EmbeddingTable


def nbow(sentence: Sequence[str], emb: EmbeddingTable) -> tuple[dict[str, float], list[str]]:
    """Normalized bag-of-words over in-vocabulary types, plus dropped words."""
    counts: dict[str, int] = {}
    dropped: list[str] = []
    for tok in sentence:
        key = tok.lower()
        if key in emb.vectors:
            counts[key] = counts.get(key, 0) + 1
        else:
            dropped.append(tok)
    total = sum(counts.values())
    weights = {w: c / total for w, c in counts.items()} if total else {}
    return weights, dropped


def wmd(a: Sequence[str], b: Sequence[str], emb: EmbeddingTable) -> float:
    """Exact transport cost between the nBOW distributions of a and b."""
    wa, dropped_a = nbow(a, emb)
    wb, dropped_b = nbow(b, emb)
    if not wa or not wb:
        raise CoverageError(
            "no in-vocabulary words on one side", dropped=dropped_a + dropped_b
        )
    if wa == wb:
        return 0.0

    words_a = sorted(wa)
    words_b = sorted(wb)
    va = np.stack([emb.vectors[w] for w in words_a])
    vb = np.stack([emb.vectors[w] for w in words_b])
    # cost[i, j] = Euclidean distance between type i of a and type j of b
    cost = np.sqrt(((va[:, None, :] - vb[None, :, :]) ** 2).sum(axis=2))

    na, nb = len(words_a), len(words_b)
    c = cost.reshape(na * nb)
    a_eq = np.zeros((na + nb, na * nb))
    for i in range(na):
        a_eq[i, i * nb : (i + 1) * nb] = 1.0
    for j in range(nb):
        a_eq[na + j, j::nb] = 1.0
    b_eq = np.concatenate([
        np.array([wa[w] for w in words_a]),
        np.array([wb[w] for w in words_b]),
    ])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RedlineError(f"transport solve failed: {res.message}")
    return max(float(res.fun), 0.0)
