"""Minimal word-level edit scripts between two sentences.

diff() returns the shortest insert/delete/substitute script that turns one
token sequence into the other when applied left to right. Script length
equals the word-level Levenshtein distance. Reorders are never inferred;
they only exist as explicitly recorded actions.
"""

from __future__ import annotations

from typing import Sequence

from .ops import EditOp


def diff(a: Sequence[str], b: Sequence[str]) -> tuple[EditOp, ...]:
    """Shortest edit script from a to b.

    Ties are broken by preferring substitute over delete over insert,
    walking left to right, so the result is deterministic. Positions index
    the evolving sentence, i.e. the script is valid when applied in order.
    """
    la, lb = len(a), len(b)
    # dist[i][j] = edit distance between a[i:] and b[j:]
    dist = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(la + 1):
        dist[i][lb] = la - i
    for j in range(lb):
        dist[la][j] = lb - j
    for i in range(la - 1, -1, -1):
        row, below = dist[i], dist[i + 1]
        for j in range(lb - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = below[j + 1]
            else:
                row[j] = 1 + min(below[j + 1], below[j], row[j + 1])

    # Forward walk along optimal edges. After consuming a[:i] the current
    # sentence is b[:j] + a[i:], so every op lands at index j.
    script: list[EditOp] = []
    i = j = 0
    while i < la or j < lb:
        if i < la and j < lb and a[i] == b[j]:
            i += 1
            j += 1
        elif i < la and j < lb and dist[i][j] == dist[i + 1][j + 1] + 1:
            script.append(EditOp.substitute(j, b[j]))
            i += 1
            j += 1
        elif i < la and dist[i][j] == dist[i + 1][j] + 1:
            script.append(EditOp.delete(j))
            i += 1
        else:
            script.append(EditOp.insert(j, b[j]))
            j += 1
    return tuple(script)
