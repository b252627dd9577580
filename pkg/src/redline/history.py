"""Append-only revision histories.

A history owns an original sentence and an ordered list of revisions. Each
revision stores the op that produced it, the full resulting sentence, a
timestamp and a feedback snapshot. Rollbacks append a revert revision; the
log is never truncated, so the whole editing trace stays replayable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Sequence

from .editscript import diff
from .errors import InvalidOpError
from .ops import REPLACE_SENTENCE, REVERT, EditOp, apply_op
from .tokens import Sentence

FeedbackMap = dict[str, float | None]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Revision:
    index: int
    op: EditOp
    result: Sentence
    timestamp: datetime
    feedback: Mapping[str, float | None] = field(default_factory=dict)
    # Only populated for replace_sentence revisions: the word-level script
    # equivalent to the wholesale rewrite, kept for analysis.
    derived_script: tuple[EditOp, ...] | None = None


@dataclass(frozen=True)
class RevisionHistory:
    original: Sentence
    revisions: tuple[Revision, ...] = ()

    def current(self) -> Sentence:
        return self.revisions[-1].result if self.revisions else self.original

    def sentence_at(self, index: int) -> Sentence:
        """Sentence after revision `index`; -1 addresses the original."""
        if index == -1:
            return self.original
        if 0 <= index < len(self.revisions):
            return self.revisions[index].result
        raise IndexError(f"revision index {index} outside -1..{len(self.revisions) - 1}")

    def last_index(self) -> int:
        return len(self.revisions) - 1


def append_revision(
    history: RevisionHistory,
    op: EditOp,
    feedback: Mapping[str, float | None] | None = None,
    *,
    timestamp: datetime | None = None,
    derived_script: tuple[EditOp, ...] | None = None,
) -> RevisionHistory:
    """Apply op to the current sentence and append the resulting revision.

    The input history is untouched; on any op error nothing is appended.
    """
    if op.kind == REVERT:
        raise InvalidOpError("use revert() to roll back to an earlier revision")
    current = history.current()
    result = apply_op(current, op)
    if op.kind == REPLACE_SENTENCE and derived_script is None:
        derived_script = diff(current, result)
    revision = Revision(
        index=len(history.revisions),
        op=op,
        result=result,
        timestamp=timestamp or utc_now(),
        feedback=dict(feedback or {}),
        derived_script=derived_script,
    )
    return RevisionHistory(history.original, history.revisions + (revision,))


def revert(
    history: RevisionHistory,
    target_index: int,
    feedback: Mapping[str, float | None] | None = None,
    *,
    timestamp: datetime | None = None,
) -> RevisionHistory:
    """Append a revert revision whose result copies an earlier sentence.

    target_index -1 restores the original. The history stays append-only:
    nothing is truncated.
    """
    result = history.sentence_at(target_index)
    revision = Revision(
        index=len(history.revisions),
        op=EditOp.revert(target_index),
        result=result,
        timestamp=timestamp or utc_now(),
        feedback=dict(feedback or {}),
    )
    return RevisionHistory(history.original, history.revisions + (revision,))


def extract_references(history: RevisionHistory) -> list[tuple[Sentence, tuple[int, ...]]]:
    """Distinct revision results other than the original, with their indices.

    These are candidate gold rewrites; whether each one is actually valid
    remains a human judgment.
    """
    order: list[Sentence] = []
    where: dict[Sentence, list[int]] = {}
    for rev in history.revisions:
        if rev.result == history.original:
            continue
        if rev.result not in where:
            order.append(rev.result)
            where[rev.result] = []
        where[rev.result].append(rev.index)
    return [(sentence, tuple(where[sentence])) for sentence in order]


def replay_results(original: Sentence, ops: Sequence[EditOp]) -> list[Sentence]:
    """Fold ops over the original, resolving reverts, returning each result."""
    results: list[Sentence] = []
    current = original
    for op in ops:
        if op.kind == REVERT:
            if op.target == -1:
                current = original
            elif 0 <= op.target < len(results):
                current = results[op.target]
            else:
                raise IndexError(f"revert target {op.target} outside -1..{len(results) - 1}")
        else:
            current = apply_op(current, op)
        results.append(current)
    return results
