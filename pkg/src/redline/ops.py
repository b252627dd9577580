"""Atomic edit operations over token sequences.

An EditOp is a single revision action. Word-level ops (insert, delete,
substitute, reorder) address positions in the sentence they are applied to;
replace_sentence swaps the whole text; revert is resolved at history level
and cannot be applied to a bare sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidOpError, NotCategorizable, PositionError
from .tokens import Sentence, check_token, tokenize

INSERT = "insert"
DELETE = "delete"
SUBSTITUTE = "substitute"
REORDER = "reorder"
REPLACE_SENTENCE = "replace_sentence"
REVERT = "revert"
KINDS = (INSERT, DELETE, SUBSTITUTE, REORDER, REPLACE_SENTENCE, REVERT)

SOURCE_TYPED = "typed"
SOURCE_SIMILARITY = "similarity_recommended"
SOURCE_LM = "lm_recommended"
SOURCE_SYSTEM = "system"
SOURCES = (SOURCE_TYPED, SOURCE_SIMILARITY, SOURCE_LM, SOURCE_SYSTEM)
RECOMMENDED_SOURCES = (SOURCE_SIMILARITY, SOURCE_LM)

WORD_TYPING = "WordTyping"
DELETION = "Deletion"
SUBSTITUTION = "Substitution"
REORDERING = "Reordering"
SENTENCE_TYPING = "SentenceTyping"
# Reporting order used everywhere categories are tabulated.
CATEGORIES = (WORD_TYPING, DELETION, SUBSTITUTION, REORDERING, SENTENCE_TYPING)


def _check_index(value: object, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidOpError(f"{name} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class EditOp:
    """One atomic revision action plus its provenance tag."""

    kind: str
    position: int | None = None
    token: str | None = None
    from_position: int | None = None
    to_position: int | None = None
    text: str | None = None
    target: int | None = None
    source: str = SOURCE_TYPED

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidOpError(f"unknown op kind {self.kind!r}")
        if self.source not in SOURCES:
            raise InvalidOpError(f"unknown op source {self.source!r}")
        if self.kind in (INSERT, SUBSTITUTE):
            _check_index(self.position, "position")
            check_token(self.token)
        elif self.kind == DELETE:
            _check_index(self.position, "position")
        elif self.kind == REORDER:
            _check_index(self.from_position, "from_position")
            _check_index(self.to_position, "to_position")
            if self.from_position == self.to_position:
                raise InvalidOpError("reorder requires two distinct positions")
        elif self.kind == REPLACE_SENTENCE:
            if not isinstance(self.text, str):
                raise InvalidOpError("replace_sentence requires a text string")
        elif self.kind == REVERT:
            _check_index(self.target, "target")

    @classmethod
    def insert(cls, position: int, token: str, source: str = SOURCE_TYPED) -> "EditOp":
        return cls(INSERT, position=position, token=token, source=source)

    @classmethod
    def delete(cls, position: int, source: str = SOURCE_TYPED) -> "EditOp":
        return cls(DELETE, position=position, source=source)

    @classmethod
    def substitute(cls, position: int, token: str, source: str = SOURCE_TYPED) -> "EditOp":
        return cls(SUBSTITUTE, position=position, token=token, source=source)

    @classmethod
    def reorder(cls, from_position: int, to_position: int, source: str = SOURCE_TYPED) -> "EditOp":
        return cls(REORDER, from_position=from_position, to_position=to_position, source=source)

    @classmethod
    def replace_sentence(cls, text: str, source: str = SOURCE_TYPED) -> "EditOp":
        return cls(REPLACE_SENTENCE, text=text, source=source)

    @classmethod
    def revert(cls, target: int) -> "EditOp":
        return cls(REVERT, target=target, source=SOURCE_SYSTEM)

    def to_dict(self) -> dict:
        """Wire/serialization form; only the fields the kind uses."""
        record: dict = {"kind": self.kind, "source": self.source}
        if self.kind in (INSERT, SUBSTITUTE):
            record["position"] = self.position
            record["token"] = self.token
        elif self.kind == DELETE:
            record["position"] = self.position
        elif self.kind == REORDER:
            record["from_position"] = self.from_position
            record["to_position"] = self.to_position
        elif self.kind == REPLACE_SENTENCE:
            record["text"] = self.text
        elif self.kind == REVERT:
            record["target"] = self.target
        return record


def op_from_dict(record: dict) -> EditOp:
    """Build an EditOp from its wire form; raises InvalidOpError on bad input."""
    if not isinstance(record, dict):
        raise InvalidOpError("op must be an object")
    kind = record.get("kind")
    if kind not in KINDS:
        raise InvalidOpError(f"unknown op kind {kind!r}")
    return EditOp(
        kind,
        position=record.get("position"),
        token=record.get("token"),
        from_position=record.get("from_position"),
        to_position=record.get("to_position"),
        text=record.get("text"),
        target=record.get("target"),
        source=record.get("source", SOURCE_TYPED),
    )


def apply_op(sentence: Sentence, op: EditOp) -> Sentence:
    """Apply one edit op to a sentence, returning the new sentence."""
    toks = list(sentence)
    if op.kind == INSERT:
        if not 0 <= op.position <= len(toks):
            raise PositionError(f"insert position {op.position} outside 0..{len(toks)}")
        toks.insert(op.position, op.token)
    elif op.kind == DELETE:
        if not 0 <= op.position < len(toks):
            raise PositionError(f"delete position {op.position} outside 0..{len(toks) - 1}")
        del toks[op.position]
    elif op.kind == SUBSTITUTE:
        if not 0 <= op.position < len(toks):
            raise PositionError(f"substitute position {op.position} outside 0..{len(toks) - 1}")
        toks[op.position] = op.token
    elif op.kind == REORDER:
        last = len(toks) - 1
        if not 0 <= op.from_position < len(toks):
            raise PositionError(f"reorder source {op.from_position} outside 0..{last}")
        if not 0 <= op.to_position < len(toks):
            raise PositionError(f"reorder destination {op.to_position} outside 0..{last}")
        moved = toks.pop(op.from_position)
        toks.insert(op.to_position, moved)
    elif op.kind == REPLACE_SENTENCE:
        return tokenize(op.text)
    else:  # REVERT
        raise InvalidOpError("revert is resolved against a history, not a sentence")
    return tuple(toks)


def category_of(op: EditOp) -> str:
    """Reporting category of an op; reverts have none."""
    if op.kind == REVERT:
        raise NotCategorizable("revert operations are not categorized")
    if op.kind == DELETE:
        return DELETION
    if op.kind == REORDER:
        return REORDERING
    if op.kind == REPLACE_SENTENCE:
        return SENTENCE_TYPING
    # Insert/substitute: picking a recommended word reports as Substitution,
    # manual typing as WordTyping.
    if op.source in RECOMMENDED_SOURCES:
        return SUBSTITUTION
    return WORD_TYPING
