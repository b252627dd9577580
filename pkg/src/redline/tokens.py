"""Tokenization for rewrite sentences.

Whitespace split with boundary punctuation detached into standalone tokens.
Case is preserved here; the statistical models lowercase on their side.
"""

from __future__ import annotations

from typing import Sequence

from .errors import InvalidOpError

# Punctuation detached from word boundaries during tokenization.
BOUNDARY_PUNCT = frozenset(".,!?;:'\"()")

Sentence = tuple[str, ...]


def tokenize(text: str) -> Sentence:
    """Split text into tokens.

    Tokens are whitespace-separated chunks with leading/trailing punctuation
    from BOUNDARY_PUNCT peeled off as separate tokens, in text order.
    """
    tokens: list[str] = []
    for chunk in text.split():
        leading: list[str] = []
        while chunk and chunk[0] in BOUNDARY_PUNCT:
            leading.append(chunk[0])
            chunk = chunk[1:]
        trailing: list[str] = []
        while chunk and chunk[-1] in BOUNDARY_PUNCT:
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(leading)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tuple(tokens)


def detokenize(sentence: Sequence[str]) -> str:
    """Join tokens with single spaces; inverts tokenize for its own output."""
    return " ".join(sentence)


def check_token(token: object) -> str:
    """Validate one token surface: a non-empty string without whitespace."""
    if not isinstance(token, str) or not token:
        raise InvalidOpError("token must be a non-empty string")
    if any(ch.isspace() for ch in token):
        raise InvalidOpError(f"token may not contain whitespace: {token!r}")
    return token


def as_sentence(tokens: Sequence[str]) -> Sentence:
    """Coerce a token sequence into a validated Sentence tuple."""
    return tuple(check_token(tok) for tok in tokens)
