"""redline: collect word-level sentence rewrite histories with instant feedback.

The library half covers tokenization, edit operations and scripts,
append-only revision histories, desk-scale text models, feedback scoring
and recommendations, and a plain-text store. The service half (`service`,
`cli`) exposes the same operations over HTTP and the command line.
"""

from .editscript import diff
from .errors import (
    ConflictError,
    CorruptLogError,
    CoverageError,
    DistributionError,
    EmptyInputError,
    FormatError,
    InvalidOpError,
    LabelError,
    NotCategorizable,
    NotFoundError,
    PositionError,
    RedlineError,
    TrainError,
    ValidationError,
)
from .feedback import (
    SalienceVector,
    class_score,
    edit_distance,
    entropy,
    perplexity,
    salience,
    score_all,
)
from .history import (
    Revision,
    RevisionHistory,
    append_revision,
    extract_references,
    replay_results,
    revert,
)
from .ops import CATEGORIES, EditOp, apply_op, category_of, op_from_dict
from .recommend import Recommendation, lm_predict, similar_words
from .tokens import Sentence, detokenize, tokenize
from .wmd import wmd

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "ConflictError",
    "CorruptLogError",
    "CoverageError",
    "DistributionError",
    "EditOp",
    "EmptyInputError",
    "FormatError",
    "InvalidOpError",
    "LabelError",
    "NotCategorizable",
    "NotFoundError",
    "PositionError",
    "Recommendation",
    "RedlineError",
    "Revision",
    "RevisionHistory",
    "SalienceVector",
    "Sentence",
    "TrainError",
    "ValidationError",
    "append_revision",
    "apply_op",
    "category_of",
    "class_score",
    "detokenize",
    "diff",
    "edit_distance",
    "entropy",
    "extract_references",
    "lm_predict",
    "op_from_dict",
    "perplexity",
    "replay_results",
    "revert",
    "salience",
    "score_all",
    "similar_words",
    "tokenize",
    "wmd",
]
