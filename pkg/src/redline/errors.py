"""Exception types shared across the package."""


class RedlineError(Exception):
    """Base class for every error this package raises on purpose."""


class PositionError(RedlineError):
    """An edit position does not exist in the sentence it targets."""


class InvalidOpError(RedlineError):
    """An edit operation is structurally invalid."""


class NotCategorizable(RedlineError):
    """The operation has no reporting category (reverts do not)."""


class ValidationError(RedlineError):
    """A record or request field failed validation."""


class FormatError(RedlineError):
    """A text stream does not conform to its declared format."""


class TrainError(RedlineError):
    """Model training preconditions were violated."""


class CoverageError(RedlineError):
    """One side of a comparison has no in-vocabulary words left."""

    def __init__(self, message: str, dropped=()):
        super().__init__(message)
        self.dropped = tuple(dropped)


class EmptyInputError(RedlineError):
    """An operation that needs at least one token got an empty sentence."""


class LabelError(RedlineError):
    """A label is not part of the classifier's label set."""


class DistributionError(RedlineError):
    """A vector that must be a probability distribution is not one."""


class ConflictError(RedlineError):
    """A write collides with existing state (duplicate id, stale parent)."""


class NotFoundError(RedlineError):
    """A referenced record does not exist."""


class CorruptLogError(RedlineError):
    """An event-log line failed its integrity checks."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
