"""
Exception hierarchy for trajseg.

Validation errors are the caller's fault (bad input, bad flags) and map to
exit code 1 in the CLI. Anything that is not a TrajsegError is treated as
an internal failure.
"""

from typing import Optional


class TrajsegError(Exception):
    """Base exception for trajseg operations."""
    pass


class ValidationError(TrajsegError):
    """Raised when input data or parameters violate a documented contract."""
    pass


class UsageError(TrajsegError):
    """Raised for unknown subcommands or malformed flags."""
    pass


class DegenerateInputError(ValidationError):
    """Raised when kernel input cannot define a motion model (e.g. duplicate timestamps)."""
    pass


class AntimeridianError(ValidationError):
    """Raised when a midpoint is requested across the ±180° meridian."""
    pass


class MissingLabelsError(ValidationError):
    """Raised when an operation needs ground-truth labels and none are attached."""
    pass


class EmptyInputError(ValidationError):
    """Raised when an operation receives nothing to work on."""
    pass


class ModelMismatchError(ValidationError):
    """Raised when features or window sizes do not match a trained model."""
    pass


class SchemaVersionError(ValidationError):
    """Raised when a model file was written with another schema or version."""
    pass


class NotEnoughObjectsError(ValidationError):
    """Raised when a dataset has fewer moving objects than requested folds."""
    pass


class PointsFileError(ValidationError):
    """
    Base class for points CSV ingestion errors.

    Carries the offending file line (1-based, header is line 1) and a
    stable category string so callers can branch without parsing messages.
    """

    category = "points-file"

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(f"[{self.category}] {prefix}{message}")


class PointsSchemaError(PointsFileError):
    category = "schema"


class DuplicateTimestampError(PointsFileError):
    category = "duplicate-timestamp"


class CoordinateRangeError(PointsFileError):
    category = "coordinate-range"


class PartialLabelsError(PointsFileError):
    category = "partial-labels"
