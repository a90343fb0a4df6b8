"""Exception types shared across the geometry modules."""


class NKSixError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(NKSixError):
    """Matrix or vector dimensions do not match the requested operation."""


class BasePointMismatchError(NKSixError):
    """Two tangent vectors do not share a base point."""


class GramMismatchError(NKSixError):
    """Two frames do not have matching inner-product tables."""


class DegenerateBasisError(NKSixError):
    """A frame that should be a basis is numerically dependent."""


class OrientationMismatchError(NKSixError):
    """Frames have matching Gram tables but opposite orientation, so no
    conjugation maps one onto the other."""


class SingularMetricError(NKSixError):
    """A sampled metric tensor is numerically singular."""


class NotAnIsometryError(NKSixError):
    """A candidate map distorts the metric beyond the allowed tolerance."""


class DecompositionError(NKSixError):
    """An isometry decomposition step failed (incompatible structure
    behaviour, ambiguous distribution images, or inconsistent angles)."""


class SerializationError(NKSixError):
    """A serialized element or generator file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({where})"
        super().__init__(message)
