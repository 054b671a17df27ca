"""Exception types raised across the package."""


class DiemKitError(Exception):
    """Base class for all diemkit errors."""


class ConstraintViolationError(DiemKitError, ValueError):
    """An argument violates a documented constraint (bad domain, bad std, ...)."""


class DimensionMismatchError(DiemKitError, ValueError):
    """Two vectors (or a vector and a calibration) disagree on dimension."""


class UndefinedSimilarityError(DiemKitError, ValueError):
    """A metric is undefined for the inputs (zero-norm vector)."""


class CalibrationMismatchError(DiemKitError, ValueError):
    """A calibration does not apply to the given vectors."""


class InsufficientSamplesError(DiemKitError, ValueError):
    """Too few Monte Carlo trials requested for a reliable estimate."""


class InsufficientDataError(DiemKitError, ValueError):
    """Too few data points for the requested analysis (e.g. a fit)."""


class EmptySampleError(DiemKitError, ValueError):
    """An operation that needs at least one sample received none."""


class DegenerateDistributionError(DiemKitError, ValueError):
    """A sample with zero spread where a test needs variability."""


class ParseError(DiemKitError, ValueError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f" ({path}" + (f", line {line}" if line is not None else "") + ")"
        super().__init__(message + loc)
        self.path = path
        self.line = line


class DuplicateIdError(ParseError):
    """Two records in one collection share an id."""
