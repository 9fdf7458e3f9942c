"""Exception taxonomy shared across the package.

Validation problems (bad arguments, violated preconditions) derive from
ValueError; numeric failures discovered mid-computation derive from
RuntimeError. The CLI maps the former to exit code 2 and the latter to 3.
"""


class CyclicityError(Exception):
    """Base class for all package errors."""


class ArgumentError(CyclicityError, ValueError):
    """Invalid argument or violated precondition."""


class DimensionMismatchError(ArgumentError):
    """Operands live over different variable counts or incompatible shapes."""


class DegreeRangeError(ArgumentError):
    """Requested degree or word length exceeds the precomputed range."""


class DegenerateInputError(ArgumentError):
    """Input is degenerate for the requested operation (e.g. f = 0)."""


class SingularInversionError(ArgumentError):
    """Power-series inversion of a series whose constant term vanishes."""


class NumericFailureError(CyclicityError, RuntimeError):
    """A numeric routine failed to produce a usable result."""


class ConditioningError(NumericFailureError):
    """Least-squares system too ill-conditioned for any available solver."""
