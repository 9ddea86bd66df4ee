"""Exception types shared across the package."""


class GarchmcError(Exception):
    """Base class for all garchmc errors."""


class InvalidParamsError(GarchmcError, ValueError):
    """Parameter triple violates the positivity or stationarity constraints."""


class DataError(GarchmcError, ValueError):
    """Return series failed ingestion checks."""


class ParseError(GarchmcError, ValueError):
    """Input file could not be parsed; message names the offending line."""


class DimensionError(GarchmcError, ValueError):
    """Vector or matrix has an unexpected shape."""


class NuRangeError(GarchmcError, ValueError):
    """Degrees of freedom outside the admissible range."""


class FactorizationError(GarchmcError, ArithmeticError):
    """Scale matrix could not be factorized, even after jitter."""


class DegenerateSeriesError(GarchmcError, ValueError):
    """Series has zero variance; autocorrelation is undefined."""


class BlockCountError(GarchmcError, ValueError):
    """Jackknife block count incompatible with the series length."""
