"""Exception types raised by the package."""


class SubbandError(Exception):
    """Base class for all package errors."""


class ParameterError(SubbandError, ValueError):
    """An argument is outside its valid domain."""


class DegenerateFilterError(SubbandError, ValueError):
    """A filter cannot be normalized (zero coefficient sum)."""


class PreconditionError(SubbandError, ValueError):
    """An input violates an operation's stated precondition."""


class BudgetExceededError(SubbandError, RuntimeError):
    """A brute-force enumeration would exceed its term budget."""


class StructuralError(SubbandError, ValueError):
    """Two results do not share the same level structure."""


class FitError(SubbandError, ValueError):
    """Not enough data to fit a regression."""


class AnalysisError(SubbandError, ValueError):
    """Records are insufficient for the requested analysis."""


class DataError(SubbandError, ValueError):
    """Sample data contains invalid values."""
