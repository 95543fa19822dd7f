"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`OpentropyError`, so callers can catch the whole family at once.
The CLI maps the subclasses below to distinct exit codes.
"""


class OpentropyError(Exception):
    """Base class for all package errors."""


class ValidationError(OpentropyError, ValueError):
    """Input violates a documented precondition (shape, measure, partition)."""


class MeasureError(ValidationError):
    """Weights are non-positive, not normalized, or too short."""


class SpecError(ValidationError):
    """An operator spec is malformed or cannot produce the requested size."""


class NotContractionError(ValidationError):
    """Operator norm in l2(mu) exceeds one."""


class NotSemibistochasticError(ValidationError):
    """Negative entry, or a row or column sum above one."""


class BudgetExceededError(OpentropyError):
    """Path enumeration would exceed the configured budget."""


class NumericalDiagnosticError(OpentropyError):
    """A numerical procedure could not produce a trustworthy answer."""


class RankAmbiguityError(NumericalDiagnosticError):
    """Kernel dimension of B - I is unstable under the singular-value threshold."""
