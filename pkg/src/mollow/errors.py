"""Exception and warning types shared across the package."""


class LayoutMismatchError(ValueError):
    """Operands live on different space layouts (or wrong dimensions)."""


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one stationary mode; the steady state
    is not unique and must be disambiguated by the caller."""


class UndefinedCorrelationError(ValueError):
    """A normalized correlation is requested but a normalizing moment
    vanishes (e.g. an unpopulated mode)."""


class InsufficientStatisticsError(RuntimeError):
    """Not enough Monte Carlo events survive the burn-in to form the
    requested conditional statistics."""


class TrajectoryError(RuntimeError):
    """A Monte Carlo trajectory could not be propagated reliably."""


class TruncationWarning(UserWarning):
    """A bosonic mode holds non-negligible population in its top Fock
    level; results may be biased by the cutoff."""


class TruncationError(RuntimeError):
    """Truncation health check failed hard (raised where a biased result
    would silently corrupt a reported measure)."""
