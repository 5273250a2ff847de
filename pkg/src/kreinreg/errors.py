"""Exception hierarchy for kreinreg.

Every error raised deliberately by the library derives from
:class:`KreinRegError`, so callers (the CLI in particular) can tell library
failures apart from programming errors.
"""


class KreinRegError(Exception):
    """Base class for all library errors."""


class UnsupportedNode(KreinRegError):
    """A function term has no exact rule for the requested operation."""


class QuadratureFailure(KreinRegError):
    """Adaptive quadrature could not reach its tolerance within the panel budget."""


class EmptyCombination(KreinRegError):
    """``combine`` was called with no terms."""


class UnderflowRisk(KreinRegError):
    """A constructed parameter would fall below the safe binary64 range."""


class InvalidProfile(KreinRegError):
    """Singularity data violate the hypotheses of the construction."""


class DiagonalIndex(KreinRegError):
    """The pair enumeration is undefined on the diagonal."""


class BudgetExceeded(KreinRegError):
    """The corrected building block already exceeds its L2 budget."""


class NegativeSquare(KreinRegError):
    """A quantity that must be a square came out negative beyond tolerance."""


class TruncationMismatch(KreinRegError):
    """Vectors or systems with different truncation orders were combined."""


class IndexOutOfRange(KreinRegError):
    """An index exceeds the truncation order."""


class DegenerateGram(KreinRegError):
    """A Gram matrix has an eigenvalue too close to zero to count its inertia."""


class SingularDecomposition(KreinRegError):
    """The coefficient system of a neutral decomposition is rank deficient."""


class NotPositiveDefinite(KreinRegError):
    """A matrix expected to be positive definite is not."""


class EmptyFamily(KreinRegError):
    """A sampled estimate was requested over an empty family."""


class SupportStraddlesOrigin(KreinRegError):
    """A function term is supported on both sides of the origin."""


class ConfigError(KreinRegError):
    """A scenario configuration is invalid."""
