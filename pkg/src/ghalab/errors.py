"""Exception types shared across the package."""


class GhalabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(GhalabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonIncreasingSpectrum(GhalabError):
    """Spectrum recursion produced a non-increasing energy sequence."""


class NonFiniteValue(GhalabError):
    """Iteration overflowed or produced NaN."""


class InsufficientSpectrum(GhalabError):
    """Spectrum has fewer levels than the requested truncation size."""


class QuadratureUnderResolved(GhalabError):
    """Quadrature diagonal deviates too far from 1 to be trusted."""


class UnsupportedModel(GhalabError):
    """Operation has no meaning for the given model variant."""


class NotInverse(GhalabError):
    """Supplied operator pair fails the inverse check."""


class SingularMap(GhalabError):
    """Similarity map is numerically singular."""


class NonPseudoBosonic(GhalabError):
    """Base operator pair does not satisfy the unit commutator."""


class DefectiveOperator(GhalabError):
    """Eigenvector matrix too ill-conditioned for a trustworthy matrix function."""


class RankDeficient(GhalabError):
    """Frame operator is numerically singular on the interior block."""


class NotPositive(GhalabError):
    """Frame operator has a significantly negative eigenvalue."""


class NearZeroSample(GhalabError):
    """Multiplication samples come too close to zero to invert."""


class ConvergenceFailure(GhalabError):
    """Dense eigensolver failed to converge."""


class DefectivePair(GhalabError):
    """Left/right eigenvector pairing is numerically singular."""


class AlignmentFailure(GhalabError):
    """Eigenvector overlap with the expected shape is too small to pair."""


class ConfigError(GhalabError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """Configuration file is not valid JSON."""


class ValidationError(ConfigError):
    """Configuration violates the documented schema."""
