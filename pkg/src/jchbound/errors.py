"""Exception hierarchy.

Parameter problems derive from :class:`ParameterError` (also a ``ValueError``),
numerical failures from :class:`NumericsError`.  The CLI maps the two families
to different exit codes.
"""


class JCHError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(JCHError, ValueError):
    pass


class NonPositiveN(ParameterError):
    pass


class NTooSmall(ParameterError):
    pass


class NonFiniteValue(ParameterError):
    pass


class NegativeRabi(ParameterError):
    pass


class NonPositiveTunneling(ParameterError):
    pass


class IndexOutOfRange(ParameterError, IndexError):
    pass


class ZeroRabi(ParameterError):
    pass


class DimensionGuardExceeded(ParameterError):
    pass


class NumericsError(JCHError, ArithmeticError):
    pass


class ComplexEigenvalueBeyondTolerance(NumericsError):
    pass


class EigensolverFailure(NumericsError):
    pass


class PoleEvaluation(NumericsError):
    pass


class NumericalRootFailure(NumericsError):
    pass


class ResolutionTooCoarse(NumericsError):
    pass


class BisectionBracketFailure(NumericsError):
    pass


class ZeroNormVector(NumericsError):
    pass


class UnnormalizedInput(NumericsError):
    pass


class ProjectorRankMismatch(NumericsError):
    pass


class NoBoundState(JCHError):
    """The requested sector/coupling hosts no bound two-polariton state."""
