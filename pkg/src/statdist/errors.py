"""Exception hierarchy.

Input problems derive from ``InputError`` (a ``ValueError``); numerical
breakdowns derive from ``NumericalFailure``. The CLI maps the two groups to
distinct exit codes.
"""


class StatDistError(Exception):
    """Base class for every error raised by this package."""


class InputError(StatDistError, ValueError):
    pass


class NumericalFailure(StatDistError, ArithmeticError):
    pass


# densities
class NegativeMass(InputError):
    pass


class MassSumOutOfTolerance(InputError):
    pass


class DuplicateSupportPoint(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ValueOutsideSupport(InputError):
    pass


class PointNotInSupport(InputError):
    pass


class EpsilonOutOfRange(InputError):
    pass


class EmptyGrid(InputError):
    pass


class UnsortedGrid(InputError):
    pass


class GeneratorDomainError(InputError):
    pass


# residuals / divergences
class DeltaBelowMinusOne(InputError):
    pass


class LambdaUndefined(InputError):
    pass


class AlphaOutOfRange(InputError):
    pass


class ZeroDistance(InputError):
    pass


class InfiniteDistance(NumericalFailure):
    pass


class ZeroVariance(InputError):
    pass


# quadratic
class AsymmetricKernel(InputError):
    pass


class ZeroMassCell(InputError):
    pass


class QuadratureFailure(NumericalFailure):
    pass


# cdf distances
class NonMonotoneOnSupport(InputError):
    pass


# estimation
class AllDistancesInfinite(NumericalFailure):
    pass
