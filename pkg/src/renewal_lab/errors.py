"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`RenewalLabError`, itself a :class:`ValueError`, so callers that only
care about "bad input" can catch the builtin.
"""


class RenewalLabError(ValueError):
    pass


class NegativeMass(RenewalLabError):
    pass


class NotNormalized(RenewalLabError):
    pass


class EmptySupport(RenewalLabError):
    pass


class InvalidRational(RenewalLabError):
    """A string could not be parsed as an exact rational (decimals are refused)."""


class NotInSimplex(RenewalLabError):
    pass


class ResolutionZero(RenewalLabError):
    pass


class DegenerateLaw(RenewalLabError):
    """Some p_j equals 1, so the walk is deterministic."""


class HorizonTooShort(RenewalLabError):
    pass


class PeriodicWalk(RenewalLabError):
    pass


class ArityMismatch(RenewalLabError):
    pass


class OutOfRange(RenewalLabError):
    pass


class BoundaryPoint(RenewalLabError):
    """The point lies on a tie set between two renewal polynomials."""


class NoPositiveA(RenewalLabError):
    pass


class RequiresTwoRegions(RenewalLabError):
    pass


class LPInfeasible(RenewalLabError):
    pass


class LPUnbounded(RenewalLabError):
    pass
