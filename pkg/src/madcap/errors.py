"""Exception types shared across the package."""


class MadcapError(ValueError):
    """Base class for all madcap errors."""


class NonHermitianError(MadcapError):
    pass


class DimensionMismatchError(MadcapError):
    pass


class InvalidStateError(MadcapError):
    """A matrix failed the density-matrix invariants."""


class DegenerateDecompositionError(MadcapError):
    """A decomposition denominator vanished."""


class SingularInverseError(MadcapError):
    """The requested inverse map does not exist."""


class IndexOutOfRangeError(MadcapError):
    pass


class NotComparableError(MadcapError):
    """Two transition matrices do not differ in exactly one decay entry."""


class ConditionViolatedError(MadcapError):
    """A structural precondition (antidegradability, complete damping, ...) fails."""
