"""Exception hierarchy shared by every phimf module."""


class PhimfError(Exception):
    """Base class for all numerical failures raised by phimf."""


class PoleProximity(PhimfError, ValueError):
    """Evaluation point lies within the pole-exclusion radius of a pole."""


class NotPositiveDefinite(PhimfError, ValueError):
    """A non-positive pivot appeared during a Cholesky factorization."""


class Singular(PhimfError, ValueError):
    """A pivot column of an LU factorization is numerically zero."""


class NotSymmetric(PhimfError, ValueError):
    pass


class MaxSweepsExceeded(PhimfError, RuntimeError):
    pass


class DimensionMismatch(PhimfError, ValueError):
    pass


class BandViolation(PhimfError, ValueError):
    """Requested entry lies inside the band where the decay bound is not asserted."""


class DegreeTooLarge(PhimfError, ValueError):
    pass


class NoConvergence(PhimfError, RuntimeError):
    pass
