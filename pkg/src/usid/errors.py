"""Exception types raised by the usid library."""


class UsidError(ValueError):
    """Base class for all usid errors."""


class NonHermitianInput(UsidError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotPositive(UsidError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class BadSystemIndex(UsidError):
    """A tensor-factor index is out of range or a pair of indices coincides."""


class DimensionMismatch(UsidError):
    """Operator or state dimensions are inconsistent."""


class InfeasibleCoefficients(UsidError):
    """Separable-measurement coefficients violate the positivity constraints."""


class ZeroSamples(UsidError):
    """A Monte Carlo run was requested with fewer than one sample."""


class NumericalUnderflow(UsidError):
    """All outcome probabilities at a measurement step underflowed."""
