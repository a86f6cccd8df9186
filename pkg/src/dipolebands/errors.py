"""Exception types shared across the package."""


class DipoleBandsError(Exception):
    """Base class for all package-specific errors."""


class InvalidLatticeError(DipoleBandsError):
    """Lattice vectors are degenerate or the basis is malformed."""


class LightConeError(DipoleBandsError):
    """A momentum sample fell inside the light-circle guard band."""


class ConvergenceError(DipoleBandsError):
    """A sum, quadrature or extrapolation failed to converge.

    Carries optional diagnostics in ``details``.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class DegenerateBandError(DipoleBandsError):
    """Bands touch on the integration grid; Chern numbers are undefined."""


class PoleProximityError(DipoleBandsError):
    """A Fresnel denominator was hit (numerically) exactly on the SPP pole."""


class ValidationError(DipoleBandsError):
    """A run configuration failed validation."""
