"""Exception and warning types shared across the package."""


class HarmapError(Exception):
    """Base class for package-specific errors."""


class AliasingError(HarmapError):
    """A grid is too small to represent the declared spectral content."""


class DomainError(HarmapError):
    """An evaluation point lies outside the closed unit disk (or the map's range)."""


class UndersampledError(HarmapError):
    """A sampled loop turns too fast between samples for a reliable winding count."""


class NonintegerError(HarmapError):
    """A winding sum does not round cleanly to an integer."""


class ZeroOnContourError(HarmapError):
    """A function is too close to zero on the integration contour."""


class PreconditionError(HarmapError):
    """A documented precondition of an operation does not hold."""


class DegenerateCurveError(HarmapError):
    """A curve is too degenerate (collinear, zero diameter, zero cone aperture...)."""


class DilatationBoundError(HarmapError):
    """sup |omega| on the closed disk is not strictly below one."""


class TruncationError(HarmapError):
    """Truncated series arithmetic lost too much mass in its tail."""


class ReciprocalError(HarmapError):
    """A power series has (near-)zero constant term and no reciprocal."""


class NoConvergenceError(HarmapError):
    """An iteration exhausted its budget before reaching the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonmonotoneError(HarmapError):
    """A boundary correspondence stopped being increasing."""


class NonstarlikeError(HarmapError):
    """A domain is not starlike about any tried center."""


class ConvexInputError(HarmapError):
    """A construction that needs a nonconvex target received a convex one."""


class NoBridgeError(HarmapError):
    """No hull edge clears the target region at sample resolution."""


class TailWarning(UserWarning):
    """Spectral tail mass is large; smoothness assumptions may be violated."""
