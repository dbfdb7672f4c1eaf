"""Exception types shared across the package."""


class OemError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(OemError):
    """One or more configuration invariants are violated.

    Carries the full list of violations so callers can report them all at
    once instead of fixing them one by one.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DivergenceError(OemError):
    """The integration blew up (parametric instability or bad step size)."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"state magnitude exceeded threshold at t = {t:.6g}")


class NonphysicalCovarianceError(OemError):
    """A covariance matrix violates the uncertainty relation beyond tolerance."""


class EmptyWindowError(OemError):
    """An analysis window contains no recorded samples."""


class ConfigError(OemError):
    """A scenario or sweep file could not be parsed."""
