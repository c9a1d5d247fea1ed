"""Exception types shared across the package."""


class DropsedError(Exception):
    """Base class for all package errors."""


class ConfigError(DropsedError):
    """Invalid run configuration (bad file, bad key, bad value)."""


class DegenerateProfileError(DropsedError):
    """A radius profile with min r <= 0 was passed to an operator
    that requires positivity."""


class CflViolationError(DropsedError):
    """The Courant number max|A1| dt/dtheta reached 1."""

    def __init__(self, courant, max_a1):
        super().__init__(
            f"CFL violation: courant={courant:.4g} (max|A1|={max_a1:.4g})"
        )
        self.courant = courant
        self.max_a1 = max_a1


class OracleDomainError(DropsedError):
    """The exact-sphere parametrization is undefined (|c - c*| > 1)."""
