"""Axisymmetric droplet sedimentation in Stokes flow.

Simulates the 1D nonlocal hyperbolic equation governing the radius
profile r(t, theta) of an axisymmetric droplet falling in a viscous
fluid, together with a closed-form Hadamard-Rybczynski reference
solution used as an accuracy oracle.
"""

from .core import (
    CenterLaw,
    CenterState,
    GridSpec,
    InitialShape,
    RadiusProfile,
    RunConfig,
    make_grid,
    sample_shape,
)
from .errors import (
    CflViolationError,
    ConfigError,
    DegenerateProfileError,
    OracleDomainError,
)

__all__ = [
    "CenterLaw",
    "CenterState",
    "CflViolationError",
    "ConfigError",
    "DegenerateProfileError",
    "GridSpec",
    "InitialShape",
    "OracleDomainError",
    "RadiusProfile",
    "RunConfig",
    "make_grid",
    "sample_shape",
]
