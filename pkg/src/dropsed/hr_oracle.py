"""Closed-form Hadamard-Rybczynski reference solution.

A unit drop falls rigidly at v* = -(4/15) e3.  For a reference center
displaced by ``gap`` from the true sphere center, the spherical
parametrization of the same unit sphere has an explicit radius, valid
while |gap| <= 1.
"""

from __future__ import annotations

import math

import numpy as np

from .core import V_STAR_3
from .errors import OracleDomainError


def v_star() -> np.ndarray:
    """Terminal velocity of the unit drop, (0, 0, -4/15)."""
    return np.array([0.0, 0.0, V_STAR_3])


def exact_radius(gap, theta):
    """Radius of the unit sphere seen from a center offset by ``gap``:
    r = -gap*cos(theta) + sqrt(1 - gap^2 sin^2(theta)).

    Raises OracleDomainError when |gap| > 1 (parametrization breaks).
    """
    gap = np.asarray(gap, dtype=float)
    if np.any(np.abs(gap) > 1.0):
        raise OracleDomainError(f"|gap| = {np.abs(gap).max():.4g} > 1")
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    return -gap * np.cos(theta) + np.sqrt(1.0 - gap * gap * s * s)


def transported_center_gap(t):
    """Center gap (c - c*)_3 for the flow-transported center law.

    Solves gap' = -1/15 + gap^2/15, gap(0) = 0, giving -tanh(t/15);
    the tanh form avoids overflow of the exponential quotient at
    large t.
    """
    return -np.tanh(np.asarray(t, dtype=float) / 15.0)


def closed_form_sphere_velocity(theta):
    """Fluid velocity on the unit sphere meridian, from the explicit
    surface integrals:
    u = (1/15)cos(theta) Q e3 - (2/15)sin(theta) Q e1 - (1/3) e3.

    Returns an (..., 3) array; the normal part equals v*.n everywhere.
    """
    theta = np.asarray(theta, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    u1 = (1.0 / 15.0) * ct * st - (2.0 / 15.0) * st * ct
    u2 = np.zeros_like(theta)
    u3 = (1.0 / 15.0) * ct * ct + (2.0 / 15.0) * st * st - 1.0 / 3.0
    return np.stack([u1, u2, u3], axis=-1)


def hadamard_tangency_residual(theta, u) -> float:
    """max over theta of |(u - v*) . e(theta, 0)| for a velocity field
    sampled on the unit-sphere meridian; exactly 0 for the true flow."""
    theta = np.asarray(theta, dtype=float)
    u = np.asarray(u, dtype=float)
    normal = (
        u[..., 0] * np.sin(theta) + (u[..., 2] - V_STAR_3) * np.cos(theta)
    )
    return float(np.abs(normal).max())


def scaled_center_gap(lam: float, t):
    """Center gap for the scaled law cdot = lam * v*:
    gap = (lam - 1) * v*_3 * t."""
    return (lam - 1.0) * V_STAR_3 * np.asarray(t, dtype=float)


def breakdown_time(lam: float) -> float:
    """Time at which |gap| reaches 1 under the scaled law (inf for
    lam = 1)."""
    if lam == 1.0:
        return math.inf
    return 1.0 / abs((lam - 1.0) * V_STAR_3)
