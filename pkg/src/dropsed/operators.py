"""Quadrature evaluation of the nonlocal surface operators.

The surface velocity is a double integral over (thetabar, phibar) in
[0, pi] x [0, 2*pi] whose kernel carries an integrable 1/beta
singularity at the evaluation point.  All integrals use the midpoint
rule on a grid staggered half a cell from the profile nodes, so the
singular denominator never vanishes at a quadrature node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import GridSpec, RadiusProfile
from .errors import DegenerateProfileError

#: Calibration constant of the per-resolution quadrature tolerance.
TOL_SCALE = 2.0

_WORKERS = 1


def set_workers(n: int):
    """Number of threads used for field assembly.  Per-node quadrature
    sums keep a fixed reduction order, so results are bit-identical to
    the sequential evaluation."""
    global _WORKERS
    _WORKERS = max(1, int(n))


def quadrature_tolerance(M: int, L: int) -> float:
    """First-order midpoint tolerance, TOL_SCALE / min(M, L)."""
    return TOL_SCALE / min(M, L)


def derivative(profile: RadiusProfile) -> np.ndarray:
    """Second-order finite-difference d r / d theta on the node grid.

    Centered stencil at interior nodes, one-sided second-order at the
    poles; exact on quadratics.
    """
    r = profile.values
    h = profile.grid.dtheta
    dr = np.empty_like(r)
    dr[1:-1] = (r[2:] - r[:-2]) / (2.0 * h)
    dr[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * h)
    dr[-1] = (3.0 * r[-1] - 4.0 * r[-2] + r[-3]) / (2.0 * h)
    return dr


def chord_sq(r1, r2, theta, thetabar, phibar):
    """Stabilized squared chord length between the surface points
    r1*e(theta,0) and r2*e(thetabar,phibar).

    Uses (r1-r2)^2 + r1*r2*|e - ebar|^2, which never cancels, instead
    of the literal expansion r1^2 + r2^2 - 2 r1 r2 (e . ebar).
    """
    de1 = np.sin(theta) - np.sin(thetabar) * np.cos(phibar)
    de2 = np.sin(thetabar) * np.sin(phibar)
    de3 = np.cos(theta) - np.cos(thetabar)
    return (r1 - r2) ** 2 + r1 * r2 * (de1 * de1 + de2 * de2 + de3 * de3)


def beta(r, theta, thetabar, phibar):
    """Chordal distance beta between two surface points of the profile
    described by the radius function ``r`` (a callable of theta)."""
    r1 = r(np.asarray(theta, dtype=float))
    r2 = r(np.asarray(thetabar, dtype=float))
    return np.sqrt(chord_sq(r1, r2, theta, thetabar, phibar))


def beta_literal(r, theta, thetabar, phibar):
    """Textbook expansion of beta^2 (reference for the stabilized form)."""
    r1 = r(np.asarray(theta, dtype=float))
    r2 = r(np.asarray(thetabar, dtype=float))
    dot = (
        np.sin(theta) * np.sin(thetabar) * np.cos(phibar)
        + np.cos(theta) * np.cos(thetabar)
    )
    return np.sqrt(np.maximum(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * dot, 0.0))


@dataclass(frozen=True)
class StaggeredQuadrature:
    """Midpoint quadrature data for one profile: nodes offset half a
    cell in thetabar and phibar, profile and derivative averaged onto
    the staggered colatitudes."""

    thetabar: np.ndarray   # (M,)
    phibar: np.ndarray     # (L,)
    rb: np.ndarray         # r at thetabar
    drb: np.ndarray        # dr/dtheta at thetabar
    weight: float          # dtheta * dphi

    @classmethod
    def from_profile(cls, profile: RadiusProfile, dr: np.ndarray | None = None):
        grid = profile.grid
        if dr is None:
            dr = derivative(profile)
        tb = (np.arange(grid.M) + 0.5) * grid.dtheta
        ph = (np.arange(grid.L) + 0.5) * grid.dphi
        rb = 0.5 * (profile.values[:-1] + profile.values[1:])
        drb = 0.5 * (dr[:-1] + dr[1:])
        return cls(thetabar=tb, phibar=ph, rb=rb, drb=drb,
                   weight=grid.dtheta * grid.dphi)


def _velocity_quadrature(r_eval, theta_eval, quad: StaggeredQuadrature):
    """Evaluate the three boundary-integral velocity components at the
    points r_eval[i] * e(theta_eval[i], 0).  Returns an (n, 3) array.

    The phibar reduction is a fixed-order matmul, so results are
    bit-reproducible for a given resolution.
    """
    tb, ph, rb, drb = quad.thetabar, quad.phibar, quad.rb, quad.drb
    st, ct = np.sin(theta_eval), np.cos(theta_eval)
    stb, ctb = np.sin(tb), np.cos(tb)
    cph, sph = np.cos(ph), np.sin(ph)

    # kernel numerator K*beta = [rb sin - rb' cos] rb sin
    w = (rb * stb - drb * ctb) * rb * stb

    # beta^2 = (r - rb)^2 + 2 r rb ((1 - cos ct ctb) - st stb cos(phibar)),
    # grouped so the phibar axis enters through a single fused multiply
    a = np.outer(st, stb)
    c = 1.0 - np.outer(ct, ctb)
    dr2 = (r_eval[:, None] - rb[None, :]) ** 2
    rr = r_eval[:, None] * rb[None, :]
    beta2 = dr2[:, :, None] + 2.0 * rr[:, :, None] * (
        c[:, :, None] - a[:, :, None] * cph[None, None, :]
    )
    inv_beta = 1.0 / np.sqrt(beta2)

    s0 = inv_beta.sum(axis=2)
    s1 = inv_beta @ cph
    s2 = inv_beta @ sph

    fac = -quad.weight / (8.0 * math.pi)
    g1 = r_eval[:, None] * ct[:, None] - (rb * ctb)[None, :]
    u1 = fac * (w[None, :] * g1 * s1).sum(axis=1)
    u2 = fac * (w[None, :] * g1 * s2).sum(axis=1)
    u3 = fac * (
        w[None, :] * (-r_eval[:, None] * st[:, None] * s1 + (rb * stb)[None, :] * s0)
    ).sum(axis=1)
    return np.stack([u1, u2, u3], axis=1)


def velocity_field(profile: RadiusProfile, dr: np.ndarray | None = None) -> np.ndarray:
    """Boundary-integral velocity U[r] at every node theta_i, (M+1, 3)."""
    profile.require_positive()
    quad = StaggeredQuadrature.from_profile(profile, dr)
    theta = profile.grid.theta
    if _WORKERS == 1 or len(theta) < 4 * _WORKERS:
        return _velocity_quadrature(profile.values, theta, quad)
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(np.arange(len(theta)), _WORKERS)
    with ThreadPoolExecutor(max_workers=_WORKERS) as pool:
        parts = list(
            pool.map(
                lambda idx: _velocity_quadrature(profile.values[idx], theta[idx], quad),
                chunks,
            )
        )
    return np.concatenate(parts, axis=0)


def velocity_surface(profile: RadiusProfile, theta, dr: np.ndarray | None = None):
    """Boundary-integral velocity U[r](theta) at arbitrary colatitudes.

    Off-node radii are linearly interpolated from the profile.
    """
    profile.require_positive()
    quad = StaggeredQuadrature.from_profile(profile, dr)
    theta_eval = np.atleast_1d(np.asarray(theta, dtype=float))
    r_eval = np.interp(theta_eval, profile.grid.theta, profile.values)
    u = _velocity_quadrature(r_eval, theta_eval, quad)
    return u[0] if np.isscalar(theta) or np.ndim(theta) == 0 else u


def oseen_tensor(x: np.ndarray) -> np.ndarray:
    """Free-space Stokeslet (1/8pi)(I/|x| + x x^T / |x|^3)."""
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    return (np.eye(3) / nrm + np.outer(x, x) / nrm**3) / (8.0 * math.pi)


def velocity_volume(profile: RadiusProfile, theta, n_gauss: int = 8):
    """Volume-integral velocity at r(theta)*e(theta,0) via the Oseen
    tensor applied to the forcing -e3.

    Independent cross-check of :func:`velocity_surface`: staggered
    midpoint in (thetabar, phibar), Gauss-Legendre in the radial
    variable z over [0, r(thetabar)].
    """
    profile.require_positive()
    grid = profile.grid
    quad = StaggeredQuadrature.from_profile(profile)
    tb, ph, rb = quad.thetabar, quad.phibar, quad.rb

    theta = float(theta)
    r0 = float(np.interp(theta, grid.theta, profile.values))
    x = r0 * np.array([math.sin(theta), 0.0, math.cos(theta)])

    zg, wg = np.polynomial.legendre.leggauss(n_gauss)
    # map [-1, 1] onto [0, rb_j] for each staggered colatitude
    z = 0.5 * rb[:, None] * (zg[None, :] + 1.0)      # (M, G)
    wz = 0.5 * rb[:, None] * wg[None, :]             # (M, G)

    stb, ctb = np.sin(tb), np.cos(tb)
    e1 = np.outer(stb, np.cos(ph))                   # (M, L)
    e2 = np.outer(stb, np.sin(ph))
    e3 = np.broadcast_to(ctb[:, None], e1.shape)

    # d = x - z*ebar, axes (M, L, G)
    d1 = x[0] - z[:, None, :] * e1[:, :, None]
    d2 = x[1] - z[:, None, :] * e2[:, :, None]
    d3 = x[2] - z[:, None, :] * e3[:, :, None]
    nrm = np.sqrt(d1 * d1 + d2 * d2 + d3 * d3)
    # Phi(d) @ (-e3) = -(1/8pi) (e3/|d| + d * d3/|d|^3)
    coef = -1.0 / (8.0 * math.pi)
    common = d3 / nrm**3
    meas = (z * z * wz)[:, None, :] * (stb * quad.weight)[:, None, None]
    u = np.empty(3)
    u[0] = (coef * d1 * common * meas).sum()
    u[1] = (coef * d2 * common * meas).sum()
    u[2] = (coef * (1.0 / nrm + d3 * common) * meas).sum()
    return u


@dataclass(frozen=True)
class OperatorField:
    """A1, A2 and the velocity sampled at every node for one profile."""

    a1: np.ndarray      # (M+1,)
    a2: np.ndarray      # (M+1,)
    u: np.ndarray       # (M+1, 3)
    cdot3: float

    def __post_init__(self):
        if self.a1[0] != 0.0 or self.a1[-1] != 0.0:
            raise ValueError("A1 must vanish at the poles")


def project_a1(u: np.ndarray, cdot3: float, theta: np.ndarray, r: np.ndarray):
    """A1 = (1/r) (u - cdot) . dtheta_e with dtheta_e = (cos, 0, -sin).

    The pole values are forced to exactly zero (they vanish
    analytically for every profile).
    """
    a1 = (u[..., 0] * np.cos(theta) - (u[..., 2] - cdot3) * np.sin(theta)) / r
    a1[..., 0] = 0.0
    a1[..., -1] = 0.0
    return a1


def project_a2(u: np.ndarray, cdot3: float, theta: np.ndarray):
    """A2 = (u - cdot) . e with e = (sin, 0, cos)."""
    return u[..., 0] * np.sin(theta) + (u[..., 2] - cdot3) * np.cos(theta)


def operator_field(profile: RadiusProfile, cdot3: float) -> OperatorField:
    """Assemble A1, A2 and U at every node for the given center velocity."""
    theta = profile.grid.theta
    u = velocity_field(profile)
    a1 = project_a1(u, cdot3, theta, profile.values)
    a2 = project_a2(u, cdot3, theta)
    return OperatorField(a1=a1, a2=a2, u=u, cdot3=float(cdot3))


def a1(profile: RadiusProfile, cdot3: float, theta):
    """Transport coefficient A1[r](theta) at one colatitude."""
    theta = float(theta)
    if theta == 0.0 or theta == math.pi:
        return 0.0
    u = velocity_surface(profile, theta)
    r = float(np.interp(theta, profile.grid.theta, profile.values))
    return float(
        (u[0] * math.cos(theta) - (u[2] - cdot3) * math.sin(theta)) / r
    )


def a2(profile: RadiusProfile, cdot3: float, theta):
    """Source term A2[r](theta) at one colatitude."""
    theta = float(theta)
    u = velocity_surface(profile, theta)
    return float(u[0] * math.sin(theta) + (u[2] - cdot3) * math.cos(theta))


def center_velocity(profile: RadiusProfile) -> float:
    """Vertical velocity of a flow-transported reference center,
    -(1/4) int r^2 sin(theta) (1 - sin^2(theta)/2) dtheta.

    Composite Simpson on the node grid; the integrand is smooth, so
    this is far more accurate than the operator quadrature.
    """
    theta = profile.grid.theta
    s = np.sin(theta)
    integrand = profile.values**2 * s * (1.0 - 0.5 * s * s)
    return float(-0.25 * simpson(integrand, x=theta))


def sphere_identity_integrals(M: int, L: int):
    """The four unit-sphere integrals with denominator |e3 - omega|,
    evaluated by the staggered midpoint rule.

    Returns (I1, I2, I3, I4) where I1 = int omega/|e3-omega|,
    I2 = int 1/|e3-omega|, I3 = int omega_1 omega/|.|,
    I4 = int omega_3 omega/|.|; exact values are (4pi/3)e3, 4pi,
    (16pi/15)e1 and (28pi/15)e3.
    """
    dth = math.pi / M
    dph = 2.0 * math.pi / L
    tb = (np.arange(M) + 0.5) * dth
    ph = (np.arange(L) + 0.5) * dph
    stb, ctb = np.sin(tb), np.cos(tb)
    w1 = np.outer(stb, np.cos(ph))
    w2 = np.outer(stb, np.sin(ph))
    w3 = np.broadcast_to(ctb[:, None], w1.shape)
    # |e3 - omega|^2 = 2(1 - cos(thetabar)), independent of phibar
    inv = 1.0 / np.sqrt(2.0 * (1.0 - ctb))[:, None]
    meas = (stb * dth * dph)[:, None]
    g = inv * meas

    def vec(extra=1.0):
        return np.array(
            [(extra * w1 * g).sum(), (extra * w2 * g).sum(), (extra * w3 * g).sum()]
        )

    i1 = vec()
    i2 = float(g.sum() * L)
    i3 = vec(extra=w1)
    i4 = vec(extra=w3)
    return i1, i2, i3, i4


def rotated_sphere_integral(theta: float, M: int, L: int) -> float:
    """int dsigma / |e(theta,0) - omega| over the unit sphere; equals
    4*pi for every theta by rotation invariance."""
    dth = math.pi / M
    dph = 2.0 * math.pi / L
    tb = (np.arange(M) + 0.5) * dth
    ph = (np.arange(L) + 0.5) * dph
    stb, ctb = np.sin(tb), np.cos(tb)
    dot = np.outer(math.sin(theta) * stb, np.cos(ph)) + math.cos(theta) * ctb[:, None]
    inv = 1.0 / np.sqrt(2.0 * (1.0 - dot))
    return float((inv * (stb * dth * dph)[:, None]).sum())


def flux_balance(profile: RadiusProfile, cdot3: float) -> float:
    """Discrete volume flux int (A2 - dr A1) r^2 sin(theta) dtheta.

    Vanishes analytically for every profile and center velocity
    (incompressibility); evaluated with the same staggered operator
    quadrature and a trapezoid rule on the nodes.
    """
    theta = profile.grid.theta
    fld = operator_field(profile, cdot3)
    dr = derivative(profile)
    integrand = (fld.a2 - dr * fld.a1) * profile.values**2 * np.sin(theta)
    return float(np.trapezoid(integrand, theta))
