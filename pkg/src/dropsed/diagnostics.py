"""Error metrics against the exact sphere, volume conservation and
section curves for plotting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RadiusProfile
from .errors import OracleDomainError
from .hr_oracle import exact_radius

UNIT_SPHERE_VOLUME = 4.0 * math.pi / 3.0

CSV_HEADER = "t,gap_abs,e1,e2,vol_rel,min_r"


@dataclass(frozen=True)
class DiagnosticsRow:
    """Per-output-time record.  e1/e2/vol_rel are None once the oracle
    or the positivity assumption breaks down."""

    t: float
    gap_abs: float
    e1: float | None
    e2: float | None
    vol_rel: float | None
    min_r: float

    def to_csv(self) -> str:
        def fmt(x):
            return "" if x is None else f"{x:.12g}"

        return ",".join(
            fmt(v) for v in (self.t, self.gap_abs, self.e1, self.e2, self.vol_rel, self.min_r)
        )


def error_metrics(profile: RadiusProfile, gap: float):
    """(max, mean) absolute node error against the exact sphere radius
    at center gap ``gap``.  The mean is normalized by the node count."""
    if abs(gap) > 1.0:
        raise OracleDomainError(f"|gap| = {abs(gap):.4g} > 1")
    ref = exact_radius(gap, profile.grid.theta)
    err = np.abs(profile.values - ref)
    return float(err.max()), float(err.sum() / (profile.grid.M + 1))


def volume(profile: RadiusProfile, reference: float = UNIT_SPHERE_VOLUME):
    """(volume, relative error) of the axisymmetric body,
    (2pi/3) int r^3 sin(theta) dtheta by the trapezoid rule."""
    theta = profile.grid.theta
    vol = (2.0 * math.pi / 3.0) * float(
        np.trapezoid(profile.values**3 * np.sin(theta), theta)
    )
    return vol, abs(vol - reference) / reference


def section_curve(profile: RadiusProfile, c3: float) -> np.ndarray:
    """Meridian section of the surface as 2D points (x, z), the right
    half theta = 0..pi followed by its mirror, poles not duplicated.
    Returns a (2M, 2) array."""
    theta = profile.grid.theta
    x = profile.values * np.sin(theta)
    z = c3 + profile.values * np.cos(theta)
    right = np.stack([x, z], axis=1)
    left = np.stack([-x[-2:0:-1], z[-2:0:-1]], axis=1)
    return np.concatenate([right, left], axis=0)


def compute_row(state) -> DiagnosticsRow:
    """Diagnostics for one simulation state; oracle-based metrics are
    dropped when |gap| > 1 or the profile lost positivity."""
    profile = state.r
    gap = state.center.gap3
    e1 = e2 = vol_rel = None
    if not profile.degenerate:
        _, vol_rel = volume(profile)
        if abs(gap) <= 1.0:
            e1, e2 = error_metrics(profile, gap)
    return DiagnosticsRow(
        t=state.center.t,
        gap_abs=abs(gap),
        e1=e1,
        e2=e2,
        vol_rel=vol_rel,
        min_r=profile.min,
    )


def rows_to_csv(rows) -> str:
    """Serialize rows with the fixed header, LF endings."""
    lines = [CSV_HEADER]
    lines.extend(row.to_csv() for row in rows)
    return "\n".join(lines) + "\n"
