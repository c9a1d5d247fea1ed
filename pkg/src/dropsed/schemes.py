"""Explicit time integration of the coupled radius/center system.

Three discretizations of the hyperbolic surface equation: upwind
finite differences on the non-conservative form, an upwind finite
volume scheme on the conservative form, and its Lax-Friedrichs
variant.  A1 and A2 are evaluated once per step from the current
profile; the poles advance with A2 alone since A1 vanishes there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CenterLaw, CenterState, RadiusProfile, RunConfig, V_STAR_3, sample_shape
from .errors import CflViolationError, DegenerateProfileError
from .operators import OperatorField, center_velocity, operator_field


@dataclass(frozen=True)
class SimState:
    """Simulation state at t^n = n*dt."""

    r: RadiusProfile
    center: CenterState
    step: int
    field: OperatorField | None = None


@dataclass(frozen=True)
class CflReport:
    max_a1: float
    courant: float

    @property
    def ok(self) -> bool:
        return self.courant < 1.0


def cfl_check(fld: OperatorField, dt: float, dtheta: float) -> CflReport:
    """Courant number max|A1| dt / dtheta; stable iff strictly < 1."""
    max_a1 = float(np.abs(fld.a1).max())
    return CflReport(max_a1=max_a1, courant=max_a1 * dt / dtheta)


def upwind_fd_update(r, a1, a2, dt, dtheta):
    """One upwind finite-difference step on the radius array.

    Interior nodes use the difference selected by the sign of A1;
    pole nodes move with A2 only.
    """
    coef = dt / dtheta
    diff = np.where(a1[1:-1] >= 0.0, r[1:-1] - r[:-2], r[2:] - r[1:-1])
    rn = np.empty_like(r)
    rn[1:-1] = r[1:-1] - coef * (a1[1:-1] * diff) + dt * a2[1:-1]
    rn[0] = r[0] + dt * a2[0]
    rn[-1] = r[-1] + dt * a2[-1]
    return rn


def _fv_source(r, a1, a2, dtheta):
    # S_i = A2_i + r_i (A1_{i+1} - A1_{i-1}) / (2 dtheta), interior only
    return a2[1:-1] + r[1:-1] * ((a1[2:] - a1[:-2]) / (2.0 * dtheta))


def finite_volume_update(r, a1, a2, dt, dtheta):
    """One step of the upwind finite-volume scheme on the conservative
    form.  The interface coefficient is the average of adjacent A1
    values; the boundary interfaces use the (zero) pole values of A1.
    """
    coef = dt / dtheta
    a_half = 0.5 * (a1[:-1] + a1[1:])                  # interface i+1/2
    flux = a_half * np.where(a_half >= 0.0, r[:-1], r[1:])
    rn = np.empty_like(r)
    rn[1:-1] = r[1:-1] - coef * (flux[1:] - flux[:-1]) + dt * _fv_source(r, a1, a2, dtheta)
    rn[0] = r[0] + dt * a2[0]
    rn[-1] = r[-1] + dt * a2[-1]
    return rn


def lax_friedrichs_update(r, a1, a2, dt, dtheta):
    """Lax-Friedrichs flux on the conservative form, same source and
    pole treatment as the finite-volume scheme."""
    coef = dt / dtheta
    lam = dtheta / (2.0 * dt)
    flux = 0.5 * (r[1:] * a1[1:] + r[:-1] * a1[:-1]) - lam * (r[1:] - r[:-1])
    rn = np.empty_like(r)
    rn[1:-1] = r[1:-1] - coef * (flux[1:] - flux[:-1]) + dt * _fv_source(r, a1, a2, dtheta)
    rn[0] = r[0] + dt * a2[0]
    rn[-1] = r[-1] + dt * a2[-1]
    return rn


SCHEME_UPDATES = {
    "upwind": upwind_fd_update,
    "fv": finite_volume_update,
    "lf": lax_friedrichs_update,
}


def center_rate(law: CenterLaw, profile: RadiusProfile) -> float:
    """Vertical center velocity prescribed by the law for the current
    profile."""
    if law.variant == "flow":
        return center_velocity(profile)
    if law.variant == "scaled":
        return law.lam * V_STAR_3
    return V_STAR_3  # exact: c tracks c*


def make_initial_state(config: RunConfig) -> SimState:
    grid = config.grid()
    profile = sample_shape(config.shape, grid)
    cdot3 = center_rate(config.center_law, profile)
    fld = operator_field(profile, cdot3)
    return SimState(r=profile, center=CenterState(c3=0.0, t=0.0), step=0, field=fld)


def step_state(state: SimState, config: RunConfig) -> SimState:
    """Advance one time step.  Raises CflViolationError when the CFL
    bound fails (unless overridden) and DegenerateProfileError when
    the input profile already has min r <= 0."""
    state.r.require_positive()
    grid = config.grid()
    fld = state.field
    if fld is None:
        fld = operator_field(state.r, center_rate(config.center_law, state.r))

    report = cfl_check(fld, grid.dt, grid.dtheta)
    if not report.ok and not config.allow_cfl_violation:
        raise CflViolationError(report.courant, report.max_a1)

    update = SCHEME_UPDATES[config.scheme]
    rn = update(state.r.values, fld.a1, fld.a2, grid.dt, grid.dtheta)
    new_profile = state.r.with_values(rn)

    n = state.step + 1
    t = n * grid.dt
    if config.center_law.variant == "exact":
        c3 = V_STAR_3 * t  # pinned, no Euler drift
    else:
        c3 = state.center.c3 + grid.dt * fld.cdot3
    center = CenterState(c3=c3, t=t)

    new_field = None
    if not new_profile.degenerate:
        cdot3 = center_rate(config.center_law, new_profile)
        new_field = operator_field(new_profile, cdot3)
    return SimState(r=new_profile, center=center, step=n, field=new_field)


@dataclass
class RunResult:
    """Time series produced by :func:`run`."""

    config: RunConfig
    rows: list = field(default_factory=list)            # DiagnosticsRow
    snapshots: list = field(default_factory=list)       # (t, radius array, c3)
    termination: str = "completed"
    final_state: SimState | None = None
    negative_radius_time: float | None = None

    def row_at(self, t: float):
        """Diagnostics row closest in time to t (within half a step)."""
        best = min(self.rows, key=lambda row: abs(row.t - t))
        if abs(best.t - t) > 0.5 * self.config.dt + 1e-12:
            raise KeyError(f"no diagnostics row near t={t}")
        return best


def run(config: RunConfig, snapshot_times=None) -> RunResult:
    """Integrate to T, recording diagnostics every ``output_every``
    steps (plus the final state) and profile snapshots at the
    requested times.

    Stops early with termination 'negative-radius' on min r <= 0 (the
    offending state is recorded, error/volume diagnostics are dropped
    from that row) or 'cfl-violation'.
    """
    from .diagnostics import compute_row  # avoid import cycle

    grid = config.grid()
    snap_times = sorted(snapshot_times) if snapshot_times else []
    result = RunResult(config=config)
    state = make_initial_state(config)

    def record(st: SimState):
        result.rows.append(compute_row(st))
        while snap_times and st.center.t >= snap_times[0] - 0.5 * grid.dt:
            snap_times.pop(0)
            result.snapshots.append((st.center.t, st.r.values.copy(), st.center.c3))

    record(state)
    while state.step < grid.N:
        try:
            state = step_state(state, config)
        except CflViolationError:
            result.termination = "cfl-violation"
            break
        last = state.step == grid.N
        if state.r.degenerate:
            result.termination = "negative-radius"
            result.negative_radius_time = state.center.t
            record(state)
            break
        if state.step % config.output_every == 0 or last:
            record(state)
    result.final_state = state
    return result
