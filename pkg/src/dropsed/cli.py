"""Command-line front end: run | tables | selfcheck."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import operators as ops
from .core import (
    CenterLaw,
    RunConfig,
    config_from_dict,
    load_config,
    make_grid,
    sample_shape,
    InitialShape,
)
from .errors import ConfigError
from .hr_oracle import hadamard_tangency_residual, v_star
from .report import write_run_outputs
from .schemes import run as run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NEGATIVE_RADIUS = 3
EXIT_CFL = 5

DEFAULT_SNAPSHOT_TIMES = [float(t) for t in range(0, 25, 3)]
LONG_TABLE_TIMES = [2.5 * k for k in range(11)]
SHORT_TABLE_TIMES = [0.0, 0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.49, 0.5, 0.51]


def _add_override_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key-value config file")
    p.add_argument("--M", type=int, help="colatitude node count")
    p.add_argument("--L", type=int, help="azimuth quadrature count")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--scheme", choices=("upwind", "fv", "lf"))
    p.add_argument(
        "--center-law", dest="center_law",
        help="flow | scaled:<lambda> | exact",
    )
    p.add_argument("--shape", choices=("sphere", "prolate", "oblate"))
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--output-every", dest="output_every", type=int)
    p.add_argument("--parallel", type=int, default=1, metavar="N",
                   help="threads for operator field assembly")
    p.add_argument("--allow-cfl-violation", action="store_true", default=None)


def _config_from_args(args) -> RunConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in ("M", "L", "dt", "T", "scheme", "center_law",
                    "shape", "output_dir", "output_every")
    }
    overrides = {k: str(v) for k, v in overrides.items() if v is not None}
    if args.allow_cfl_violation:
        overrides["allow_cfl_violation"] = "true"
    if args.config is not None:
        return load_config(args.config, overrides)
    return config_from_dict(overrides) if overrides else RunConfig()


def _termination_exit(termination: str) -> int:
    return {
        "completed": EXIT_OK,
        "negative-radius": EXIT_NEGATIVE_RADIUS,
        "cfl-violation": EXIT_CFL,
    }[termination]


def cmd_run(args) -> int:
    config = _config_from_args(args)
    ops.set_workers(args.parallel)
    snapshot_times = [t for t in DEFAULT_SNAPSHOT_TIMES if t <= config.T + 1e-9]
    started = time.time()
    result = run_simulation(config, snapshot_times=snapshot_times)
    finished = time.time()

    out_dir = Path(config.output_dir)
    files = write_run_outputs(result, out_dir)
    manifest = {
        "config": {
            "M": config.M, "L": config.L, "dt": config.dt, "T": config.T,
            "scheme": config.scheme,
            "center_law": config.center_law.variant,
            "lambda": config.center_law.lam,
            "shape": config.shape.variant,
            "output_every": config.output_every,
            "output_dir": config.output_dir,
        },
        "scheme": config.scheme,
        "started": started,
        "finished": finished,
        "outputs": files,
        "termination": result.termination,
        "negative_radius_time": result.negative_radius_time,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"termination: {result.termination}")
    print(f"outputs written to {out_dir}/ ({len(files) + 1} files)")
    return _termination_exit(result.termination)


def cmd_tables(args) -> int:
    config = _config_from_args(args)
    ops.set_workers(args.parallel)
    config.output_every = 1  # need every step to hit the sample times
    result = run_simulation(config)

    times = SHORT_TABLE_TIMES if config.T <= 1.0 else LONG_TABLE_TIMES
    times = [t for t in times if t <= config.T + 1e-9]

    def fmt(x):
        return "" if x is None else f"{x:.12g}"

    print("t,gap_abs,e1,e2,min_r,vol_rel")
    for t in times:
        try:
            row = result.row_at(t)
        except KeyError:
            continue
        print(",".join([
            fmt(row.t), fmt(row.gap_abs), fmt(row.e1), fmt(row.e2),
            fmt(row.min_r), fmt(row.vol_rel),
        ]))
    return _termination_exit(result.termination)


def cmd_selfcheck(args) -> int:
    M = args.M or 100
    L = args.L or 200
    tol = ops.quadrature_tolerance(M, L)
    failures = 0

    def check(name, value, ref, limit):
        nonlocal failures
        err = abs(value - ref) / max(abs(ref), 1.0)
        ok = err <= limit
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'}  {name}: computed={value:.8g} "
              f"reference={ref:.8g} rel_err={err:.3g} tol={limit:.3g}")

    i1, i2, i3, i4 = ops.sphere_identity_integrals(M, L)
    check("sphere integral I1_z", i1[2], 4 * math.pi / 3, tol)
    check("sphere integral I2", i2, 4 * math.pi, tol)
    check("sphere integral I3_x", i3[0], 16 * math.pi / 15, tol)
    check("sphere integral I4_z", i4[2], 28 * math.pi / 15, tol)

    grid = make_grid(M, L, 0.01, 1.0)
    profile = sample_shape(InitialShape("sphere"), grid)
    u = ops.velocity_field(profile)
    check("Hadamard tangency residual (r=1)",
          hadamard_tangency_residual(grid.theta, u), 0.0, tol)

    scale = abs(v_star()[2])
    sample = grid.theta[:: max(1, M // 8)]
    disc = max(
        np.abs(ops.velocity_surface(profile, t) - ops.velocity_volume(profile, t)).max()
        for t in sample
    )
    check("surface vs volume velocity max discrepancy",
          disc / scale, 0.0, 3 * tol)

    check("center velocity (r=1)", ops.center_velocity(profile), -1.0 / 3.0, 1e-6)
    print("selfcheck:", "ok" if failures == 0 else f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dropsed",
        description="Axisymmetric droplet sedimentation in Stokes flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured simulation")
    _add_override_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_tab = sub.add_parser("tables", help="emit diagnostics at the reference sample times")
    _add_override_flags(p_tab)
    p_tab.set_defaults(func=cmd_tables)

    p_chk = sub.add_parser("selfcheck", help="quadrature and oracle self-checks")
    p_chk.add_argument("--M", type=int, default=100)
    p_chk.add_argument("--L", type=int, default=200)
    p_chk.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
