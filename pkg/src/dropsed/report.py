"""File output for a simulation run: delimited data, gnuplot script
and rendered matplotlib figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import RadiusProfile
from .diagnostics import rows_to_csv, section_curve
from .schemes import RunResult


def _fmt_time(t: float) -> str:
    return f"{t:07.2f}"


def write_profile_csv(path: Path, theta: np.ndarray, values: np.ndarray):
    lines = ["theta,r"]
    lines.extend(f"{th:.12g},{rv:.12g}" for th, rv in zip(theta, values))
    path.write_text("\n".join(lines) + "\n")


def write_section_csv(path: Path, points: np.ndarray):
    lines = ["x,z"]
    lines.extend(f"{x:.12g},{z:.12g}" for x, z in points)
    path.write_text("\n".join(lines) + "\n")


def gnuplot_script(section_files: list[str], png_name: str) -> str:
    """Script plotting every meridian section into one PNG."""
    plots = ", \\\n  ".join(
        f"'{name}' using 1:2 with lines title '{name.split('_t')[-1].removesuffix('.csv')}'"
        for name in section_files
    )
    return (
        "set terminal pngcairo size 800,1000\n"
        f"set output '{png_name}'\n"
        "set datafile separator ','\n"
        "set size ratio -1\n"
        "set xlabel 'x'\n"
        "set ylabel 'z'\n"
        f"plot \\\n  {plots}\n"
    )


def render_sections_figure(path: Path, sections: list[tuple[float, np.ndarray]]):
    """Figure-1 analogue: meridian curves at the snapshot times."""
    fig, ax = plt.subplots(figsize=(5, 8))
    for t, pts in sections:
        closed = np.vstack([pts, pts[:1]])
        ax.plot(closed[:, 0], closed[:, 1], lw=1.0, label=f"t={t:g}")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("z")
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_diagnostics_figure(path: Path, rows):
    """Figure-2 analogue: max error and volume drift over time."""
    fig, axes = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    e1 = [(row.t, row.e1) for row in rows if row.e1 is not None]
    vr = [(row.t, row.vol_rel) for row in rows if row.vol_rel is not None]
    if e1:
        axes[0].plot(*zip(*e1), lw=1.2)
    axes[0].set_ylabel("max error vs exact sphere")
    if vr:
        axes[1].plot(*zip(*vr), lw=1.2)
    axes[1].set_ylabel("relative volume error")
    axes[1].set_xlabel("t")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_run_outputs(result: RunResult, out_dir: Path) -> list[str]:
    """Write all artifacts of one run; returns the file names written
    (relative to out_dir), in a deterministic order."""
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = result.config.grid()
    theta = grid.theta
    written = []

    diag = out_dir / "diagnostics.csv"
    diag.write_text(rows_to_csv(result.rows))
    written.append(diag.name)

    sections = []
    section_files = []
    for t, values, c3 in result.snapshots:
        tag = _fmt_time(t)
        ppath = out_dir / f"profile_t{tag}.csv"
        write_profile_csv(ppath, theta, values)
        written.append(ppath.name)

        profile = RadiusProfile(values=values, grid=grid)
        pts = section_curve(profile, c3)
        spath = out_dir / f"section_t{tag}.csv"
        write_section_csv(spath, pts)
        written.append(spath.name)
        sections.append((t, pts))
        section_files.append(spath.name)

    if section_files:
        gp = out_dir / "fig_sections.gp"
        gp.write_text(gnuplot_script(section_files, "fig_sections_gnuplot.png"))
        written.append(gp.name)
        png = out_dir / "fig_sections.png"
        render_sections_figure(png, sections)
        written.append(png.name)

    dpng = out_dir / "fig_diagnostics.png"
    render_diagnostics_figure(dpng, result.rows)
    written.append(dpng.name)
    return written
