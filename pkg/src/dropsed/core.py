"""Domain types, grids, initial shapes and run configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DegenerateProfileError

MAX_NODE_COUNT = 10**6

#: Hadamard-Rybczynski terminal fall speed (vertical component).
V_STAR_3 = -4.0 / 15.0


@dataclass(frozen=True)
class GridSpec:
    """Discretization parameters of a simulation run.

    Colatitude nodes are theta_i = i*pi/M for i = 0..M (poles included),
    azimuth quadrature uses L cells of width 2*pi/L.
    """

    M: int
    L: int
    dt: float
    T: float

    def __post_init__(self):
        if not (4 <= self.M <= MAX_NODE_COUNT):
            raise ConfigError(f"M must be in [4, {MAX_NODE_COUNT}], got {self.M}")
        if not (4 <= self.L <= MAX_NODE_COUNT):
            raise ConfigError(f"L must be in [4, {MAX_NODE_COUNT}], got {self.L}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"T must be positive, got {self.T}")

    @property
    def dtheta(self) -> float:
        return math.pi / self.M

    @property
    def dphi(self) -> float:
        return 2.0 * math.pi / self.L

    @property
    def N(self) -> int:
        """Number of time steps, ceil(T/dt)."""
        return math.ceil(self.T / self.dt)

    @property
    def theta(self) -> np.ndarray:
        """Node positions, theta_0 = 0 and theta_M = pi exactly."""
        th = np.arange(self.M + 1) * (math.pi / self.M)
        th[-1] = math.pi
        return th


def make_grid(M: int, L: int, dt: float, T: float) -> GridSpec:
    """Build a GridSpec, validating all parameters."""
    return GridSpec(M=int(M), L=int(L), dt=float(dt), T=float(T))


@dataclass(frozen=True)
class RadiusProfile:
    """Sampled radius r(theta_i) on the node grid of ``grid``."""

    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.M + 1,):
            raise ConfigError(
                f"profile needs {self.grid.M + 1} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigError("profile contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def degenerate(self) -> bool:
        """True when min r <= 0: the spherical parametrization broke down."""
        return self.min <= 0.0

    def require_positive(self):
        if self.degenerate:
            raise DegenerateProfileError(f"min r = {self.min:.4g} <= 0")

    def with_values(self, values: np.ndarray) -> "RadiusProfile":
        return RadiusProfile(values=values, grid=self.grid)


@dataclass(frozen=True)
class CenterState:
    """Vertical reference-center position and its HR counterpart."""

    c3: float
    t: float

    @property
    def cstar3(self) -> float:
        """Hadamard-Rybczynski center height v**t."""
        return V_STAR_3 * self.t

    @property
    def gap3(self) -> float:
        """Signed center gap (c - c*)_3."""
        return self.c3 - self.cstar3


@dataclass(frozen=True)
class CenterLaw:
    """Velocity law of the reference center.

    variant is one of:
      - "flow": transported along the flow, cdot3 = cdot3[r]
      - "scaled": cdot3 = lam * v*_3
      - "exact": c is pinned to c* = v* t
    """

    variant: str
    lam: float = 1.0

    VARIANTS = ("flow", "scaled", "exact")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ConfigError(f"unknown center law {self.variant!r}")
        if not math.isfinite(self.lam):
            raise ConfigError("lambda must be finite")

    @classmethod
    def parse(cls, text: str) -> "CenterLaw":
        """Parse 'flow', 'exact' or 'scaled:<lambda>'."""
        text = text.strip()
        if text in ("flow", "exact"):
            return cls(variant=text)
        if text.startswith("scaled:"):
            try:
                lam = float(text.split(":", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad lambda in {text!r}") from exc
            return cls(variant="scaled", lam=lam)
        if text == "scaled":
            raise ConfigError("center law 'scaled' requires a lambda, use scaled:<value>")
        raise ConfigError(f"unknown center law {text!r}")


@dataclass(frozen=True)
class InitialShape:
    """Initial radius function r0(theta).

    variant is one of "sphere", "prolate", "oblate", "custom"; custom
    shapes carry their sampled values.
    """

    variant: str
    samples: np.ndarray | None = None

    VARIANTS = ("sphere", "prolate", "oblate", "custom")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ConfigError(f"unknown shape {self.variant!r}")
        if self.variant == "custom":
            if self.samples is None:
                raise ConfigError("custom shape requires samples")
            samples = np.asarray(self.samples, dtype=float)
            if samples.min() <= 0:
                raise DegenerateProfileError("custom shape has non-positive radius")
            object.__setattr__(self, "samples", samples)

    def radius(self, theta: np.ndarray) -> np.ndarray:
        """Evaluate r0 on an array of colatitudes (non-custom variants)."""
        theta = np.asarray(theta, dtype=float)
        if self.variant == "sphere":
            return np.ones_like(theta)
        if self.variant == "prolate":
            return 1.0 / np.sqrt(1.0 - 0.75 * np.cos(theta) ** 2)
        if self.variant == "oblate":
            return 1.0 / np.sqrt(1.0 - 0.75 * np.sin(theta) ** 2)
        raise ConfigError("custom shapes are sampled, not evaluated")


def sample_shape(shape: InitialShape, grid: GridSpec) -> RadiusProfile:
    """Sample an initial shape on the node grid."""
    if shape.variant == "custom":
        if shape.samples.shape != (grid.M + 1,):
            raise ConfigError(
                f"custom shape has {shape.samples.shape[0]} samples, "
                f"grid needs {grid.M + 1}"
            )
        return RadiusProfile(values=shape.samples.copy(), grid=grid)
    return RadiusProfile(values=shape.radius(grid.theta), grid=grid)


_SCHEMES = ("upwind", "fv", "lf")


@dataclass
class RunConfig:
    """Full configuration of one simulation run."""

    M: int = 100
    L: int = 200
    dt: float = 0.01
    T: float = 25.0
    scheme: str = "upwind"
    center_law: CenterLaw = field(default_factory=lambda: CenterLaw("flow"))
    shape: InitialShape = field(default_factory=lambda: InitialShape("sphere"))
    output_every: int = 1
    output_dir: str = "out"
    allow_cfl_violation: bool = False

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}, expected one of {_SCHEMES}")
        if self.output_every < 1:
            raise ConfigError("output_every must be >= 1")

    def grid(self) -> GridSpec:
        return make_grid(self.M, self.L, self.dt, self.T)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        out[key] = value
    return out


_SHAPE_ALIASES = {
    "sphere": "sphere",
    "unit_sphere": "sphere",
    "prolate": "prolate",
    "oblate": "oblate",
}


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Read a key-value config file, then apply CLI overrides on top."""
    path = Path(path)
    try:
        raw = parse_config_text(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    """Build a RunConfig from string-valued keys."""
    known = {
        "M", "L", "dt", "T", "scheme", "center_law", "lambda", "shape",
        "output_every", "output_dir", "allow_cfl_violation",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def _get(key, cast, default):
        if key not in raw:
            return default
        try:
            return cast(raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw[key]!r}") from exc

    law_text = str(raw.get("center_law", "flow")).strip()
    # a separate lambda key may accompany center_law = scaled
    if "lambda" in raw and not law_text.startswith("scaled:"):
        if law_text != "scaled":
            raise ConfigError("lambda is only meaningful with center_law = scaled")
        law_text = f"scaled:{raw['lambda']}"
    law = CenterLaw.parse(law_text)

    shape_text = str(raw.get("shape", "sphere")).strip().lower()
    if shape_text not in _SHAPE_ALIASES:
        raise ConfigError(f"unknown shape {shape_text!r}")
    shape = InitialShape(_SHAPE_ALIASES[shape_text])

    cfg = RunConfig(
        M=_get("M", int, 100),
        L=_get("L", int, 200),
        dt=_get("dt", float, 0.01),
        T=_get("T", float, 25.0),
        scheme=str(raw.get("scheme", "upwind")).strip(),
        center_law=law,
        shape=shape,
        output_every=_get("output_every", int, 1),
        output_dir=str(raw.get("output_dir", "out")),
        allow_cfl_violation=_get(
            "allow_cfl_violation",
            lambda v: str(v).strip().lower() in ("1", "true", "yes"),
            False,
        ),
    )
    cfg.grid()  # validate M, L, dt, T eagerly
    return cfg
