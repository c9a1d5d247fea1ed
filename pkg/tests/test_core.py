import math

import numpy as np
import pytest

from dropsed.core import (
    CenterLaw,
    CenterState,
    InitialShape,
    RadiusProfile,
    config_from_dict,
    load_config,
    make_grid,
    parse_config_text,
    sample_shape,
)
from dropsed.errors import ConfigError, DegenerateProfileError


def test_make_grid_paper_resolution():
    g = make_grid(100, 200, 0.01, 25)
    assert g.dtheta == pytest.approx(math.pi / 100)
    assert g.N == 2500
    assert g.theta[0] == 0.0
    assert g.theta[-1] == math.pi


def test_make_grid_smallest_legal():
    g = make_grid(4, 4, 1.0, 1.0)
    np.testing.assert_allclose(
        g.theta, [0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]
    )
    assert g.N == 1


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(M=0, L=4, dt=1, T=1),
        dict(M=4, L=3, dt=1, T=1),
        dict(M=4, L=4, dt=-1, T=1),
        dict(M=4, L=4, dt=1, T=0),
        dict(M=10**7, L=4, dt=1, T=1),
    ],
)
def test_make_grid_rejects_bad_inputs(kwargs):
    with pytest.raises(ConfigError):
        make_grid(**kwargs)


def test_grid_symmetry():
    g = make_grid(50, 100, 0.1, 1.0)
    th = g.theta
    np.testing.assert_allclose(th + th[::-1], math.pi, rtol=0, atol=1e-13)


def test_ceil_step_count():
    assert make_grid(4, 4, 0.3, 1.0).N == 4


def test_unit_sphere_profile():
    g = make_grid(10, 10, 0.1, 1.0)
    p = sample_shape(InitialShape("sphere"), g)
    assert p.values.min() == p.values.max() == 1.0


def test_prolate_pole_value():
    g = make_grid(10, 10, 0.1, 1.0)
    p = sample_shape(InitialShape("prolate"), g)
    assert p.values[0] == pytest.approx(2.0)
    assert p.values[-1] == pytest.approx(2.0)


def test_oblate_equator_value():
    g = make_grid(10, 10, 0.1, 1.0)
    p = sample_shape(InitialShape("oblate"), g)
    assert p.values[5] == pytest.approx(2.0)  # theta = pi/2


@pytest.mark.parametrize("variant", ["prolate", "oblate"])
def test_ellipsoids_symmetric_about_equator(variant):
    g = make_grid(20, 20, 0.1, 1.0)
    p = sample_shape(InitialShape(variant), g)
    np.testing.assert_allclose(p.values, p.values[::-1], rtol=1e-14)


def test_custom_shape_rejects_nonpositive():
    with pytest.raises(DegenerateProfileError):
        InitialShape("custom", samples=np.array([1.0, 0.0, 1.0]))


def test_profile_degeneracy_flag():
    g = make_grid(4, 4, 0.1, 1.0)
    p = RadiusProfile(values=np.array([1.0, 1.0, -0.1, 1.0, 1.0]), grid=g)
    assert p.degenerate
    with pytest.raises(DegenerateProfileError):
        p.require_positive()


def test_center_state_gap():
    c = CenterState(c3=-1.0, t=1.5)
    assert c.cstar3 == pytest.approx(-0.4)
    assert c.gap3 == pytest.approx(-0.6)


def test_center_law_parse():
    assert CenterLaw.parse("flow").variant == "flow"
    assert CenterLaw.parse("exact").variant == "exact"
    law = CenterLaw.parse("scaled:8.5")
    assert law.variant == "scaled" and law.lam == 8.5
    with pytest.raises(ConfigError):
        CenterLaw.parse("scaled")
    with pytest.raises(ConfigError):
        CenterLaw.parse("wobble")


def test_parse_config_text():
    raw = parse_config_text("M = 10\n# comment\nL=20  # trailing\n\ndt = 0.5\n")
    assert raw == {"M": "10", "L": "20", "dt": "0.5"}
    with pytest.raises(ConfigError):
        parse_config_text("this is not a key value line")


def test_config_from_dict_roundtrip():
    cfg = config_from_dict(
        {"M": "8", "L": "8", "dt": "0.1", "T": "0.5", "scheme": "fv",
         "center_law": "scaled", "lambda": "8.5", "shape": "prolate"}
    )
    assert cfg.M == 8 and cfg.scheme == "fv"
    assert cfg.center_law.lam == 8.5
    assert cfg.shape.variant == "prolate"


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"bogus": "1"})


def test_load_config_with_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("M = 8\nL = 8\ndt = 0.1\nT = 1\nscheme = upwind\n")
    cfg = load_config(path, {"scheme": "lf", "T": "2"})
    assert cfg.scheme == "lf"
    assert cfg.T == 2.0
