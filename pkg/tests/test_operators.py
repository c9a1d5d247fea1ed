import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dropsed import operators as ops
from dropsed.core import InitialShape, RadiusProfile, make_grid, sample_shape
from dropsed.errors import DegenerateProfileError
from dropsed.hr_oracle import closed_form_sphere_velocity

UNIT = lambda theta: np.ones_like(np.asarray(theta, dtype=float))


class TestBeta:
    def test_coincident_points(self):
        assert ops.beta(UNIT, 0.3, 0.3, 0.0) == 0.0

    def test_antipodal_points(self):
        assert ops.beta(UNIT, 0.0, math.pi, 1.0) == pytest.approx(2.0)

    def test_orthogonal_points(self):
        assert ops.beta(UNIT, 0.0, math.pi / 2, 0.0) == pytest.approx(math.sqrt(2.0))

    @given(
        theta=st.floats(0.0, math.pi),
        thetabar=st.floats(0.0, math.pi),
        phibar=st.floats(0.0, 2 * math.pi),
        r1=st.floats(0.2, 5.0),
        r2=st.floats(0.2, 5.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_stabilized_matches_literal_expansion(self, theta, thetabar, phibar, r1, r2):
        def radius(th):
            th = np.asarray(th, dtype=float)
            return np.where(np.isclose(th, theta), r1, r2)

        stab = ops.beta(radius, theta, thetabar, phibar)
        lit = ops.beta_literal(radius, theta, thetabar, phibar)
        assert stab >= 0.0
        # compare the squares: the literal expansion cancels
        # catastrophically for nearby points, with absolute rounding
        # error on the order of eps times the coordinate scale
        assert abs(stab * stab - lit * lit) <= 1e-10


class TestDerivative:
    def test_constant_profile(self, sphere_small):
        assert np.all(ops.derivative(sphere_small) == 0.0)

    def test_cosine_profile_second_order(self):
        g = make_grid(100, 100, 0.1, 1.0)
        p = RadiusProfile(values=2.0 + np.cos(g.theta), grid=g)
        err = np.abs(ops.derivative(p) + np.sin(g.theta))
        assert err.max() <= 1e-3

    def test_linear_profile_exact_interior(self):
        g = make_grid(10, 10, 0.1, 1.0)
        p = RadiusProfile(values=1.0 + 0.03 * np.arange(11), grid=g)
        dr = ops.derivative(p)
        np.testing.assert_allclose(dr, 0.03 / g.dtheta, rtol=1e-12)


class TestSphereIdentities:
    def test_values(self):
        i1, i2, i3, i4 = ops.sphere_identity_integrals(100, 200)
        np.testing.assert_allclose(i1, [0, 0, 4 * math.pi / 3], atol=2e-3)
        assert i2 == pytest.approx(4 * math.pi, rel=1e-3)
        np.testing.assert_allclose(i3, [16 * math.pi / 15, 0, 0], atol=2e-3)
        np.testing.assert_allclose(i4, [0, 0, 28 * math.pi / 15], atol=3e-3)

    @pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2, 2.5, math.pi])
    def test_rotation_invariance(self, theta):
        val = ops.rotated_sphere_integral(theta, 100, 200)
        assert val == pytest.approx(4 * math.pi, rel=ops.quadrature_tolerance(100, 200))


class TestSurfaceVelocity:
    def test_north_pole_value(self, sphere_small):
        u = ops.velocity_surface(sphere_small, 0.0)
        np.testing.assert_allclose(u, [0, 0, -4 / 15], atol=1e-4)

    def test_equator_value(self, sphere_small):
        u = ops.velocity_surface(sphere_small, math.pi / 2)
        np.testing.assert_allclose(u, [0, 0, -1 / 5], atol=1e-4)

    def test_axisymmetry_second_component(self, sphere_small):
        u = ops.velocity_field(sphere_small)
        assert np.abs(u[:, 1]).max() <= 1e-12

    def test_matches_closed_form_on_sphere(self, sphere_paper):
        u = ops.velocity_field(sphere_paper)
        ref = closed_form_sphere_velocity(sphere_paper.grid.theta)
        assert np.abs(u - ref).max() <= 1e-5

    def test_degenerate_profile_rejected(self, grid_small):
        vals = np.ones(grid_small.M + 1)
        vals[3] = -0.5
        bad = RadiusProfile(values=vals, grid=grid_small)
        with pytest.raises(DegenerateProfileError):
            ops.velocity_field(bad)

    def test_parallel_assembly_bit_identical(self, sphere_small):
        seq = ops.velocity_field(sphere_small)
        ops.set_workers(4)
        try:
            par = ops.velocity_field(sphere_small)
        finally:
            ops.set_workers(1)
        assert np.array_equal(seq, par)


class TestVolumeVelocity:
    def test_oseen_tensor_unit_vector(self):
        phi = ops.oseen_tensor(np.array([0.0, 0.0, 1.0]))
        np.testing.assert_allclose(
            phi @ np.array([0, 0, 1.0]), [0, 0, 1 / (4 * math.pi)], rtol=1e-14
        )

    @pytest.mark.parametrize(
        "theta,expected",
        [(0.0, [0, 0, -4 / 15]), (math.pi / 2, [0, 0, -1 / 5])],
    )
    def test_sphere_values(self, sphere_small, theta, expected):
        u = ops.velocity_volume(sphere_small, theta)
        np.testing.assert_allclose(u, expected, atol=2e-3)

    def test_cross_validates_surface_quadrature(self, sphere_small):
        tol = ops.quadrature_tolerance(sphere_small.grid.M, sphere_small.grid.L)
        for theta in np.linspace(0, math.pi, 7):
            us = ops.velocity_surface(sphere_small, theta)
            uv = ops.velocity_volume(sphere_small, theta)
            assert np.abs(us - uv).max() <= 3 * tol


class TestProjections:
    def test_a1_vanishes_at_poles(self, sphere_small):
        fld = ops.operator_field(sphere_small, -1 / 3)
        assert fld.a1[0] == 0.0
        assert fld.a1[-1] == 0.0
        assert ops.a1(sphere_small, -1 / 3, 0.0) == 0.0
        assert ops.a1(sphere_small, -1 / 3, math.pi) == 0.0

    def test_a1_equator_hr_center(self, sphere_paper):
        # (U - v*).dtheta_e at pi/2 equals -(u3 + 4/15)
        val = ops.a1(sphere_paper, -4 / 15, math.pi / 2)
        assert val == pytest.approx(-1 / 15, abs=1e-4)

    def test_a2_zero_for_hr_center(self, sphere_paper):
        fld = ops.operator_field(sphere_paper, -4 / 15)
        assert np.abs(fld.a2).max() <= 1e-5

    def test_a2_poles_transported_center(self, sphere_paper):
        assert ops.a2(sphere_paper, -1 / 3, 0.0) == pytest.approx(1 / 15, abs=1e-4)
        assert ops.a2(sphere_paper, -1 / 3, math.pi) == pytest.approx(-1 / 15, abs=1e-4)

    def test_equatorial_reflection_symmetry(self, grid_small):
        p = sample_shape(InitialShape("prolate"), grid_small)
        fld = ops.operator_field(p, 0.0)
        # vertical flow on a reflection-symmetric body: u1 odd and u3
        # even about the equator, making A1 = u1 cos - (u3 - cdot) sin
        # even as well
        u = fld.u
        np.testing.assert_allclose(u[:, 0], -u[::-1, 0], atol=1e-10)
        np.testing.assert_allclose(u[:, 2], u[::-1, 2], atol=1e-10)
        np.testing.assert_allclose(fld.a1, fld.a1[::-1], atol=1e-10)


class TestCenterVelocity:
    def test_unit_sphere(self, sphere_paper):
        assert ops.center_velocity(sphere_paper) == pytest.approx(-1 / 3, abs=1e-6)

    def test_zero_profile(self, grid_small):
        p = RadiusProfile(values=np.zeros(grid_small.M + 1), grid=grid_small)
        assert ops.center_velocity(p) == 0.0

    def test_quadratic_scaling(self, grid_paper):
        p = RadiusProfile(values=np.full(grid_paper.M + 1, 2.0), grid=grid_paper)
        assert ops.center_velocity(p) == pytest.approx(-4 / 3, abs=4e-6)

    def test_negative_for_positive_profile(self, rng, grid_small):
        vals = 0.5 + rng.random(grid_small.M + 1)
        p = RadiusProfile(values=vals, grid=grid_small)
        assert ops.center_velocity(p) < 0.0


class TestFluxBalance:
    def test_sphere(self, sphere_paper):
        cdot = ops.center_velocity(sphere_paper)
        assert abs(ops.flux_balance(sphere_paper, cdot)) <= 1e-2

    def test_prolate(self, grid_paper):
        p = sample_shape(InitialShape("prolate"), grid_paper)
        cdot = ops.center_velocity(p)
        assert abs(ops.flux_balance(p, cdot)) <= 1e-2
