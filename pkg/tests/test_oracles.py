"""Closed-form references and canonical initial data."""
import math

import numpy as np
import pytest

from pmetraj.oracles import (
    barenblatt,
    barenblatt_interface,
    barenblatt_trajectory,
    exact_waiting_time,
    initial_data,
    smooth_profile,
    step_profile,
    waiting_profile,
)


class TestBarenblatt:
    @pytest.mark.parametrize("m", [1.5, 5 / 3, 2.0, 3.0, 5.0])
    def test_unit_peak_at_origin(self, m):
        assert barenblatt(0.0, 0.0, m) == pytest.approx(1.0)

    @pytest.mark.parametrize("m", [5 / 3, 3.0])
    def test_vanishes_outside_support(self, m):
        xi0 = barenblatt_interface(0.0, m)
        assert barenblatt(xi0, 0.0, m) == 0.0
        assert barenblatt(-1.5 * xi0, 0.0, m) == 0.0
        assert barenblatt(xi0 * (1.0 + 1e-12), 0.0, m) == 0.0

    def test_vanishes_exactly_on_interface(self):
        for m in (5 / 3, 2.0, 3.0):
            for t in (0.0, 0.5, 2.0, 10.0):
                assert barenblatt(barenblatt_interface(t, m), t, m) == 0.0

    def test_mass_constant_in_time(self):
        m = 3.0
        masses = []
        for t in (0.0, 1.0, 2.0, 10.0):
            xi = barenblatt_interface(t, m)
            x = np.linspace(-xi, xi, 200001)
            masses.append(np.trapezoid(barenblatt(x, t, m), x))
        for mass in masses[1:]:
            assert mass == pytest.approx(masses[0], rel=1e-6)

    def test_discrete_pme_residual_second_order(self):
        # interior second-order check of d/dt f = (f^m)_xx via central differences
        m = 2.0
        t0 = 1.0
        errs = []
        for h in (2e-3, 1e-3):
            dt = h * h
            x = np.arange(-1.0, 1.0 + h / 2, h)
            ft = (barenblatt(x, t0 + dt, m) - barenblatt(x, t0 - dt, m)) / (2.0 * dt)
            fxx = (barenblatt(x + h, t0, m) ** m - 2.0 * barenblatt(x, t0, m) ** m
                   + barenblatt(x - h, t0, m) ** m) / (h * h)
            errs.append(np.max(np.abs(ft - fxx)[20:-20]))
        assert errs[1] <= errs[0] / 3.0

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            barenblatt(0.0, -1.0, 2.0)


class TestInterface:
    def test_value_m3_t0(self):
        assert barenblatt_interface(0.0, 3.0) == pytest.approx(math.sqrt(12.0))

    def test_value_m3_t15(self):
        assert barenblatt_interface(15.0, 3.0) == pytest.approx(2.0 * math.sqrt(12.0))

    def test_strictly_increasing(self):
        ts = np.linspace(0.0, 20.0, 50)
        vals = [barenblatt_interface(t, 5 / 3) for t in ts]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_trajectory_is_uniform_dilation(self):
        X = np.linspace(-3.0, 3.0, 7)
        np.testing.assert_allclose(barenblatt_trajectory(X, 15.0, 3.0), 2.0 * X)


class TestExactWaitingTime:
    def test_quarter_theta(self):
        assert exact_waiting_time(3.0, 0.25) == pytest.approx(1.0 / 6.0)

    def test_zero_theta(self):
        assert exact_waiting_time(3.0, 0.0) == pytest.approx(1.0 / 8.0)

    def test_monotone_in_theta(self):
        vals = [exact_waiting_time(3.0, th) for th in (0.0, 0.1, 0.2, 0.25)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("theta", [-0.01, 0.26, 0.5])
    def test_theta_range_enforced(self, theta):
        with pytest.raises(ValueError):
            exact_waiting_time(3.0, theta)


class TestProfiles:
    def test_smooth_midpoint(self):
        assert smooth_profile(0.5) == pytest.approx(1.5)

    def test_column_values(self):
        assert step_profile(1.0, 0.5, 3.0, 1.0) == 1.0
        assert step_profile(-1.0, -3.0, -0.5, 1.5) == 1.5
        assert step_profile(0.0, 0.5, 3.0, 1.0) == 0.0
        assert step_profile(0.0, -3.0, -0.5, 1.5) == 0.0

    def test_waiting_profile_zero_at_support_ends(self):
        for m, theta in ((3.0, 0.25), (2.0, 0.0)):
            assert waiting_profile(-math.pi, m, theta) == pytest.approx(0.0, abs=1e-15)
            assert waiting_profile(0.0, m, theta) == pytest.approx(0.0, abs=1e-30)
            assert waiting_profile(1.0, m, theta) == 0.0

    def test_waiting_end_slope_of_power_vanishes(self):
        # the one-sided slope of f0^(m-1) at the left end shrinks like h
        m, theta = 3.0, 0.25
        slopes = []
        for h in (1e-2, 5e-3):
            p0 = waiting_profile(-math.pi, m, theta) ** (m - 1.0)
            p1 = waiting_profile(-math.pi + h, m, theta) ** (m - 1.0)
            slopes.append((p1 - p0) / h)
        assert slopes[1] <= 0.6 * slopes[0]

    def test_initial_data_grids(self):
        grid, f0 = initial_data("smooth", 10)
        assert grid.x0 == 0.0 and grid.x_right == pytest.approx(1.0)
        assert np.all(f0.node > 0.0)

        grid, f0 = initial_data("barenblatt", 10, m=3.0)
        assert grid.x0 == pytest.approx(-math.sqrt(12.0))
        assert f0.node[0] == 0.0 and f0.node[-1] == 0.0

        grid, f0 = initial_data("waiting", 10, m=3.0, theta=0.25)
        assert grid.x0 == pytest.approx(-math.pi)
        assert grid.x_right == pytest.approx(0.0)

        grid, f0 = initial_data("two_column_left", 10)
        assert (grid.x0, grid.x_right) == (-3.0, pytest.approx(-0.5))
        assert np.all(f0.node[1:-1] == 1.5)

    def test_unknown_problem_rejected(self):
        with pytest.raises(ValueError):
            initial_data("unknown", 10)
