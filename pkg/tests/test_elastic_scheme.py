"""Linear elastic scheme: tridiagonal solver, assembly, stepping, energy."""
import numpy as np
import pytest

from pmetraj.grid import StaggeredGrid, inner_node
from pmetraj.elastic_scheme import (
    ElasticPlan,
    assemble_elastic,
    elastic_energy,
    elastic_mass_coefficient,
    elastic_step,
    solve_tridiagonal,
)
from pmetraj.oracles import initial_data
from pmetraj.state import InitialDensity, SchemeConfig, TrajectoryState


def _dense(lower, diag, upper):
    n = len(diag)
    A = np.zeros((n, n))
    for i in range(n):
        A[i, i] = diag[i]
        if i > 0:
            A[i, i - 1] = lower[i - 1]
        if i < n - 1:
            A[i, i + 1] = upper[i]
    return A


class TestTridiagonalSolver:
    def test_identity(self):
        rhs = np.array([3.0, -1.0, 2.0])
        out = solve_tridiagonal(np.zeros(2), np.ones(3), np.zeros(2), rhs)
        np.testing.assert_array_equal(out, rhs)

    def test_single_equation(self):
        assert solve_tridiagonal([], [4.0], [], [2.0])[0] == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [2, 5, 17, 50])
    def test_matches_dense_oracle(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            lower = rng.uniform(-1.0, 1.0, n - 1)
            upper = rng.uniform(-1.0, 1.0, n - 1)
            diag = 3.0 + rng.uniform(0.0, 1.0, n)  # diagonally dominant
            rhs = rng.uniform(-2.0, 2.0, n)
            got = solve_tridiagonal(lower, diag, upper, rhs)
            expected = np.linalg.solve(_dense(lower, diag, upper), rhs)
            scale = np.max(np.abs(expected)) or 1.0
            assert np.max(np.abs(got - expected)) <= 1e-12 * scale

    def test_zero_pivot_raises(self):
        with pytest.raises(ZeroDivisionError):
            solve_tridiagonal([1.0], [0.0, 1.0], [1.0], [1.0, 1.0])


class TestAssembly:
    def test_constant_coefficient_stencil(self):
        M = 8
        grid = StaggeredGrid.over(0.0, 1.0, M)
        f0 = InitialDensity.from_nodes(np.ones(M + 1))
        cfg = SchemeConfig(m=2.0, tau=0.01, case=2)
        state = TrajectoryState(x=grid.nodes())
        lo, di, up, rhs = assemble_elastic(state, f0, grid, cfg)
        expected_diag = 1.0 / (cfg.m * cfg.tau) + 2.0 / grid.h ** 2
        np.testing.assert_allclose(di, np.full(M - 1, expected_diag), rtol=1e-12)
        np.testing.assert_allclose(lo, np.full(M - 2, -1.0 / grid.h ** 2), rtol=1e-12)
        np.testing.assert_allclose(up, np.full(M - 2, -1.0 / grid.h ** 2), rtol=1e-12)

    def test_mass_coefficient_formula(self):
        # doubled stretch, unit density, m=3: stretch^(m+1) / (m f0^m) = 16/3
        grid = StaggeredGrid.over(0.0, 1.0, 4)
        f0 = InitialDensity.from_nodes(np.ones(5))
        coeff = elastic_mass_coefficient(2.0 * grid.nodes(), f0, grid, 3.0)
        np.testing.assert_allclose(coeff, np.full(5, 16.0 / 3.0), rtol=1e-12)

    def test_m_matrix_signs_along_run(self):
        grid, f0 = initial_data("smooth", 32)
        cfg = SchemeConfig(m=2.0, tau=1e-2, case=2)
        state = TrajectoryState(x=grid.nodes())
        for _ in range(10):
            lo, di, up, _ = assemble_elastic(state, f0, grid, cfg)
            assert np.all(di > 0.0)
            assert np.all(lo <= 0.0) and np.all(up <= 0.0)
            state = elastic_step(state, f0, grid, cfg)

    def test_zero_interior_density_rejected(self):
        grid = StaggeredGrid.over(0.0, 1.0, 4)
        node = np.array([1.0, 1.0, 0.0, 1.0, 1.0])
        f0 = InitialDensity.from_nodes(node)
        cfg = SchemeConfig(m=2.0, tau=0.01, case=2)
        with pytest.raises(ValueError):
            assemble_elastic(TrajectoryState(x=grid.nodes()), f0, grid, cfg)


class TestStep:
    def test_uniform_density_fixed_point(self):
        M = 30
        grid = StaggeredGrid.over(0.0, 1.0, M)
        f0 = InitialDensity.from_nodes(np.full(M + 1, 0.7))
        cfg = SchemeConfig(m=5 / 3, tau=1e-2, case=2)
        state = elastic_step(TrajectoryState(x=grid.nodes()), f0, grid, cfg)
        assert np.max(np.abs(state.x - grid.nodes())) <= 1e-13

    def test_symmetric_density_gives_antisymmetric_update(self):
        M = 64
        grid = StaggeredGrid.over(0.0, 1.0, M)
        X = grid.nodes()
        f0 = InitialDensity.from_nodes(1.0 + np.exp(-40.0 * (X - 0.5) ** 2))
        cfg = SchemeConfig(m=2.0, tau=1e-3, case=2)
        state = elastic_step(TrajectoryState(x=X), f0, grid, cfg)
        mirrored = (X[0] + X[-1]) - state.x[::-1]
        assert np.max(np.abs(state.x - mirrored)) <= 1e-12

    def test_steps_stay_admissible(self):
        grid, f0 = initial_data("smooth", 48)
        cfg = SchemeConfig(m=3.0, tau=1e-2, case=2)
        state = TrajectoryState(x=grid.nodes())
        for _ in range(20):
            state = elastic_step(state, f0, grid, cfg)
            assert np.all(np.diff(state.x) > 0.0)

    def test_dissipation_inequality_each_step(self):
        grid, f0 = initial_data("smooth", 40)
        cfg = SchemeConfig(m=2.0, tau=5e-3, case=2)
        plan = ElasticPlan(f0, grid, cfg)
        state = TrajectoryState(x=grid.nodes())
        for _ in range(10):
            e_old = elastic_energy(state.x, f0, grid)
            x_old = state.x
            state = plan.step(state)
            e_new = elastic_energy(state.x, f0, grid)
            rate = (state.x - x_old) / cfg.tau
            bound = -cfg.tau * inner_node(plan.last_mass_coeff * rate, rate, grid)
            assert e_new - e_old <= bound + 1e-10 * abs(e_old)


class TestElasticEnergy:
    def test_unit_configuration(self):
        grid = StaggeredGrid.over(0.0, 1.0, 10)
        f0 = InitialDensity.from_nodes(np.ones(11))
        assert elastic_energy(grid.nodes(), f0, grid) == pytest.approx(0.5, rel=1e-12)

    def test_quadratic_scaling(self):
        grid = StaggeredGrid.over(0.0, 1.0, 10)
        f0 = InitialDensity.from_nodes(np.ones(11))
        e1 = elastic_energy(grid.nodes(), f0, grid)
        e2 = elastic_energy(2.0 * grid.nodes(), f0, grid)
        assert e2 == pytest.approx(4.0 * e1, rel=1e-12)

    def test_vanishing_edge_density_rejected(self):
        grid = StaggeredGrid.over(0.0, 1.0, 4)
        f0 = InitialDensity.from_nodes(np.array([0.0, 0.0, 1.0, 1.0, 1.0]))
        with pytest.raises(ZeroDivisionError):
            elastic_energy(grid.nodes(), f0, grid)

    def test_energy_decreases_along_run(self):
        grid, f0 = initial_data("smooth", 40)
        cfg = SchemeConfig(m=5 / 3, tau=1e-2, case=2)
        plan = ElasticPlan(f0, grid, cfg)
        state = TrajectoryState(x=grid.nodes())
        energies = [elastic_energy(state.x, f0, grid)]
        for _ in range(10):
            state = plan.step(state)
            energies.append(elastic_energy(state.x, f0, grid))
        assert all(e1 <= e0 + 1e-12 * abs(e0) for e0, e1 in zip(energies, energies[1:]))
