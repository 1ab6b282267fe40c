"""Difference calculus, inner products, and norms on the staggered grid."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmetraj.grid import (
    StaggeredGrid,
    boundary_one_sided_diff,
    density_error_weights,
    diff_edge_to_node,
    diff_node_to_edge,
    inner_edge,
    inner_node,
    node_derivative,
    norm_l2,
    norm_l2_weighted,
    norm_linf,
    trajectory_error_weights,
)


class TestGridConstruction:
    def test_counts(self):
        g = StaggeredGrid(0.0, 0.25, 4)
        assert g.num_nodes == 5
        assert g.num_edges == 4
        np.testing.assert_allclose(g.nodes(), [0, 0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(g.edges(), [0.125, 0.375, 0.625, 0.875])

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            StaggeredGrid(0.0, -1.0, 4)
        with pytest.raises(ValueError):
            StaggeredGrid(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            StaggeredGrid.over(1.0, 0.0, 4)

    def test_over_spans_interval(self):
        g = StaggeredGrid.over(-2.0, 3.0, 10)
        assert g.h == pytest.approx(0.5)
        assert g.x_right == pytest.approx(3.0)


class TestForwardDifference:
    def test_direct_stencil(self):
        g = StaggeredGrid(0.0, 1.0, 2)
        np.testing.assert_allclose(diff_node_to_edge([0.0, 1.0, 4.0], g), [1.0, 3.0])

    def test_constant_field_vanishes(self):
        g = StaggeredGrid(0.0, 0.1, 7)
        assert np.all(diff_node_to_edge(np.full(8, 3.3), g) == 0.0)

    def test_identity_gives_ones(self):
        g = StaggeredGrid.over(0.0, 1.0, 16)
        np.testing.assert_allclose(diff_node_to_edge(g.nodes(), g), np.ones(16))

    def test_length_mismatch(self):
        g = StaggeredGrid(0.0, 1.0, 2)
        with pytest.raises(ValueError):
            diff_node_to_edge([0.0, 1.0], g)


class TestEdgeDivergence:
    def test_direct_stencil(self):
        g = StaggeredGrid(0.0, 1.0, 2)
        np.testing.assert_allclose(diff_edge_to_node([2.0, 5.0], g), [0.0, 3.0, 0.0])

    def test_constant_field_vanishes(self):
        g = StaggeredGrid(0.0, 0.5, 6)
        out = diff_edge_to_node(np.full(6, 2.0), g)
        assert np.all(out == 0.0)

    def test_endpoints_zero_by_convention(self):
        g = StaggeredGrid(0.0, 0.5, 4)
        out = diff_edge_to_node([1.0, 7.0, -2.0, 4.0], g)
        assert out[0] == 0.0 and out[-1] == 0.0

    def test_length_mismatch(self):
        g = StaggeredGrid(0.0, 1.0, 3)
        with pytest.raises(ValueError):
            diff_edge_to_node([1.0, 2.0], g)


class TestAdjointness:
    """<l, div phi> = -<grad l, phi>_e for node fields vanishing at the ends."""

    def test_seeded_random_fields(self):
        rng = np.random.default_rng(42)
        for M in (4, 17, 64):
            g = StaggeredGrid.over(0.0, 1.0, M)
            for _ in range(20):
                l = rng.normal(size=M + 1)
                l[0] = l[-1] = 0.0
                phi = rng.normal(size=M)
                lhs = inner_node(l, diff_edge_to_node(phi, g), g)
                rhs = -inner_edge(diff_node_to_edge(l, g), phi, g)
                scale = max(abs(lhs), abs(rhs), 1.0)
                assert abs(lhs - rhs) <= 1e-12 * scale

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=2 ** 31))
    def test_property(self, M, seed):
        rng = np.random.default_rng(seed)
        g = StaggeredGrid.over(-1.0, 2.0, M)
        l = rng.uniform(-5.0, 5.0, M + 1)
        l[0] = l[-1] = 0.0
        phi = rng.uniform(-5.0, 5.0, M)
        lhs = inner_node(l, diff_edge_to_node(phi, g), g)
        rhs = -inner_edge(diff_node_to_edge(l, g), phi, g)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)


class TestNodeDerivative:
    def test_exact_on_square(self):
        g = StaggeredGrid(0.0, 1.0, 2)
        X = g.nodes()
        np.testing.assert_allclose(node_derivative(X * X, g), [0.0, 2.0, 4.0])

    def test_constant_vanishes(self):
        g = StaggeredGrid(0.0, 0.3, 5)
        assert np.all(node_derivative(np.full(6, 1.7), g) == 0.0)

    def test_identity_gives_ones(self):
        g = StaggeredGrid.over(-1.0, 1.0, 10)
        np.testing.assert_allclose(node_derivative(g.nodes(), g), np.ones(11), atol=1e-13)

    @pytest.mark.parametrize("M", [2, 5, 33])
    def test_exact_on_random_quadratics(self, M):
        rng = np.random.default_rng(M)
        g = StaggeredGrid.over(-2.0, 1.0, M)
        a, b, c = rng.uniform(-3.0, 3.0, 3)
        X = g.nodes()
        got = node_derivative(a * X * X + b * X + c, g)
        np.testing.assert_allclose(got, 2.0 * a * X + b, rtol=1e-12, atol=1e-12)


class TestBoundaryOneSidedDiff:
    def test_direct(self):
        g = StaggeredGrid(0.0, 1.0, 2)
        assert boundary_one_sided_diff([0.0, 1.0, 4.0], g) == (1.0, 3.0)

    def test_constant(self):
        g = StaggeredGrid(0.0, 1.0, 4)
        assert boundary_one_sided_diff(np.full(5, 2.0), g) == (0.0, 0.0)

    def test_identity(self):
        g = StaggeredGrid.over(0.0, 1.0, 8)
        left, right = boundary_one_sided_diff(g.nodes(), g)
        assert left == pytest.approx(1.0, rel=1e-13)
        assert right == pytest.approx(1.0, rel=1e-13)


class TestInnerProducts:
    def test_node_product_trapezoidal(self):
        g = StaggeredGrid(0.0, 0.5, 2)
        ones = np.ones(3)
        assert inner_node(ones, ones, g) == pytest.approx(1.0)

    def test_edge_product(self):
        g = StaggeredGrid(0.0, 0.5, 2)
        assert inner_edge([1.0, 1.0], [1.0, 1.0], g) == pytest.approx(1.0)

    def test_zero_field(self):
        g = StaggeredGrid(0.0, 0.5, 2)
        assert inner_node(np.zeros(3), np.ones(3), g) == 0.0
        assert inner_edge(np.zeros(2), np.ones(2), g) == 0.0


class TestNorms:
    def test_trajectory_weighted_norm_of_ones(self):
        g = StaggeredGrid(0.0, 0.5, 2)
        w = trajectory_error_weights(g)
        assert norm_l2_weighted(np.ones(3), w) == pytest.approx(1.0)

    def test_trajectory_weights_match_node_norm(self):
        rng = np.random.default_rng(3)
        g = StaggeredGrid.over(0.0, 1.0, 12)
        e = rng.normal(size=13)
        assert norm_l2_weighted(e, trajectory_error_weights(g)) == pytest.approx(norm_l2(e, g))

    def test_linf(self):
        assert norm_linf([1.0, -5.0, 2.0]) == 5.0

    def test_zero_field(self):
        g = StaggeredGrid(0.0, 0.5, 2)
        assert norm_l2_weighted(np.zeros(3), trajectory_error_weights(g)) == 0.0
        assert norm_linf(np.zeros(3)) == 0.0

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            norm_l2_weighted([1.0, 1.0], [1.0, -1.0])

    def test_density_weights_from_positions(self):
        x = np.array([0.0, 0.2, 0.5, 1.0])
        np.testing.assert_allclose(density_error_weights(x), [0.2, 0.5, 0.8, 0.5])


class TestInverseInequality:
    """||l||_inf * h^(1/2) / ||l||_2 stays bounded over a refinement ladder."""

    def test_monitor_bounded_constant(self):
        rng = np.random.default_rng(11)
        ratios = []
        for M in (16, 32, 64, 128, 256):
            g = StaggeredGrid.over(0.0, 1.0, M)
            worst = 0.0
            for _ in range(25):
                l = rng.normal(size=M + 1)
                worst = max(worst, norm_linf(l) * np.sqrt(g.h) / norm_l2(l, g))
            ratios.append(worst)
        # the constant must not grow under refinement (monitored, not pinned)
        assert max(ratios) <= 3.0 * ratios[0]
