"""Staggered-grid difference calculus on the Lagrangian reference interval.

The reference interval is partitioned into M uniform cells of width h.  Node
fields live on the M+1 nodes, edge fields on the M half-integer points.  The
forward node-to-edge difference and the edge-to-node divergence are adjoint
to each other with respect to the trapezoidal node product and the plain edge
product (up to boundary terms, which vanish for fields pinned at the ends).

All functions are pure and operate on plain float64 arrays.  Norms accumulate
in plain order: grids here stay below 1e4 nodes, so compensated summation
buys nothing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StaggeredGrid",
    "as_node_field",
    "as_edge_field",
    "diff_node_to_edge",
    "diff_edge_to_node",
    "node_derivative",
    "boundary_one_sided_diff",
    "inner_node",
    "inner_edge",
    "norm_l2",
    "norm_l2_weighted",
    "norm_linf",
    "density_error_weights",
    "trajectory_error_weights",
]


@dataclass(frozen=True)
class StaggeredGrid:
    """Uniform reference grid: left endpoint x0, cell width h, M cells.

    Nodes sit at x0 + i*h for i = 0..M; half-integer points at x0 + (i-1/2)*h
    for i = 1..M.
    """

    x0: float
    h: float
    M: int

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("cell width h must be positive")
        if self.M < 2:
            raise ValueError("need at least two cells")

    @property
    def num_nodes(self) -> int:
        return self.M + 1

    @property
    def num_edges(self) -> int:
        return self.M

    @property
    def x_right(self) -> float:
        return self.x0 + self.M * self.h

    def nodes(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.M + 1)

    def edges(self) -> np.ndarray:
        return self.x0 + self.h * (np.arange(self.M) + 0.5)

    @classmethod
    def over(cls, left: float, right: float, M: int) -> "StaggeredGrid":
        """Grid spanning [left, right] with M cells."""
        if right <= left:
            raise ValueError("empty interval")
        return cls(x0=left, h=(right - left) / M, M=M)


def as_node_field(values, grid: StaggeredGrid) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    if out.shape != (grid.num_nodes,):
        raise ValueError(f"node field must have length {grid.num_nodes}, got {out.shape}")
    return out


def as_edge_field(values, grid: StaggeredGrid) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    if out.shape != (grid.num_edges,):
        raise ValueError(f"edge field must have length {grid.num_edges}, got {out.shape}")
    return out


def diff_node_to_edge(l, grid: StaggeredGrid) -> np.ndarray:
    """Forward difference mapping a node field to the edge midpoints."""
    l = as_node_field(l, grid)
    return (l[1:] - l[:-1]) / grid.h


def diff_edge_to_node(phi, grid: StaggeredGrid) -> np.ndarray:
    """Centered difference of an edge field at interior nodes.

    Endpoint entries are set to 0 by convention and are never read by the
    schemes, which use separate boundary equations.
    """
    phi = as_edge_field(phi, grid)
    out = np.zeros(grid.num_nodes)
    out[1:-1] = (phi[1:] - phi[:-1]) / grid.h
    return out


def node_derivative(l, grid: StaggeredGrid) -> np.ndarray:
    """Second-order derivative of a node field at every node.

    Centered in the interior, one-sided second-order at the two ends; exact
    on quadratics everywhere.
    """
    l = as_node_field(l, grid)
    two_h = 2.0 * grid.h
    out = np.empty_like(l)
    out[1:-1] = (l[2:] - l[:-2]) / two_h
    out[0] = (4.0 * l[1] - l[2] - 3.0 * l[0]) / two_h
    out[-1] = (l[-3] - 4.0 * l[-2] + 3.0 * l[-1]) / two_h
    return out


def boundary_one_sided_diff(l, grid: StaggeredGrid) -> tuple[float, float]:
    """First-order one-sided differences at the two boundary nodes."""
    l = as_node_field(l, grid)
    return (l[1] - l[0]) / grid.h, (l[-1] - l[-2]) / grid.h


def inner_node(l, g, grid: StaggeredGrid) -> float:
    """Trapezoidal inner product on node fields (half weights at the ends)."""
    l = as_node_field(l, grid)
    g = as_node_field(g, grid)
    p = l * g
    return grid.h * (0.5 * p[0] + p[1:-1].sum() + 0.5 * p[-1])


def inner_edge(phi, psi, grid: StaggeredGrid) -> float:
    """Plain inner product on edge fields."""
    phi = as_edge_field(phi, grid)
    psi = as_edge_field(psi, grid)
    return grid.h * float(np.dot(phi, psi))


def norm_l2(l, grid: StaggeredGrid) -> float:
    """Norm induced by the trapezoidal node product."""
    return float(np.sqrt(inner_node(l, l, grid)))


def norm_l2_weighted(e, weights) -> float:
    """Weighted discrete L2 norm: ||e||^2 = (1/2) sum_i e_i^2 w_i.

    The weight recipes for density and trajectory errors are built by
    `density_error_weights` and `trajectory_error_weights`.
    """
    e = np.asarray(e, dtype=float)
    w = np.asarray(weights, dtype=float)
    if e.shape != w.shape:
        raise ValueError("error field and weights must have equal length")
    if np.any(w <= 0.0):
        raise ValueError("weights must be positive")
    return float(np.sqrt(0.5 * np.dot(e * e, w)))


def norm_linf(e) -> float:
    e = np.asarray(e, dtype=float)
    return float(np.max(np.abs(e)))


def density_error_weights(x) -> np.ndarray:
    """Per-node weights from the moved particle positions.

    Interior nodes weigh x_{i+1} - x_{i-1}; the ends weigh their single
    adjacent cell.
    """
    x = np.asarray(x, dtype=float)
    w = np.empty_like(x)
    w[1:-1] = x[2:] - x[:-2]
    w[0] = x[1] - x[0]
    w[-1] = x[-1] - x[-2]
    return w


def trajectory_error_weights(grid: StaggeredGrid) -> np.ndarray:
    """Per-node weights on the reference grid: 2h interior, h at the ends."""
    w = np.full(grid.num_nodes, 2.0 * grid.h)
    w[0] = grid.h
    w[-1] = grid.h
    return w
