"""Linear scheme built on the elastic energy (1/(2f)): one tridiagonal solve per step.

The implicit flux is linear in the new positions, so each step assembles one
diagonally dominant tridiagonal system with the M-matrix sign pattern
(positive diagonal, nonpositive off-diagonals) and solves it directly.  The
sign pattern is asserted at every assembly; it is what guarantees the
discrete extremum principle that keeps particles ordered.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import _backend
from .grid import StaggeredGrid, as_node_field, diff_node_to_edge, node_derivative
from .numutil import elementwise_pow
from .state import (
    AdmissibilityError,
    InitialDensity,
    SchemeConfig,
    SolverError,
    TrajectoryState,
    require_admissible,
)

__all__ = [
    "solve_tridiagonal",
    "elastic_mass_coefficient",
    "assemble_elastic",
    "elastic_step",
    "elastic_energy",
    "ElasticPlan",
]


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Direct tridiagonal solve (Thomas algorithm, no pivoting).

    All scheme matrices are diagonally dominant; a zero pivot raises.
    """
    return _backend.thomas(
        np.ascontiguousarray(lower, dtype=float),
        np.ascontiguousarray(diag, dtype=float),
        np.ascontiguousarray(upper, dtype=float),
        np.ascontiguousarray(rhs, dtype=float),
    )


def elastic_mass_coefficient(x_old, f0: InitialDensity, grid: StaggeredGrid,
                             m: float) -> np.ndarray:
    """Per-node mass coefficient stretch^(m+1) / (m f0^m); zero where f0 = 0."""
    x_old = as_node_field(x_old, grid)
    stretch = node_derivative(x_old, grid)
    if np.any(stretch <= 0.0):
        raise AdmissibilityError("nonpositive stretch in mass coefficient")
    out = np.zeros(grid.num_nodes)
    pos = f0.node > 0.0
    out[pos] = elementwise_pow(stretch[pos], m + 1.0) / (m * elementwise_pow(f0.node[pos], m))
    return out


def _check_m_matrix(lower, diag, upper, mass_over_tau_interior) -> None:
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise SolverError("elastic coefficients overflowed (support edge too stiff for float64)")
    if not np.all(diag > 0.0):
        raise SolverError("elastic system lost its positive diagonal")
    if (lower.size and not np.all(lower <= 0.0)) or (upper.size and not np.all(upper <= 0.0)):
        raise SolverError("elastic system lost the M-matrix sign pattern")
    if not np.all(mass_over_tau_interior > 0.0):
        raise SolverError("elastic mass coefficient must be positive on interior nodes")


def assemble_elastic(state: TrajectoryState, f0: InitialDensity, grid: StaggeredGrid,
                     cfg: SchemeConfig):
    """Tridiagonal system for the new interior positions, endpoints pinned.

    Returns (lower, diag, upper, rhs).  Verifies the M-matrix sign pattern
    and finiteness of the stiff edge coefficients.
    """
    if np.any(f0.node[1:-1] <= 0.0):
        raise ValueError("interior density must be positive for the elastic scheme")
    if np.any(f0.edge <= 0.0):
        raise ValueError("edge density must be positive for the elastic scheme")
    x_old = as_node_field(state.x, grid)
    mass = elastic_mass_coefficient(x_old, f0, grid, cfg.m) / cfg.tau
    edge_coef = 1.0 / (grid.h * grid.h * f0.edge)
    lo, di, up, rhs = _backend.elastic_system(x_old, mass, edge_coef, x_old[0], x_old[-1])
    _check_m_matrix(lo, di, up, mass[1:-1])
    return lo, di, up, rhs


def elastic_step(state: TrajectoryState, f0: InitialDensity, grid: StaggeredGrid,
                 cfg: SchemeConfig) -> TrajectoryState:
    """One implicit step of the fixed-domain elastic scheme."""
    require_admissible(state.x, "at elastic step entry")
    return ElasticPlan(f0, grid, cfg).step(state)


def elastic_energy(x, f0: InitialDensity, grid: StaggeredGrid) -> float:
    """Elastic energy of the stretch: (1/2) <stretch/f0, stretch> on edges."""
    x = as_node_field(x, grid)
    if np.any(f0.edge <= 0.0):
        raise ZeroDivisionError("elastic energy undefined where the edge density vanishes")
    D = diff_node_to_edge(x, grid)
    return 0.5 * grid.h * float(np.dot(D / f0.edge, D))


class ElasticPlan:
    """Per-run workspace for fixed-domain elastic stepping."""

    def __init__(self, f0: InitialDensity, grid: StaggeredGrid, cfg: SchemeConfig):
        if cfg.case != 2:
            raise ValueError("ElasticPlan requires case=2 configuration")
        if np.any(f0.node[1:-1] <= 0.0):
            raise ValueError("interior density must be positive for the elastic scheme")
        if np.any(f0.edge <= 0.0):
            raise ValueError("edge density must be positive for the elastic scheme")
        self.f0 = f0
        self.grid = grid
        self.cfg = cfg
        M = grid.M
        self._inv_mf = np.zeros(M + 1)
        pos = f0.node > 0.0
        self._inv_mf[pos] = 1.0 / (cfg.m * elementwise_pow(f0.node[pos], cfg.m))
        self._edge_coef = 1.0 / (grid.h * grid.h * f0.edge)
        self.last_mass_coeff: Optional[np.ndarray] = None

    def mass_coefficient(self, x_old: np.ndarray) -> np.ndarray:
        stretch = node_derivative(x_old, self.grid)
        if np.any(stretch <= 0.0):
            raise AdmissibilityError("nonpositive stretch in mass coefficient")
        return elementwise_pow(stretch, self.cfg.m + 1.0) * self._inv_mf

    def step(self, state: TrajectoryState) -> TrajectoryState:
        grid, cfg = self.grid, self.cfg
        x_old = state.x
        mass = self.mass_coefficient(x_old)
        self.last_mass_coeff = mass
        mot = mass / cfg.tau
        lo, di, up, rhs = _backend.elastic_system(x_old, mot, self._edge_coef,
                                                  x_old[0], x_old[-1])
        _check_m_matrix(lo, di, up, mot[1:-1])
        interior = _backend.thomas(lo, di, up, rhs)
        x_new = np.empty_like(x_old)
        x_new[0] = x_old[0]
        x_new[-1] = x_old[-1]
        x_new[1:-1] = interior
        require_admissible(x_new, "after elastic step")
        return state.advanced(x_new, cfg.tau)
