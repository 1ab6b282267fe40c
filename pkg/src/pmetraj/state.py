"""Shared solver state: particle positions, initial density, configuration.

Particle positions are admissible when they are strictly increasing; the
schemes preserve this, and every step asserts it.  Densities are recovered
from the trajectory through the discrete deformation gradient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .grid import StaggeredGrid, as_node_field, node_derivative

__all__ = [
    "LAMBDA_STAR",
    "AdmissibilityError",
    "SolverError",
    "ConfigError",
    "TrajectoryState",
    "InitialDensity",
    "SchemeConfig",
    "NewtonReport",
    "is_admissible",
    "require_admissible",
    "density_from_trajectory",
    "sample_density",
]

# Threshold of the undamped-step region in the damped Newton step-size rule.
LAMBDA_STAR = 2.0 - math.sqrt(3.0)


class AdmissibilityError(RuntimeError):
    """Particle ordering was lost (a cell collapsed or twisted)."""


class SolverError(RuntimeError):
    """A nonlinear or linear solve failed; diagnostics in the message."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class TrajectoryState:
    """Particle positions at a discrete time level.

    ``x`` has one entry per node of the reference grid; ``n`` is the time
    index and ``t`` the physical time.  Arrays are treated as immutable.
    """

    x: np.ndarray
    n: int = 0
    t: float = 0.0

    def advanced(self, x_new: np.ndarray, tau: float) -> "TrajectoryState":
        return TrajectoryState(x=x_new, n=self.n + 1, t=self.t + tau)


@dataclass(frozen=True)
class InitialDensity:
    """Initial density on the nodes, with its half-integer-point values.

    The value at a half-integer point is the average of the two adjacent
    node values (the convention all flux terms use).  ``support`` carries
    the endpoints of the initial support for compact-support problems,
    None for fixed-domain problems.
    """

    node: np.ndarray
    edge: np.ndarray
    support: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if np.any(self.node < 0.0) or np.any(self.edge < 0.0):
            raise ValueError("initial density must be nonnegative")

    @classmethod
    def from_nodes(cls, node, support: Optional[tuple[float, float]] = None
                   ) -> "InitialDensity":
        node = np.asarray(node, dtype=float)
        return cls(node=node, edge=0.5 * (node[1:] + node[:-1]), support=support)


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme exponent, step size, and Newton parameters.

    ``case`` selects the scheme: 1 = nonlinear entropy-energy scheme solved
    by damped Newton, 2 = linear elastic-energy scheme.  ``damping`` picks
    the Newton step-size policy: "auto" (residual-monotone line search
    floored by the decrement rule) or "decrement-rule" (the pure rule).
    """

    m: float
    tau: float
    case: int = 1
    lambda_prime: float = 0.9
    newton_tol: Optional[float] = None
    newton_max_iter: int = 60
    T: float = 0.0
    damping: str = "auto"

    def __post_init__(self):
        if self.m <= 1.0:
            raise ValueError("exponent m must exceed 1")
        if self.tau <= 0.0:
            raise ValueError("time step must be positive")
        if self.case not in (1, 2):
            raise ValueError("case must be 1 or 2")
        if not (LAMBDA_STAR <= self.lambda_prime < 1.0):
            raise ValueError(f"lambda_prime must lie in [{LAMBDA_STAR:.6f}, 1)")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")
        if self.damping not in ("auto", "decrement-rule"):
            raise ValueError("damping must be 'auto' or 'decrement-rule'")

    def tol_for(self, grid: StaggeredGrid) -> float:
        """Residual tolerance, grid-scaled when not set explicitly."""
        if self.newton_tol is not None:
            return self.newton_tol
        return 1e-12 * math.sqrt(grid.num_nodes)

    def with_(self, **kw) -> "SchemeConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class NewtonReport:
    """Outcome of one damped-Newton solve."""

    iterations: int
    final_lambda: float
    final_residual_norm: float
    converged: bool
    tol_used: float
    lambda_history: tuple = field(default_factory=tuple)


def is_admissible(x) -> bool:
    """Strictly increasing positions; zero tolerance, ties are failures."""
    x = np.asarray(x, dtype=float)
    return bool(np.all(x[1:] > x[:-1]))


def require_admissible(x, where: str = "") -> None:
    if not is_admissible(x):
        raise AdmissibilityError(f"particle ordering lost {where}".strip())


def density_from_trajectory(state: TrajectoryState, f0: InitialDensity,
                            grid: StaggeredGrid) -> np.ndarray:
    """Recover the density at the moved nodes: f_i = f0(X_i) / stretch_i."""
    x = as_node_field(state.x, grid)
    stretch = node_derivative(x, grid)
    if np.any(stretch <= 0.0):
        raise AdmissibilityError("nonpositive deformation gradient in density recovery")
    return f0.node / stretch


def sample_density(profile: Callable[[np.ndarray], np.ndarray],
                   grid: StaggeredGrid,
                   support: Optional[tuple[float, float]] = None,
                   interior_floor: float = 0.0) -> InitialDensity:
    """Sample a density profile at the nodes; half-point values are averaged.

    For compact-support problems the two end nodes are forced to exactly
    zero.  ``interior_floor`` lifts interior samples to a tiny positive value
    (used after a support merge, where the junction may fall on a node).
    """
    node = np.maximum(np.asarray(profile(grid.nodes()), dtype=float), 0.0)
    if support is not None:
        node[0] = 0.0
        node[-1] = 0.0
        if interior_floor > 0.0:
            node[1:-1] = np.maximum(node[1:-1], interior_floor)
    return InitialDensity.from_nodes(node, support=support)
