"""Nonlinear scheme built on the entropy energy (f log f), solved by damped Newton.

Each implicit step minimizes a strictly convex functional over the admissible
set: a quadratic penalty on the particle displacement, with a mass
coefficient frozen at the previous time level, plus the entropy of the
stretched density.  The functional blows up as a cell collapses, so the
minimizer never leaves the admissible set; the damped Newton iteration
exploits that through a step size keyed to the Newton decrement.

The decrement-based step-size rule is implemented exactly (``damped_step_size``,
``newton_decrement``); for degenerate densities (free-boundary supports, where
the interior density minimum tends to zero under refinement) the rule's
normalizing constant makes the damped phase impractically slow, so the default
"auto" policy runs a residual-monotone line search from the full step and only
falls back to the rule's step size.  See the solver notes in the README.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _backend
from .grid import (
    StaggeredGrid,
    as_node_field,
    diff_node_to_edge,
    inner_node,
    node_derivative,
)
from .numutil import elementwise_pow
from .state import (
    AdmissibilityError,
    InitialDensity,
    NewtonReport,
    SchemeConfig,
    SolverError,
    TrajectoryState,
    is_admissible,
    require_admissible,
)

__all__ = [
    "mass_coefficient",
    "entropy_residual",
    "energy_functional",
    "newton_system",
    "newton_decrement",
    "damped_step_size",
    "entropy_step",
    "entropy_energy",
    "EntropyPlan",
    "NewtonSystem",
    "damped_newton_solve",
]

_EPS = float(np.finfo(float).eps)


def mass_coefficient(x_old, f0: InitialDensity, grid: StaggeredGrid, m: float) -> np.ndarray:
    """Per-node mass coefficient frozen at the previous level.

    Equals f0^(2-m) * stretch^(m-1) / m at nodes with positive density and 0
    where the density vanishes (support endpoints, which the interior
    equations never touch).
    """
    x_old = as_node_field(x_old, grid)
    stretch = node_derivative(x_old, grid)
    if np.any(stretch <= 0.0):
        raise AdmissibilityError("nonpositive stretch in mass coefficient")
    out = np.zeros(grid.num_nodes)
    pos = f0.node > 0.0
    out[pos] = (
        elementwise_pow(f0.node[pos], 2.0 - m)
        * elementwise_pow(stretch[pos], m - 1.0)
        / m
    )
    return out


def entropy_residual(x_new, x_old, f0: InitialDensity, grid: StaggeredGrid,
                     cfg: SchemeConfig) -> np.ndarray:
    """Interior residual of the implicit entropy scheme; endpoints are 0.

    Zero exactly at the converged step.
    """
    x_new = as_node_field(x_new, grid)
    x_old = as_node_field(x_old, grid)
    alpha = mass_coefficient(x_old, f0, grid, cfg.m)
    try:
        r, _, _, _, _ = _backend.entropy_system(x_new, x_old, alpha / cfg.tau, f0.edge, grid.h)
    except ValueError as exc:
        raise AdmissibilityError(str(exc)) from None
    return r


def entropy_energy(x, f0: InitialDensity, grid: StaggeredGrid) -> float:
    """Entropy of the stretched density: <f0, log(f0/stretch)> on edges.

    Returns +inf when some cell has collapsed (the energy barrier that keeps
    minimizers admissible); terms with zero density contribute zero.
    """
    x = as_node_field(x, grid)
    D = diff_node_to_edge(x, grid)
    if np.any(D <= 0.0):
        return math.inf
    vals = np.zeros_like(D)
    pos = f0.edge > 0.0
    vals[pos] = f0.edge[pos] * np.log(f0.edge[pos] / D[pos])
    return grid.h * float(vals.sum())


def energy_functional(y, x_old, f0: InitialDensity, grid: StaggeredGrid,
                      cfg: SchemeConfig, alpha: Optional[np.ndarray] = None) -> float:
    """Objective whose unique admissible minimizer is the entropy-scheme step.

    Displacement penalty (mass-weighted, trapezoidal product) plus the
    entropy term; +inf outside the admissible set.
    """
    y = as_node_field(y, grid)
    x_old = as_node_field(x_old, grid)
    if not is_admissible(y):
        return math.inf
    if alpha is None:
        alpha = mass_coefficient(x_old, f0, grid, cfg.m)
    dy = y - x_old
    quad = inner_node(alpha * dy, dy, grid) / (2.0 * cfg.tau)
    return quad + entropy_energy(y, f0, grid)


def newton_system(x_k, x_old, f0: InitialDensity, grid: StaggeredGrid,
                  cfg: SchemeConfig):
    """Tridiagonal Newton system for the interior correction.

    Returns (lower, diag, upper, rhs) over the interior unknowns with
    homogeneous endpoint corrections; rhs is minus the current residual.
    The matrix is the Hessian of `energy_functional` restricted to the
    interior, up to the factor h.
    """
    x_k = as_node_field(x_k, grid)
    x_old = as_node_field(x_old, grid)
    alpha = mass_coefficient(x_old, f0, grid, cfg.m)
    try:
        r, lo, di, up, _ = _backend.entropy_system(x_k, x_old, alpha / cfg.tau, f0.edge, grid.h)
    except ValueError as exc:
        raise AdmissibilityError(str(exc)) from None
    M = grid.M
    return lo[2:M], di[1:M], up[1:M - 1], -r[1:M]


def newton_decrement(delta_x, rhs_gradient, f0: InitialDensity, grid: StaggeredGrid) -> float:
    """Newton decrement normalized by a = h * min interior density.

    ``rhs_gradient`` is the objective gradient and ``delta_x`` the Newton
    correction already obtained from the Hessian solve, so the quadratic
    form reduces to a plain dot product.
    """
    a = grid.h * float(np.min(f0.node[1:-1]))
    if a <= 0.0:
        raise ValueError("decrement normalization needs positive interior density")
    val = -float(np.dot(np.asarray(rhs_gradient, dtype=float), np.asarray(delta_x, dtype=float)))
    return math.sqrt(max(0.0, val) / a)


def damped_step_size(lam: float, lambda_prime: float) -> float:
    """Step size keyed to the Newton decrement.

    Full steps below the threshold 2 - sqrt(3); 1/lam far away; the
    interpolating middle branch in between.
    """
    lam_star = 2.0 - math.sqrt(3.0)
    if lam < lam_star:
        return 1.0
    if lam <= lambda_prime:
        return (1.0 - lam) / (lam * (3.0 - lam))
    return 1.0 / lam


@dataclass
class NewtonSystem:
    """One assembled linearization: active residual, bands, rounding floor."""

    r: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    floor: float


def damped_newton_solve(x_start: np.ndarray,
                        build: Callable[[np.ndarray], NewtonSystem],
                        embed: Callable[[np.ndarray], np.ndarray],
                        cfg: SchemeConfig,
                        grid: StaggeredGrid,
                        a_const: float) -> tuple[np.ndarray, NewtonReport]:
    """Damped Newton iteration shared by the fixed-domain and free-boundary solves.

    ``build`` assembles the active residual and Jacobian bands at a candidate
    (raising AdmissibilityError off the admissible set), ``embed`` maps an
    active correction back to a full node field.  ``a_const`` normalizes the
    Newton decrement.

    Convergence: residual 2-norm at or below the configured tolerance, or
    below the estimated floating-point assembly floor when that is larger
    (demanding less than the rounding floor would loop forever).  A Newton
    correction below machine precision relative to the positions also counts
    as converged: the iteration has reached its float64 fixed point and the
    residual cannot improve further.
    """
    if a_const <= 0.0:
        raise ValueError("decrement normalization must be positive")
    x = np.array(x_start, dtype=float)
    sys = build(x)
    rnorm = float(np.linalg.norm(sys.r))
    tol_cfg = cfg.tol_for(grid)
    lam_hist: list[float] = []
    lam = 0.0
    iters = 0
    tol_eff = max(tol_cfg, 64.0 * sys.floor)
    for _ in range(cfg.newton_max_iter):
        tol_eff = max(tol_cfg, 64.0 * sys.floor)
        if rnorm <= tol_eff:
            return x, NewtonReport(iters, lam, rnorm, True, tol_eff, tuple(lam_hist))
        delta = _backend.thomas(sys.lower, sys.diag, sys.upper, -sys.r)
        lam = math.sqrt(max(0.0, -grid.h * float(np.dot(sys.r, delta))) / a_const)
        lam_hist.append(lam)
        om_rule = damped_step_size(lam, cfg.lambda_prime)
        delta_full = embed(delta)
        x_scale = 1.0 + float(np.max(np.abs(x)))
        if float(np.max(np.abs(delta_full))) <= 4.0 * _EPS * x_scale:
            # float64 fixed point: the correction is below representable change
            return x, NewtonReport(iters, lam, rnorm, True, tol_eff, tuple(lam_hist))
        chosen = None
        if cfg.damping == "decrement-rule":
            om = om_rule
            for _ in range(31):
                try:
                    cand = build(x + om * delta_full)
                except AdmissibilityError:
                    om *= 0.5
                    continue
                chosen = (x + om * delta_full, cand)
                break
        else:
            ladder = [1.0]
            while ladder[-1] * 0.5 > om_rule and len(ladder) < 24:
                ladder.append(ladder[-1] * 0.5)
            if om_rule < ladder[-1]:
                ladder.append(om_rule)
            best = None
            for om in ladder:
                xc = x + om * delta_full
                try:
                    cand = build(xc)
                except AdmissibilityError:
                    continue
                rn = float(np.linalg.norm(cand.r))
                if rn <= (1.0 - 1e-4 * om) * rnorm or rn <= tol_eff:
                    chosen = (xc, cand)
                    break
                if best is None or rn < best[2]:
                    best = (xc, cand, rn)
            if chosen is None and best is not None and best[2] < rnorm:
                chosen = (best[0], best[1])
            if chosen is None:
                # admissibility-only emergency halving below the rule step
                om = om_rule
                for _ in range(31):
                    om *= 0.5
                    try:
                        cand = build(x + om * delta_full)
                    except AdmissibilityError:
                        continue
                    chosen = (x + om * delta_full, cand)
                    break
        if chosen is None:
            raise SolverError(
                f"Newton step left the admissible set at every damping level "
                f"(iteration {iters}, residual {rnorm:.3e})"
            )
        x, sys = chosen
        rnorm = float(np.linalg.norm(sys.r))
        iters += 1
    if rnorm <= tol_eff:
        return x, NewtonReport(iters, lam, rnorm, True, tol_eff, tuple(lam_hist))
    raise SolverError(
        f"damped Newton exhausted {cfg.newton_max_iter} iterations: "
        f"residual {rnorm:.3e}, tolerance {tol_eff:.3e}"
    )


class EntropyPlan:
    """Per-run workspace for fixed-domain entropy stepping.

    Caches the density-only factors so each step costs one stretch power,
    one assembly per Newton iteration, and one tridiagonal solve.
    """

    def __init__(self, f0: InitialDensity, grid: StaggeredGrid, cfg: SchemeConfig):
        if cfg.case != 1:
            raise ValueError("EntropyPlan requires case=1 configuration")
        if np.any(f0.node[1:-1] <= 0.0):
            raise ValueError("interior density must be positive for the entropy scheme")
        self.f0 = f0
        self.grid = grid
        self.cfg = cfg
        M = grid.M
        self._c_node = np.zeros(M + 1)
        pos = f0.node > 0.0
        self._c_node[pos] = elementwise_pow(f0.node[pos], 2.0 - cfg.m) / cfg.m
        self._a_const = grid.h * float(f0.node[1:-1].min())
        self.last_mass_coeff: Optional[np.ndarray] = None

    def mass_coefficient(self, x_old: np.ndarray) -> np.ndarray:
        stretch = node_derivative(x_old, self.grid)
        if np.any(stretch <= 0.0):
            raise AdmissibilityError("nonpositive stretch in mass coefficient")
        return self._c_node * elementwise_pow(stretch, self.cfg.m - 1.0)

    def step(self, state: TrajectoryState) -> tuple[TrajectoryState, NewtonReport]:
        grid, cfg, f0 = self.grid, self.cfg, self.f0
        M, h = grid.M, grid.h
        x_old = state.x
        alpha = self.mass_coefficient(x_old)
        self.last_mass_coeff = alpha
        mot = alpha / cfg.tau
        mot_int = mot[1:M]
        xo_int = x_old[1:M]

        def build(x: np.ndarray) -> NewtonSystem:
            try:
                r, lo, di, up, phi = _backend.entropy_system(x, x_old, mot, f0.edge, h)
            except ValueError as exc:
                raise AdmissibilityError(str(exc)) from None
            scale = (
                np.abs(mot_int * x[1:M])
                + np.abs(mot_int * xo_int)
                + (np.abs(phi[1:]) + np.abs(phi[:-1])) / h
            )
            floor = _EPS * float(np.linalg.norm(scale))
            return NewtonSystem(r[1:M], lo[2:M], di[1:M], up[1:M - 1], floor)

        def embed(delta: np.ndarray) -> np.ndarray:
            out = np.zeros(M + 1)
            out[1:M] = delta
            return out

        x_new, report = damped_newton_solve(x_old, build, embed, cfg, grid, self._a_const)
        require_admissible(x_new, "after entropy step")
        return state.advanced(x_new, cfg.tau), report


def entropy_step(state: TrajectoryState, f0: InitialDensity, grid: StaggeredGrid,
                 cfg: SchemeConfig) -> tuple[TrajectoryState, NewtonReport]:
    """One implicit step of the fixed-domain entropy scheme."""
    require_admissible(state.x, "at entropy step entry")
    return EntropyPlan(f0, grid, cfg).step(state)
