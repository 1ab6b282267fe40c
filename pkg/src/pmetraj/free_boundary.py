"""Compact-support problems: moving interfaces, waiting times, support merging.

The trajectory unknowns live on a grid of the initial support.  Interior
nodes obey the chosen scheme; the two boundary nodes obey their own nonlinear
equations driven by the one-sided slope of f0^(m-1) at the support ends.  For
the entropy scheme the whole (M+1)-unknown system is solved by one damped
Newton iteration; for the elastic scheme the interior is linear, so a small
Newton iteration on the two boundary unknowns wraps the interior solve.

Waiting times: while the one-sided slope of f0^(m-1) vanishes at an end, the
interface waits.  Evolution starts with both ends pinned, and after every
step a two-resolution interface indicator is compared against its value on
the once-coarsened node subsequence; the first time level where the ratio
drops to 1 is the detected waiting time, after which the moving-boundary
scheme takes over.

Two supports evolve independently until their facing interfaces touch; the
merged profile is rebuilt on one equidistant grid by monotone cubic
interpolation and restarted as a single support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import _backend
from .elastic_scheme import ElasticPlan, _check_m_matrix
from .entropy_scheme import (
    EntropyPlan,
    NewtonSystem,
    damped_newton_solve,
)
from .grid import StaggeredGrid, as_node_field
from .interp import MonotoneCubic
from .numutil import elementwise_pow
from .state import (
    AdmissibilityError,
    InitialDensity,
    NewtonReport,
    SchemeConfig,
    SolverError,
    TrajectoryState,
    require_admissible,
    sample_density,
)

__all__ = [
    "SupportProblem",
    "WaitingState",
    "boundary_residuals",
    "free_boundary_step",
    "waiting_ratio",
    "detect_waiting_end",
    "run_waiting_time",
    "detect_meeting",
    "reconstruct_merged",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SupportProblem:
    """A compact-support run: support grid, sampled density, scheme config."""

    grid: StaggeredGrid
    f0: InitialDensity
    cfg: SchemeConfig

    def __post_init__(self):
        if self.f0.support is None:
            raise ValueError("free-boundary problems need a declared support")
        if np.any(self.f0.node[1:-1] <= 0.0):
            raise ValueError("density must be strictly positive inside the support")

    @cached_property
    def f0_pow(self) -> np.ndarray:
        """Nodewise f0^(m-1); its one-sided end slopes drive the interfaces."""
        return elementwise_pow(self.f0.node, self.cfg.m - 1.0)

    @cached_property
    def boundary_slopes(self) -> tuple[float, float]:
        p = self.f0_pow
        h = self.grid.h
        return (p[1] - p[0]) / h, (p[-1] - p[-2]) / h

    def initial_state(self, t: float = 0.0) -> TrajectoryState:
        return TrajectoryState(x=self.grid.nodes(), n=0, t=t)


@dataclass(frozen=True)
class WaitingState:
    """Progress of waiting-time detection.

    ``ratio_history`` collects (t, |coarse/fine| indicator ratio); ``t_star``
    is set exactly once, at the first time level where the ratio drops to 1.
    """

    waiting: bool = True
    t_star: Optional[float] = None
    ratio_history: tuple = ()


def boundary_residuals(x_new, x_old, f0: InitialDensity, grid: StaggeredGrid,
                       cfg: SchemeConfig) -> tuple[float, float]:
    """Residuals of the two nonlinear interface equations.

    Mass factor frozen at the old positions, flux evaluated at the new ones;
    zero at the converged boundary update.
    """
    x_new = as_node_field(x_new, grid)
    x_old = as_node_field(x_old, grid)
    h, m, tau = grid.h, cfg.m, cfg.tau
    p = elementwise_pow(f0.node, m - 1.0)
    g_left = (p[1] - p[0]) / h
    g_right = (p[-1] - p[-2]) / h
    q = m / (m - 1.0)
    d0_old = (x_old[1] - x_old[0]) / h
    dM_old = (x_old[-1] - x_old[-2]) / h
    d0 = (x_new[1] - x_new[0]) / h
    dM = (x_new[-1] - x_new[-2]) / h
    if d0 <= 0.0 or dM <= 0.0:
        raise AdmissibilityError("collapsed end cell in boundary residual")
    r0 = d0_old ** (m - 1.0) * (x_new[0] - x_old[0]) / tau + q * g_left / d0
    rM = dM_old ** (m - 1.0) * (x_new[-1] - x_old[-1]) / tau + q * g_right / dM
    return float(r0), float(rM)


def _entropy_free_step(state: TrajectoryState, problem: SupportProblem,
                       plan: EntropyPlan) -> tuple[TrajectoryState, NewtonReport]:
    grid, cfg, f0 = problem.grid, problem.cfg, problem.f0
    M, h, tau = grid.M, grid.h, cfg.tau
    m = cfg.m
    q = m / (m - 1.0)
    g_left, g_right = problem.boundary_slopes
    x_old = state.x
    alpha = plan.mass_coefficient(x_old)
    plan.last_mass_coeff = alpha
    mot = alpha / tau
    beta0 = ((x_old[1] - x_old[0]) / h) ** (m - 1.0) / tau
    betaM = ((x_old[-1] - x_old[-2]) / h) ** (m - 1.0) / tau
    mot_int = mot[1:M]
    xo_int = x_old[1:M]

    def build(x: np.ndarray) -> NewtonSystem:
        try:
            r, lo, di, up, phi = _backend.entropy_system(x, x_old, mot, f0.edge, h)
        except ValueError as exc:
            raise AdmissibilityError(str(exc)) from None
        d0 = (x[1] - x[0]) / h
        dM = (x[-1] - x[-2]) / h
        r[0] = beta0 * (x[0] - x_old[0]) + q * g_left / d0
        di[0] = beta0 + q * g_left / (d0 * d0 * h)
        up[0] = -q * g_left / (d0 * d0 * h)
        r[M] = betaM * (x[-1] - x_old[-1]) + q * g_right / dM
        di[M] = betaM - q * g_right / (dM * dM * h)
        lo[M] = q * g_right / (dM * dM * h)
        scale_int = (
            np.abs(mot_int * x[1:M])
            + np.abs(mot_int * xo_int)
            + (np.abs(phi[1:]) + np.abs(phi[:-1])) / h
        )
        s0 = abs(beta0 * x[0]) + abs(beta0 * x_old[0]) + abs(q * g_left / d0)
        sM = abs(betaM * x[-1]) + abs(betaM * x_old[-1]) + abs(q * g_right / dM)
        floor = _EPS * math.sqrt(float(np.dot(scale_int, scale_int)) + s0 * s0 + sM * sM)
        return NewtonSystem(r, lo[1:], di, up[:M], floor)

    x_new, report = damped_newton_solve(x_old, build, lambda d: d, cfg, grid,
                                        grid.h * float(f0.node[1:-1].min()))
    require_admissible(x_new, "after free-boundary entropy step")
    return state.advanced(x_new, tau), report


def _elastic_free_step(state: TrajectoryState, problem: SupportProblem,
                       plan: ElasticPlan) -> tuple[TrajectoryState, NewtonReport]:
    """Newton on the two boundary unknowns wrapped around the linear interior solve."""
    grid, cfg = problem.grid, problem.cfg
    M, h, tau, m = grid.M, grid.h, cfg.tau, cfg.m
    q = m / (m - 1.0)
    g_left, g_right = problem.boundary_slopes
    x_old = state.x
    mass = plan.mass_coefficient(x_old)
    plan.last_mass_coeff = mass
    mot = mass / tau
    beta0 = ((x_old[1] - x_old[0]) / h) ** (m - 1.0) / tau
    betaM = ((x_old[-1] - x_old[-2]) / h) ** (m - 1.0) / tau

    def interior(b0: float, bM: float) -> np.ndarray:
        lo, di, up, rhs = _backend.elastic_system(x_old, mot, plan._edge_coef, b0, bM)
        _check_m_matrix(lo, di, up, mot[1:-1])
        return _backend.thomas(lo, di, up, rhs)

    def residual(b0: float, bM: float, xin: np.ndarray) -> np.ndarray:
        d0 = (xin[0] - b0) / h
        dM = (bM - xin[-1]) / h
        if d0 <= 0.0 or dM <= 0.0:
            raise AdmissibilityError("collapsed end cell in boundary update")
        return np.array([
            beta0 * (b0 - x_old[0]) + q * g_left / d0,
            betaM * (bM - x_old[-1]) + q * g_right / dM,
        ])

    def res_floor(b0: float, bM: float, xin: np.ndarray) -> float:
        # rounding floor of the residual evaluation (mass and flux term scales)
        d0 = (xin[0] - b0) / h
        dM = (bM - xin[-1]) / h
        s0 = abs(beta0) * (abs(b0) + abs(x_old[0])) + abs(q * g_left / d0)
        sM = abs(betaM) * (abs(bM) + abs(x_old[-1])) + abs(q * g_right / dM)
        return _EPS * max(s0, sM)

    b = np.array([x_old[0], x_old[-1]])
    xin = interior(b[0], b[1])
    r = residual(b[0], b[1], xin)
    r0_scale = float(np.linalg.norm(r))
    iters = 0
    tol_b = 1e-12 * (1.0 + r0_scale)
    for _ in range(cfg.newton_max_iter):
        tol_b = max(1e-12 * (1.0 + r0_scale), 64.0 * res_floor(b[0], b[1], xin))
        if float(np.linalg.norm(r)) <= tol_b:
            break
        # reduced 2x2 Jacobian by forward differences, interior re-solved
        jac = np.empty((2, 2))
        for col in range(2):
            cell = (xin[0] - b[0]) if col == 0 else (b[1] - xin[-1])
            d = 1e-6 * cell * (1.0 if col == 0 else -1.0)
            bp = b.copy()
            bp[col] += d
            xp = interior(bp[0], bp[1])
            jac[:, col] = (residual(bp[0], bp[1], xp) - r) / d
        try:
            delta = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular boundary Jacobian: {exc}") from None
        if float(np.max(np.abs(delta))) <= 4.0 * _EPS * (1.0 + float(np.max(np.abs(b)))):
            break  # float64 fixed point of the boundary pair
        s = 1.0
        accepted = False
        for _ in range(30):
            bc = b + s * delta
            try:
                xc = interior(bc[0], bc[1])
                rc = residual(bc[0], bc[1], xc)
            except AdmissibilityError:
                s *= 0.5
                continue
            b, xin, r = bc, xc, rc
            accepted = True
            break
        if not accepted:
            raise SolverError("boundary update left the admissible set at every damping level")
        iters += 1
    else:
        raise SolverError(
            f"boundary Newton exhausted {cfg.newton_max_iter} iterations "
            f"(residual {float(np.linalg.norm(r)):.3e})"
        )
    x_new = np.empty(M + 1)
    x_new[0] = b[0]
    x_new[-1] = b[1]
    x_new[1:-1] = xin
    require_admissible(x_new, "after free-boundary elastic step")
    rn = float(np.linalg.norm(r))
    report = NewtonReport(iters, 0.0, rn, True, tol_b)
    return state.advanced(x_new, tau), report


class FreePlan:
    """Per-run workspace for moving-boundary stepping of either scheme."""

    def __init__(self, problem: SupportProblem):
        self.problem = problem
        cfg = problem.cfg
        if cfg.case == 1:
            self.scheme_plan = EntropyPlan(problem.f0, problem.grid, cfg)
        else:
            self.scheme_plan = ElasticPlan(problem.f0, problem.grid, cfg)

    def step(self, state: TrajectoryState) -> tuple[TrajectoryState, NewtonReport]:
        if self.problem.cfg.case == 1:
            return _entropy_free_step(state, self.problem, self.scheme_plan)
        return _elastic_free_step(state, self.problem, self.scheme_plan)

    def pinned_step(self, state: TrajectoryState) -> tuple[TrajectoryState, Optional[NewtonReport]]:
        """Fixed-endpoint step used while the interfaces wait."""
        if self.problem.cfg.case == 1:
            return self.scheme_plan.step(state)
        return self.scheme_plan.step(state), None


def free_boundary_step(state: TrajectoryState, problem: SupportProblem
                       ) -> tuple[TrajectoryState, NewtonReport]:
    """One moving-boundary step (interior scheme plus interface equations)."""
    require_admissible(state.x, "at free-boundary step entry")
    return FreePlan(problem).step(state)


def waiting_ratio(x, f0: InitialDensity, grid: StaggeredGrid, cfg: SchemeConfig,
                  stride: int = 1) -> float:
    """Left-interface indicator: end slope of f0^(m-1) over the m-th power of the end stretch.

    ``stride=2`` evaluates the same quantity on the once-coarsened node
    subsequence (x_0, x_2, ...), reusing the fine solution.
    """
    x = as_node_field(x, grid)
    if stride not in (1, 2):
        raise ValueError("stride must be 1 or 2")
    if stride == 2 and grid.M % 2 != 0:
        raise ValueError("coarsened indicator needs an even number of cells")
    p = elementwise_pow(f0.node, cfg.m - 1.0)
    hs = stride * grid.h
    g = (p[stride] - p[0]) / hs
    d = (x[stride] - x[0]) / hs
    if d <= 0.0:
        raise AdmissibilityError("collapsed end cells in waiting indicator")
    return float(g / d ** cfg.m)


def detect_waiting_end(wstate: WaitingState, state: TrajectoryState,
                       f0: InitialDensity, grid: StaggeredGrid,
                       cfg: SchemeConfig) -> WaitingState:
    """Advance the detector by one time level (first ratio crossing wins).

    A vanishing fine indicator leaves the ratio undefined; by convention the
    interface is then still waiting.
    """
    if not wstate.waiting:
        return wstate
    b_fine = waiting_ratio(state.x, f0, grid, cfg, stride=1)
    b_coarse = waiting_ratio(state.x, f0, grid, cfg, stride=2)
    if b_fine == 0.0:
        ratio = math.inf
    else:
        ratio = abs(b_coarse / b_fine)
    hist = wstate.ratio_history + ((state.t, ratio),)
    if ratio <= 1.0:
        return WaitingState(waiting=False, t_star=state.t, ratio_history=hist)
    return WaitingState(waiting=True, t_star=None, ratio_history=hist)


def run_waiting_time(problem: SupportProblem,
                     observer: Optional[Callable] = None
                     ) -> tuple[WaitingState, TrajectoryState]:
    """Two-phase waiting-time run.

    Phase 1 evolves with both interfaces pinned at the initial support,
    checking the detector at every level (including t=0: data whose end
    slopes do not vanish start moving immediately).  From the detected level
    on, phase 2 evolves with the moving-boundary scheme until the final time.

    ``observer(state, phase, wstate, report, plan)`` is called at every level.
    """
    cfg = problem.cfg
    if problem.grid.M % 2 != 0:
        raise ValueError("waiting-time detection needs an even number of cells")
    n_steps = _step_count(cfg.T, cfg.tau)
    plan = FreePlan(problem)
    state = problem.initial_state()
    wstate = detect_waiting_end(WaitingState(), state, problem.f0, problem.grid, cfg)
    if observer is not None:
        observer(state, "pinned" if wstate.waiting else "moving", wstate, None, plan)
    while wstate.waiting and state.n < n_steps:
        state, report = plan.pinned_step(state)
        wstate = detect_waiting_end(wstate, state, problem.f0, problem.grid, cfg)
        if observer is not None:
            observer(state, "pinned", wstate, report, plan)
    while state.n < n_steps:
        state, report = plan.step(state)
        if observer is not None:
            observer(state, "moving", wstate, report, plan)
    return wstate, state


def detect_meeting(left: TrajectoryState, right: TrajectoryState,
                   tol: float = 1e-10, overlap_budget: float = 0.0) -> bool:
    """True when the facing interfaces of two supports have met.

    The gap crosses zero between two time levels, so the first level at
    which it is at or below ``tol`` (including a crossing smaller than
    ``overlap_budget``, at most one cell when driven by the merge runner)
    counts as the meeting.  A deeper overlap means the step size was too
    large and is a hard error.
    """
    gap = float(right.x[0] - left.x[-1])
    if gap < -abs(overlap_budget):
        raise SolverError(
            f"supports overlap by {-gap:.3e} (budget {abs(overlap_budget):.3e}): "
            "step size too large"
        )
    return gap <= tol


def reconstruct_merged(left: tuple[TrajectoryState, np.ndarray],
                       right: tuple[TrajectoryState, np.ndarray],
                       M2: int, cfg: SchemeConfig,
                       t_merge: Optional[float] = None
                       ) -> tuple[SupportProblem, TrajectoryState]:
    """Rebuild two touching supports as one problem on an equidistant grid.

    Takes (trajectory, density) pairs, fuses the duplicated meeting node to
    the average of the two one-sided density values, interpolates with the
    monotone cubic, and samples a fresh initial density on M2 cells spanning
    the union.  Interior samples are floored at a tiny positive value so the
    junction (where the density vanishes at the meeting instant) cannot
    produce a zero interior node.
    """
    (ls, lf), (rs, rf) = left, right
    lx, rx = np.asarray(ls.x, dtype=float), np.asarray(rs.x, dtype=float)
    lf = np.asarray(lf, dtype=float)
    rf = np.asarray(rf, dtype=float)
    junction = 0.5 * (lx[-1] + rx[0])
    xs = np.concatenate([lx[:-1], [junction], rx[1:]])
    ys = np.concatenate([lf[:-1], [0.5 * (lf[-1] + rf[0])], rf[1:]])
    if np.any(xs[1:] <= xs[:-1]):
        raise ValueError("non-monotone node positions in merge reconstruction")
    curve = MonotoneCubic(xs, ys)
    grid2 = StaggeredGrid.over(xs[0], xs[-1], M2)
    floor = 1e-12 * float(ys.max())
    f0 = sample_density(curve, grid2, support=(xs[0], xs[-1]), interior_floor=floor)
    problem = SupportProblem(grid=grid2, f0=f0, cfg=cfg)
    t0 = ls.t if t_merge is None else t_merge
    return problem, TrajectoryState(x=grid2.nodes(), n=0, t=t0)


def _step_count(T: float, tau: float) -> int:
    n = int(round(T / tau))
    if abs(n * tau - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("final time must be an integer multiple of the time step")
    return n
