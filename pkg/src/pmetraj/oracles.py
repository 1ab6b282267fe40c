"""Closed-form references and canonical initial data for validation.

The Barenblatt family is the exact compactly supported self-similar solution;
its interface position and particle map are explicit, which makes it the
reference for every free-boundary accuracy study.  The waiting-time family
has an explicit waiting time depending on a shape parameter theta in
[0, 1/4].
"""
from __future__ import annotations

import math

import numpy as np

from .grid import StaggeredGrid
from .state import InitialDensity, sample_density

__all__ = [
    "barenblatt",
    "barenblatt_interface",
    "barenblatt_trajectory",
    "exact_waiting_time",
    "smooth_profile",
    "waiting_profile",
    "step_profile",
    "initial_data",
    "PROBLEM_NAMES",
]

PROBLEM_NAMES = ("smooth", "barenblatt", "waiting", "two_column_left", "two_column_right")


def barenblatt(x, t: float, m: float):
    """Self-similar compactly supported solution, normalized to 1 at the origin at t=0."""
    if m <= 1.0:
        raise ValueError("m must exceed 1")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    k = 1.0 / (m + 1.0)
    s = (t + 1.0) ** (-k)
    x = np.asarray(x, dtype=float)
    arg = 1.0 - (k * (m - 1.0) / (2.0 * m)) * x * x * (t + 1.0) ** (-2.0 * k)
    # cut off against the interface position itself so the profile vanishes
    # exactly at and beyond it (the formula's cancellation rounds otherwise)
    inside = np.abs(x) < barenblatt_interface(t, m)
    out = np.where(inside, s * np.maximum(arg, 0.0) ** (1.0 / (m - 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def barenblatt_interface(t: float, m: float) -> float:
    """Right interface position; moves outward at finite speed."""
    if m <= 1.0:
        raise ValueError("m must exceed 1")
    k = 1.0 / (m + 1.0)
    return math.sqrt(2.0 * m / (k * (m - 1.0))) * (t + 1.0) ** k


def barenblatt_trajectory(X, t: float, m: float):
    """Exact particle map of the self-similar flow: uniform dilation."""
    k = 1.0 / (m + 1.0)
    X = np.asarray(X, dtype=float)
    out = X * (t + 1.0) ** k
    return float(out) if out.ndim == 0 else out


def exact_waiting_time(m: float, theta: float) -> float:
    """Waiting time of the `waiting_profile` family: 1 / (2 (m+1) (1-theta))."""
    if m <= 1.0:
        raise ValueError("m must exceed 1")
    if not (0.0 <= theta <= 0.25):
        raise ValueError("theta must lie in [0, 1/4]")
    return 1.0 / (2.0 * (m + 1.0) * (1.0 - theta))


def smooth_profile(x):
    """Strictly positive initial state on (0, 1)."""
    x = np.asarray(x, dtype=float)
    out = np.sin(np.pi * x) + 0.5
    return float(out) if out.ndim == 0 else out


def waiting_profile(x, m: float, theta: float):
    """Compact-support state on [-pi, 0] with an exactly known waiting time.

    The (m-1)-th power of the profile is (m-1)/m * ((1-theta) sin^2 x +
    theta sin^4 x), so its one-sided slope at both support ends vanishes and
    the interfaces wait.
    """
    if not (0.0 <= theta <= 0.25):
        raise ValueError("theta must lie in [0, 1/4]")
    x = np.asarray(x, dtype=float)
    s2 = np.sin(x) ** 2
    core = ((m - 1.0) / m) * ((1.0 - theta) * s2 + theta * s2 * s2)
    out = np.where((x >= -np.pi) & (x <= 0.0), core ** (1.0 / (m - 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def step_profile(x, left: float, right: float, height: float):
    """Column of constant density on the open interval (left, right)."""
    x = np.asarray(x, dtype=float)
    out = np.where((x > left) & (x < right), height, 0.0)
    return float(out) if out.ndim == 0 else out


def initial_data(problem: str, M: int, m: float | None = None,
                 theta: float | None = None) -> tuple[StaggeredGrid, InitialDensity]:
    """Canonical grid and sampled initial density for a named problem.

    Fixed-domain problems grid their domain; compact-support problems grid
    exactly the initial support (the trajectory unknowns live there).
    """
    if problem == "smooth":
        grid = StaggeredGrid.over(0.0, 1.0, M)
        return grid, sample_density(smooth_profile, grid, support=None)
    if problem == "barenblatt":
        if m is None:
            raise ValueError("barenblatt data needs m")
        xi0 = barenblatt_interface(0.0, m)
        grid = StaggeredGrid.over(-xi0, xi0, M)
        return grid, sample_density(lambda x: barenblatt(x, 0.0, m), grid,
                                    support=(-xi0, xi0))
    if problem == "waiting":
        if m is None or theta is None:
            raise ValueError("waiting data needs m and theta")
        grid = StaggeredGrid.over(-math.pi, 0.0, M)
        return grid, sample_density(lambda x: waiting_profile(x, m, theta), grid,
                                    support=(-math.pi, 0.0))
    if problem == "two_column_left":
        grid = StaggeredGrid.over(-3.0, -0.5, M)
        return grid, sample_density(lambda x: step_profile(x, -3.0, -0.5, 1.5), grid,
                                    support=(-3.0, -0.5))
    if problem == "two_column_right":
        grid = StaggeredGrid.over(0.5, 3.0, M)
        return grid, sample_density(lambda x: step_profile(x, 0.5, 3.0, 1.0), grid,
                                    support=(0.5, 3.0))
    raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEM_NAMES}")
