"""Benchmark of the compiled kernels against the pure-Python backend.

Times the three hot kernels and a full implicit step of each scheme.  Run as
``python -m pmetraj.benchmark`` or ``pmetraj bench``.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import fallback

try:
    from ._backend import _kernels as compiled
except ImportError:
    compiled = None

from .grid import StaggeredGrid
from .oracles import initial_data
from .state import SchemeConfig, TrajectoryState

__all__ = ["run_benchmark"]


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _kernel_cases(module, M: int):
    rng = np.random.default_rng(7)
    grid = StaggeredGrid.over(0.0, 1.0, M)
    x = grid.nodes() + 0.2 * grid.h * np.sin(np.linspace(0.0, 3.0, M + 1))
    x[0], x[-1] = 0.0, 1.0
    mot = rng.uniform(0.5, 1.5, M + 1)
    f0e = rng.uniform(0.5, 1.5, M)
    lower = rng.uniform(-1.0, 0.0, M - 1)
    upper = rng.uniform(-1.0, 0.0, M - 1)
    diag = 4.0 + rng.uniform(0.0, 1.0, M)
    rhs = rng.uniform(-1.0, 1.0, M)
    return {
        "thomas": lambda: module.thomas(lower, diag, upper, rhs),
        "entropy_system": lambda: module.entropy_system(x, x, mot, f0e, grid.h),
        "elastic_system": lambda: module.elastic_system(x, mot, f0e, 0.0, 1.0),
    }


def _step_case(case: int, M: int):
    from .elastic_scheme import ElasticPlan
    from .entropy_scheme import EntropyPlan

    grid, f0 = initial_data("smooth", M)
    cfg = SchemeConfig(m=2.0, tau=1e-3, case=case, T=1e-3)
    plan = EntropyPlan(f0, grid, cfg) if case == 1 else ElasticPlan(f0, grid, cfg)
    state = TrajectoryState(x=grid.nodes())
    return lambda: plan.step(state)


def run_benchmark(sizes=(1000, 4000, 8000), repeats: int = 5) -> None:
    if compiled is None:
        print("compiled backend unavailable; timing the pure-Python backend only")
    header = f"{'kernel':<16} {'M':>7} {'python (ms)':>13} {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for M in sizes:
        py = _kernel_cases(fallback, M)
        cy = _kernel_cases(compiled, M) if compiled is not None else None
        for name in py:
            t_py = _time(py[name], repeats) * 1e3
            if cy is not None:
                t_cy = _time(cy[name], repeats) * 1e3
                print(f"{name:<16} {M:>7} {t_py:>13.3f} {t_cy:>14.3f} {t_py / t_cy:>8.1f}x")
            else:
                print(f"{name:<16} {M:>7} {t_py:>13.3f} {'-':>14} {'-':>8}")
    # whole implicit steps through whichever backend is active
    from . import _backend

    print(f"\nfull steps through the active backend ({_backend.BACKEND}):")
    for case, label in ((1, "entropy step"), (2, "elastic step")):
        for M in sizes:
            t = _time(_step_case(case, M), max(2, repeats // 2)) * 1e3
            print(f"{label:<16} {M:>7} {t:>13.3f} ms")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,4000,8000")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    run_benchmark(sizes=[int(s) for s in args.sizes.split(",")], repeats=args.repeats)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
