"""Pure-Python backend; same contract as the compiled kernels.

Assembly is vectorized with numpy.  The Thomas recurrence is inherently
sequential, so here it is a plain Python loop; the compiled backend is the
one meant for production runs (see `pmetraj.benchmark` for the gap).
"""
from __future__ import annotations

import numpy as np


def thomas(lower, diag, upper, rhs):
    """Tridiagonal Gaussian elimination without pivoting (see _kernels.thomas)."""
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.shape[0]
    if lower.shape[0] != n - 1 or upper.shape[0] != n - 1 or rhs.shape[0] != n:
        raise ValueError("band/rhs lengths inconsistent with system size")
    x = np.empty(n)
    g = np.empty(n - 1 if n > 1 else 0)
    beta = diag[0]
    if beta == 0.0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    x[0] = rhs[0] / beta
    for i in range(1, n):
        g[i - 1] = upper[i - 1] / beta
        beta = diag[i] - lower[i - 1] * g[i - 1]
        if beta == 0.0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        x[i] -= g[i] * x[i + 1]
    return x


def entropy_system(x, x_old, mass_over_tau, f0_edge, h):
    """Residual and Jacobian bands of the entropy scheme (see _kernels)."""
    x = np.asarray(x, dtype=float)
    M = x.shape[0] - 1
    if x_old.shape[0] != M + 1 or mass_over_tau.shape[0] != M + 1 or f0_edge.shape[0] != M:
        raise ValueError("field lengths inconsistent with grid")
    D = (x[1:] - x[:-1]) / h
    if np.any(D <= 0.0):
        raise ValueError("nonpositive cell stretch")
    phi = f0_edge / D
    c = f0_edge / (D * D * (h * h))  # grouping matches the compiled kernel bit for bit
    r = np.zeros(M + 1)
    lo = np.zeros(M + 1)
    di = np.zeros(M + 1)
    up = np.zeros(M + 1)
    r[1:M] = mass_over_tau[1:M] * (x[1:M] - x_old[1:M]) + (phi[1:] - phi[:-1]) / h
    di[1:M] = mass_over_tau[1:M] + c[1:] + c[:-1]
    lo[1:M] = -c[:-1]
    up[1:M] = -c[1:]
    return r, lo, di, up, phi


def elastic_system(x_old, mass_over_tau, edge_coef, b_left, b_right):
    """Interior tridiagonal system of the elastic scheme (see _kernels)."""
    x_old = np.asarray(x_old, dtype=float)
    M = x_old.shape[0] - 1
    n = M - 1
    if mass_over_tau.shape[0] != M + 1 or edge_coef.shape[0] != M:
        raise ValueError("field lengths inconsistent with grid")
    di = mass_over_tau[1:M] + edge_coef[1:] + edge_coef[:-1]
    rhs = mass_over_tau[1:M] * x_old[1:M]
    lo = -edge_coef[1:-1].copy()
    up = -edge_coef[1:-1].copy()
    rhs = rhs.copy()
    rhs[0] += edge_coef[0] * b_left
    rhs[n - 1] += edge_coef[M - 1] * b_right
    return lo, di.copy(), up, rhs
