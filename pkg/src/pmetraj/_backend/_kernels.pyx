# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels.

These routines are the hot path of every time step: the Thomas solve of a
tridiagonal system and the per-iteration assembly of residual and Jacobian
bands.  The pure-Python backend (`fallback.py`) implements the same contract;
`pmetraj._backend` picks one at import time.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def thomas(const double[::1] lower, const double[::1] diag,
           const double[::1] upper, const double[::1] rhs):
    """Solve a tridiagonal system by Gaussian elimination without pivoting.

    ``lower``/``upper`` hold the sub/super-diagonal (length n-1), ``diag``
    the main diagonal (length n).  Raises ZeroDivisionError on a zero pivot.
    All scheme matrices are diagonally dominant, so no pivoting is needed.
    """
    cdef Py_ssize_t n = diag.shape[0]
    if lower.shape[0] != n - 1 or upper.shape[0] != n - 1 or rhs.shape[0] != n:
        raise ValueError("band/rhs lengths inconsistent with system size")
    out = np.empty(n)
    work = np.empty(n - 1 if n > 1 else 0)
    cdef double[::1] x = out
    cdef double[::1] g = work
    cdef double beta = diag[0]
    cdef Py_ssize_t i
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
    return out


def entropy_system(const double[::1] x, const double[::1] x_old,
                   const double[::1] mass_over_tau,
                   const double[::1] f0_edge, double h):
    """Residual and Jacobian bands of the nonlinear entropy scheme.

    Fills interior rows 1..M-1; rows 0 and M stay zero so that callers can
    overwrite them with boundary equations.  Band convention: row i couples
    (lo[i], di[i], up[i]) to unknowns (i-1, i, i+1).  Also returns the edge
    flux f0_edge / stretch, reused by callers.

    Raises ValueError when some cell stretch is nonpositive (the candidate
    left the admissible set).
    """
    cdef Py_ssize_t M = x.shape[0] - 1
    if x_old.shape[0] != M + 1 or mass_over_tau.shape[0] != M + 1 or f0_edge.shape[0] != M:
        raise ValueError("field lengths inconsistent with grid")
    r_arr = np.zeros(M + 1)
    lo_arr = np.zeros(M + 1)
    di_arr = np.zeros(M + 1)
    up_arr = np.zeros(M + 1)
    phi_arr = np.empty(M)
    c_arr = np.empty(M)
    cdef double[::1] r = r_arr
    cdef double[::1] lo = lo_arr
    cdef double[::1] di = di_arr
    cdef double[::1] up = up_arr
    cdef double[::1] phi = phi_arr
    cdef double[::1] c = c_arr
    cdef Py_ssize_t i
    cdef double D, hh = h * h
    for i in range(M):
        D = (x[i + 1] - x[i]) / h
        if D <= 0.0:
            raise ValueError("nonpositive cell stretch")
        phi[i] = f0_edge[i] / D
        c[i] = f0_edge[i] / (D * D * hh)
    for i in range(1, M):
        r[i] = mass_over_tau[i] * (x[i] - x_old[i]) + (phi[i] - phi[i - 1]) / h
        di[i] = mass_over_tau[i] + c[i] + c[i - 1]
        lo[i] = -c[i - 1]
        up[i] = -c[i]
    return r_arr, lo_arr, di_arr, up_arr, phi_arr


def elastic_system(const double[::1] x_old, const double[::1] mass_over_tau,
                   const double[::1] edge_coef, double b_left, double b_right):
    """Tridiagonal system of the linear elastic scheme for interior unknowns.

    ``edge_coef`` is 1/(h^2 f0_edge); ``b_left``/``b_right`` are the pinned
    endpoint positions, eliminated into the right-hand side.
    Returns (lower, diag, upper, rhs) sized for a direct Thomas solve.
    """
    cdef Py_ssize_t M = x_old.shape[0] - 1
    cdef Py_ssize_t n = M - 1
    if mass_over_tau.shape[0] != M + 1 or edge_coef.shape[0] != M:
        raise ValueError("field lengths inconsistent with grid")
    lo_arr = np.empty(n - 1 if n > 1 else 0)
    di_arr = np.empty(n)
    up_arr = np.empty(n - 1 if n > 1 else 0)
    rhs_arr = np.empty(n)
    cdef double[::1] lo = lo_arr
    cdef double[::1] di = di_arr
    cdef double[::1] up = up_arr
    cdef double[::1] rhs = rhs_arr
    cdef Py_ssize_t i, k
    for i in range(1, M):
        k = i - 1
        di[k] = mass_over_tau[i] + edge_coef[i] + edge_coef[i - 1]
        rhs[k] = mass_over_tau[i] * x_old[i]
        if i > 1:
            lo[k - 1] = -edge_coef[i - 1]
        if i < M - 1:
            up[k] = -edge_coef[i]
    rhs[0] += edge_coef[0] * b_left
    rhs[n - 1] += edge_coef[M - 1] * b_right
    return lo_arr, di_arr, up_arr, rhs_arr
