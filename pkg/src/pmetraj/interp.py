"""Shape-preserving piecewise-cubic Hermite interpolation.

Node slopes follow the Fritsch-Carlson recipe: zero at local extrema of the
data, the interval-weighted harmonic mean of adjacent secants elsewhere, and
clipped three-point estimates at the ends.  The resulting cubic is monotone
on every data interval, so interpolated values never overshoot or undershoot
the local data range; that is what makes it safe for rebuilding a density
profile from two merging supports.
"""
from __future__ import annotations

import numpy as np

__all__ = ["MonotoneCubic"]


def _edge_slope(h0: float, h1: float, d0: float, d1: float) -> float:
    # non-centered three-point estimate, clipped to preserve shape
    s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
    if s * d0 <= 0.0:
        return 0.0
    if d0 * d1 < 0.0 and abs(s) > 3.0 * abs(d0):
        return 3.0 * d0
    return s


class MonotoneCubic:
    """Monotonicity- and range-preserving cubic Hermite interpolant."""

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("need equally sized 1-d data with at least two points")
        if np.any(x[1:] <= x[:-1]):
            raise ValueError("abscissae must be strictly increasing")
        self.x = x
        self.y = y
        h = np.diff(x)
        delta = np.diff(y) / h
        n = x.size
        d = np.zeros(n)
        if n == 2:
            d[:] = delta[0]
        else:
            dl, dr = delta[:-1], delta[1:]
            hl, hr = h[:-1], h[1:]
            w1 = 2.0 * hr + hl
            w2 = hr + 2.0 * hl
            with np.errstate(divide="ignore", invalid="ignore"):
                harm = (w1 + w2) / (w1 / dl + w2 / dr)
            keep = dl * dr > 0.0
            d[1:-1] = np.where(keep, harm, 0.0)
            d[0] = _edge_slope(h[0], h[1], delta[0], delta[1])
            d[-1] = _edge_slope(h[-1], h[-2], delta[-1], delta[-2])
        self.d = d
        self._h = h

    def __call__(self, xq):
        xq = np.asarray(xq, dtype=float)
        scalar = xq.ndim == 0
        xq = np.atleast_1d(xq)
        j = np.clip(np.searchsorted(self.x, xq, side="right") - 1, 0, self.x.size - 2)
        hj = self._h[j]
        t = (xq - self.x[j]) / hj
        t2 = t * t
        t3 = t2 * t
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + t
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        out = (
            h00 * self.y[j]
            + h10 * hj * self.d[j]
            + h01 * self.y[j + 1]
            + h11 * hj * self.d[j + 1]
        )
        return float(out[0]) if scalar else out
