"""Small numeric helpers shared by the schemes."""
from __future__ import annotations

import numpy as np

__all__ = ["elementwise_pow"]


def elementwise_pow(v: np.ndarray, p: float) -> np.ndarray:
    """v**p with fast paths for the small integer exponents the schemes hit.

    General float exponents fall through to np.power, which dominates the
    per-step cost for fractional m; integer exponents (m = 2, 3, 5, ...)
    reduce to a few multiplies.
    """
    v = np.asarray(v, dtype=float)
    if p == 0.0:
        return np.ones_like(v)
    if p == 1.0:
        return v.copy()
    if p == -1.0:
        return 1.0 / v
    if p == 0.5:
        return np.sqrt(v)
    if p == int(p) and abs(p) <= 8:
        n = int(abs(p))
        out = v
        acc = np.ones_like(v)
        # exponentiation by squaring on small n
        while n > 0:
            if n & 1:
                acc = acc * out
            n >>= 1
            if n:
                out = out * out
        return 1.0 / acc if p < 0 else acc
    return np.power(v, p)
