"""Backend selection: compiled kernels when available, numpy fallback otherwise.

Set the environment variable ``PMETRAJ_PURE=1`` to force the pure-Python
backend (used by the benchmark to measure the gap).
"""
from __future__ import annotations

import os

_force_pure = os.environ.get("PMETRAJ_PURE", "").strip() not in ("", "0")

if not _force_pure:
    try:
        from ._kernels import elastic_system, entropy_system, thomas

        BACKEND = "compiled"
    except ImportError:
        from .fallback import elastic_system, entropy_system, thomas

        BACKEND = "python"
else:
    from .fallback import elastic_system, entropy_system, thomas

    BACKEND = "python"

__all__ = ["BACKEND", "thomas", "entropy_system", "elastic_system"]
