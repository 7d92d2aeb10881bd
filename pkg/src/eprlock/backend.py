"""Numba backend selection for the hot kernels.

The per-sample servo loop and the RK4 cavity integrator are JIT-compiled
with numba by default. Setting the environment variable
``EPRLOCK_NO_NUMBA=1`` (checked once, at import) selects the pure-Python
fallback implementations instead; ``benchmarks/bench_kernels.py`` compares
the two paths.
"""

from __future__ import annotations

import os

ENV_FLAG = "EPRLOCK_NO_NUMBA"


def _want_numba() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("1", "true", "yes")


NUMBA_ENABLED = False
if _want_numba():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _njit = None


def maybe_jit(func):
    """Return a jitted version of ``func``, or ``func`` itself if disabled."""
    if NUMBA_ENABLED:
        return _njit(cache=True)(func)
    return func
