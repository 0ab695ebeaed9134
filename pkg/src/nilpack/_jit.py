"""Optional numba acceleration.

Set ``NILPACK_DISABLE_NUMBA=1`` to run every kernel on the pure Python /
numpy path. The flag is read once at import time.
"""
from __future__ import annotations

import os

_FALSE = {"", "0", "false", "no", "off"}

DISABLED = os.environ.get("NILPACK_DISABLE_NUMBA", "").strip().lower() not in _FALSE

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(fn):
    """``numba.njit(cache=True)`` when enabled, the identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
