"""Selects between numba-compiled kernels and the plain numpy path.

Set ``LORENTZHOL_DISABLE_NUMBA=1`` to force the pure-numpy path.
"""
import os

DISABLE_FLAG = "LORENTZHOL_DISABLE_NUMBA"


def _numba_requested():
    return os.environ.get(DISABLE_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    if not _numba_requested():
        raise ImportError
    import numba
except ImportError:
    numba = None

USE_NUMBA = numba is not None


def njit(func):
    """Compile with numba when available, otherwise return ``func`` unchanged."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
