"""Optional numba acceleration.

Kernels are written in the subset of Python that numba compiles.  Setting
``WRP_NO_NUMBA=1`` (or running without numba installed) leaves them as plain
numpy/Python functions with identical results.
"""
import os

USE_NUMBA = os.environ.get("WRP_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def kernel(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn
