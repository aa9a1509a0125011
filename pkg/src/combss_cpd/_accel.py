"""Optional numba acceleration.

Hot kernels are written once in numba-compatible numpy and decorated with
:func:`njit`.  Setting ``COMBSS_CPD_DISABLE_NUMBA=1`` (or running without
numba installed) leaves them as plain Python functions.
"""
import os

_DISABLED = os.environ.get("COMBSS_CPD_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
}

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def njit(func):
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(func)
    return func
