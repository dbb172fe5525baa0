"""Backend selection for the hot kernels.

Set ``RMPOLY_BACKEND=numpy`` to force the pure-numpy implementations even
when numba is importable. Any other value (or unset) means "numba if
available".
"""

import os
import warnings

__all__ = ["BACKEND", "HAVE_NUMBA", "njit", "PerformanceWarning"]


class PerformanceWarning(UserWarning):
    pass


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("RMPOLY_BACKEND", "numba").strip().lower()

if _requested == "numpy":
    BACKEND = "numpy"
elif HAVE_NUMBA:
    BACKEND = "numba"
else:  # pragma: no cover
    warnings.warn("numba is not available; using numpy kernels", PerformanceWarning)
    BACKEND = "numpy"


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise.

    The compiled twin is only *called* when ``BACKEND == "numba"``; compiling
    is lazy, so decorating costs nothing under the numpy backend.
    """
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
