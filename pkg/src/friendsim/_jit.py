"""Backend selection for the Monte Carlo kernels.

Set ``FRIENDSIM_DISABLE_JIT=1`` before import to force the pure-numpy
kernels.  If numba cannot be imported the numpy path is used as well.
"""

import os

_FLAG = "FRIENDSIM_DISABLE_JIT"

USE_NUMBA = os.environ.get(_FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if not USE_NUMBA:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
