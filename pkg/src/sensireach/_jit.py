"""Backend switch for the hot numeric kernels.

Kernels are written in the numpy subset numba understands. With numba
available they are compiled with ``njit(nogil=True)``; setting
``SENSIREACH_DISABLE_NUMBA=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``)
keeps them as plain numpy functions. The flag is read once at import.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

USE_NUMBA = numba is not None and not _flag("SENSIREACH_DISABLE_NUMBA") and not _flag("NUMBA_DISABLE_JIT")
BACKEND = "numba" if USE_NUMBA else "numpy"


def kernel(func):
    """Compile ``func`` with numba when the numba backend is active."""
    if USE_NUMBA:
        return numba.njit(nogil=True)(func)
    return func


def is_compiled(func):
    return USE_NUMBA and isinstance(func, numba.core.registry.CPUDispatcher)


def python_impl(func):
    """The uncompiled body of a kernel (identity on plain functions)."""
    return getattr(func, "py_func", func)
