"""JIT selection.

Hot kernels are compiled with numba unless ``GRIDNAV_DISABLE_JIT`` is set to a
truthy value or numba cannot be imported, in which case the same kernels run
as plain Python over numpy arrays.
"""

import os

_FLAG = os.environ.get("GRIDNAV_DISABLE_JIT", "").strip().lower()

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None

JIT_ENABLED = _njit is not None and _FLAG not in {"1", "true", "yes", "on"}


def kernel(func):
    """Compile ``func`` with numba when JIT is enabled, else return it as is."""
    if JIT_ENABLED:
        return _njit(cache=True)(func)
    return func


def backend_name():
    return "numba" if JIT_ENABLED else "python"
