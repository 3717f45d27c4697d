"""Kernel backend selection.

``CCEXPLORE_BACKEND=numpy`` forces the pure-numpy kernels; anything else
(or unset) uses numba when it imports cleanly.
"""
import os

BACKEND_ENV = "CCEXPLORE_BACKEND"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    if value == "numba" and not HAS_NUMBA:
        return "numpy"
    return value
