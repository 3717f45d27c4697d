"""Hot inner loops, dispatched to numba or numpy per ``CCEXPLORE_BACKEND``.

All kernels take contiguous float64 arrays: points ``U`` of shape (m, n_u),
scalar disturbances ``d`` of shape (k,), and per-coordinate coefficients
``a`` and ``b`` of shape (n_u,).
"""
from . import _kernels_numpy
from ._backend import requested_backend

BACKEND = requested_backend()

if BACKEND == "numba":
    from . import _kernels_numba as _impl
else:
    _impl = _kernels_numpy

poly_cost = _impl.poly_cost
poly_constraint = _impl.poly_constraint
poly_violation_counts = _impl.poly_violation_counts
poly_scenario_check = _impl.poly_scenario_check

__all__ = [
    "BACKEND",
    "poly_cost",
    "poly_constraint",
    "poly_violation_counts",
    "poly_scenario_check",
]
