"""numba twins of the numpy kernels in ``_kernels_numpy``."""
import os

import numba as nb
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old and warns on every import; try OpenMP first
    nb.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

kwd = {"cache": True, "fastmath": False}


@nb.njit(**kwd)
def poly_cost(U):
    m, n = U.shape
    out = np.empty(m)
    for j in range(m):
        total = 0.0
        for i in range(n):
            x = U[j, i]
            s = x + 0.5
            s2 = s * s
            total += s2 * s2 - 30.0 * x * x - 20.0 * x
        out[j] = total / 100.0
    return out


@nb.njit(**kwd)
def _poly_h(U, j, dk, a, b):
    h = 0.0
    for i in range(U.shape[1]):
        t = U[j, i] - a[i] * dk
        t2 = t * t
        h += 0.05 * t2 * t2 - b[i] * t2
    s = 1.0 - 0.1 * dk
    return h - s * s


@nb.njit(parallel=True, **kwd)
def poly_constraint(U, d, a, b):
    m = U.shape[0]
    k = d.shape[0]
    out = np.empty((m, k))
    for j in nb.prange(m):
        for q in range(k):
            out[j, q] = _poly_h(U, j, d[q], a, b)
    return out


@nb.njit(parallel=True, **kwd)
def poly_violation_counts(U, d, a, b):
    m = U.shape[0]
    out = np.empty(m, dtype=np.int64)
    for j in nb.prange(m):
        c = 0
        for q in range(d.shape[0]):
            h = _poly_h(U, j, d[q], a, b)
            if not np.isfinite(h):
                c = -1
                break
            if h > 0.0:
                c += 1
        out[j] = c
    return out


@nb.njit(parallel=True, **kwd)
def poly_scenario_check(U, d, a, b):
    m = U.shape[0]
    k = d.shape[0]
    feasible = np.ones(m, dtype=np.bool_)
    checked = np.full(m, k, dtype=np.int64)
    for j in nb.prange(m):
        for q in range(k):
            h = _poly_h(U, j, d[q], a, b)
            if not np.isfinite(h):
                feasible[j] = False
                checked[j] = -1
                break
            if h > 0.0:
                feasible[j] = False
                checked[j] = q + 1
                break
    return feasible, checked
