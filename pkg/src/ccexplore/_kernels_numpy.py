"""Pure-numpy kernels for the polynomial benchmark family.

Arithmetic is written term by term in the same order as the numba kernels
so both backends produce bit-identical constraint values.
"""
import numpy as np

# rows of the (points x samples) block evaluated at once
_BLOCK_ELEMENTS = 1 << 22


def _row_block(n_cols):
    return max(1, _BLOCK_ELEMENTS // max(n_cols, 1))


def poly_cost(U):
    total = np.zeros(U.shape[0])
    for i in range(U.shape[1]):
        x = U[:, i]
        s = x + 0.5
        s2 = s * s
        total += s2 * s2 - 30.0 * x * x - 20.0 * x
    return total / 100.0


def poly_constraint(U, d, a, b):
    h = np.zeros((U.shape[0], d.shape[0]))
    for i in range(U.shape[1]):
        t = U[:, i, None] - a[i] * d[None, :]
        t2 = t * t
        h += 0.05 * t2 * t2 - b[i] * t2
    s = 1.0 - 0.1 * d
    h -= s * s
    return h


def poly_violation_counts(U, d, a, b):
    """Number of samples with h > 0 per point; -1 marks a non-finite h."""
    out = np.empty(U.shape[0], dtype=np.int64)
    step = _row_block(d.shape[0])
    for start in range(0, U.shape[0], step):
        h = poly_constraint(U[start:start + step], d, a, b)
        counts = np.count_nonzero(h > 0.0, axis=1)
        counts[~np.isfinite(h).all(axis=1)] = -1
        out[start:start + step] = counts
    return out


def poly_scenario_check(U, d, a, b):
    """Scan scenarios in order, stopping at the first violated one.

    Returns ``(feasible, checked)``; ``checked[j]`` is the number of scenarios
    evaluated for point j, or -1 when a non-finite value was hit first.
    """
    m, k = U.shape[0], d.shape[0]
    feasible = np.zeros(m, dtype=np.bool_)
    checked = np.full(m, k, dtype=np.int64)
    if k == 0:
        feasible[:] = True
        return feasible, checked
    step = _row_block(k)
    for start in range(0, m, step):
        h = poly_constraint(U[start:start + step], d, a, b)
        stop = (h > 0.0) | ~np.isfinite(h)
        hit = stop.any(axis=1)
        first = np.argmax(stop, axis=1)
        rows = np.arange(h.shape[0])
        bad = hit & ~np.isfinite(h[rows, first])
        chk = np.where(hit, first + 1, k)
        chk[bad] = -1
        feasible[start:start + step] = ~hit
        checked[start:start + step] = chk
    return feasible, checked
