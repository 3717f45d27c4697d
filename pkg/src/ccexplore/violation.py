"""Empirical violation probabilities.

``h(u, delta) > 0`` counts as a violation; ``h == 0`` is satisfied. The
standard error reported is the binomial one, ``sqrt(v(1 - v) / n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import ChanceConstrainedProblem, EvaluationError
from .sampling import sample_disturbances

ORACLE_MIN_SAMPLES = 100_000
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ViolationEstimate:
    violations: int
    sample_count: int

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not (0 <= self.violations <= self.sample_count):
            raise ValueError(f"violations must lie in [0, {self.sample_count}], got {self.violations}")

    @property
    def v_hat(self) -> float:
        return self.violations / self.sample_count

    @property
    def std_error(self) -> float:
        p = self.v_hat
        return math.sqrt(p * (1.0 - p) / self.sample_count)

    def to_dict(self) -> dict:
        return {
            "violations": self.violations,
            "sample_count": self.sample_count,
            "v_hat": self.v_hat,
            "std_error": self.std_error,
        }


def count_by_matrix(problem: ChanceConstrainedProblem, U, D) -> np.ndarray:
    """Generic violation counter built on the (m, k) constraint matrix."""
    step = max(1, _BLOCK_ELEMENTS // max(len(D), 1))
    out = np.empty(len(U), dtype=np.int64)
    for start in range(0, len(U), step):
        H = problem.constraint_matrix(U[start:start + step], D)
        out[start:start + step] = np.count_nonzero(H > 0.0, axis=1)
    return out


def count_violations(problem: ChanceConstrainedProblem, U, D) -> np.ndarray:
    """Violation counts of every point in ``U`` against the shared batch ``D``.

    Exactly ``len(U) * len(D)`` constraint evaluations; no early exit.
    """
    U = problem.check_points(U)
    D = problem.check_disturbances(D)
    if len(D) == 0:
        raise ValueError("disturbance batch must be non-empty")
    if problem.violation_counter is None:
        return count_by_matrix(problem, U, D)
    counts = np.asarray(problem.violation_counter(U, D), dtype=np.int64)
    if (counts < 0).any():
        j = int(np.argmax(counts < 0))
        # re-evaluate through the checked path to name the offending sample
        problem.constraint_matrix(U[j:j + 1], D)
        raise EvaluationError(f"constraint is non-finite at u={U[j].tolist()}")
    return counts


def indicator(problem: ChanceConstrainedProblem, u, d) -> int:
    from .problem import evaluate_constraint

    return int(evaluate_constraint(problem, u, d) > 0.0)


def estimate_violation(problem: ChanceConstrainedProblem, u, batch) -> ViolationEstimate:
    batch = problem.check_disturbances(batch)
    if len(batch) == 0:
        raise ValueError("disturbance batch must be non-empty")
    count = count_violations(problem, np.asarray(u, dtype=float)[None, :], batch)[0]
    return ViolationEstimate(int(count), len(batch))


def oracle_violation(problem: ChanceConstrainedProblem, u, n: int, stream) -> ViolationEstimate:
    """High-sample estimate of V(u) from a dedicated stream; evaluation only."""
    if n < ORACLE_MIN_SAMPLES:
        raise ValueError(f"oracle estimates need n >= {ORACLE_MIN_SAMPLES}, got {n}")
    batch = sample_disturbances(problem.disturbance, n, stream)
    return estimate_violation(problem, u, batch)
