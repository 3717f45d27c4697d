"""Chance-constrained problem abstraction and the built-in benchmark.

A problem minimizes ``J(u)`` over a box subject to
``Pr{h(u, delta) <= 0} >= 1 - alpha``. Cost and constraint are carried as
vectorized callables:

* ``cost(U)`` maps an (m, n_u) array of decisions to an (m,) array.
* ``constraint(U, D)`` maps (m, n_u) decisions and (k, n_delta) disturbances
  to the (m, k) matrix of ``h`` values.

Problems may additionally provide fast paths for violation counting and
scenario checking (see :class:`ChanceConstrainedProblem`).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np

from . import kernels


class EvaluationError(RuntimeError):
    """A cost or constraint evaluation produced a non-finite value."""


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class BoxDomain:
    """Closed box ``[lower, upper]`` in decision space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).ravel()
        upper = np.array(self.upper, dtype=float).ravel()
        if lower.size < 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be non-empty and of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError(f"degenerate box: need lower < upper, got {lower} / {upper}")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, U) -> np.ndarray | bool:
        """Inclusive membership test for one point or an (m, n) array."""
        U = np.asarray(U, dtype=float)
        inside = np.logical_and(U >= self.lower, U <= self.upper).all(axis=-1)
        return bool(inside) if inside.ndim == 0 else inside

    def __eq__(self, other):
        return (
            isinstance(other, BoxDomain)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


class DisturbanceKind(enum.Enum):
    STANDARD_NORMAL = "standard-normal-iid"
    UNIFORM_BOX = "uniform-box"
    SAMPLER = "user-supplied-sampler"


@dataclass(frozen=True)
class DisturbanceModel:
    kind: DisturbanceKind
    dim: int = 1
    box: Optional[BoxDomain] = None
    # sampler(generator, count) -> (count, dim) array
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("disturbance dimension must be >= 1")
        if self.kind is DisturbanceKind.UNIFORM_BOX:
            if self.box is None or self.box.dim != self.dim:
                raise ValueError("uniform-box disturbances need a box of matching dimension")
        if self.kind is DisturbanceKind.SAMPLER and self.sampler is None:
            raise ValueError("user-supplied-sampler disturbances need a sampler")

    @classmethod
    def standard_normal(cls, dim: int = 1) -> DisturbanceModel:
        return cls(DisturbanceKind.STANDARD_NORMAL, dim)

    @classmethod
    def uniform(cls, lower, upper) -> DisturbanceModel:
        box = BoxDomain(lower, upper)
        return cls(DisturbanceKind.UNIFORM_BOX, box.dim, box=box)


@dataclass(frozen=True)
class ChanceConstrainedProblem:
    """Minimize ``cost`` over ``domain`` with ``Pr{constraint > 0} <= alpha``.

    ``violation_counter(U, D)`` and ``scenario_checker(U, D)`` are optional
    fast paths. The counter returns int64 violation counts per row of ``U``
    (-1 flags a non-finite constraint value); the checker returns
    ``(feasible, checked)`` with the same sentinel in ``checked``. When
    absent, both are derived from ``constraint``.
    """

    domain: BoxDomain
    cost: Callable[[np.ndarray], np.ndarray]
    constraint: Callable[[np.ndarray, np.ndarray], np.ndarray]
    disturbance: DisturbanceModel
    alpha: float
    name: str = "custom"
    violation_counter: Optional[Callable] = field(default=None, compare=False)
    scenario_checker: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")

    @property
    def n_u(self) -> int:
        return self.domain.dim

    @property
    def n_delta(self) -> int:
        return self.disturbance.dim

    def check_points(self, U) -> np.ndarray:
        U = np.ascontiguousarray(U, dtype=float)
        if U.ndim == 1:
            U = U[None, :]
        if U.ndim != 2 or U.shape[1] != self.n_u:
            raise DimensionError(f"decision points must have {self.n_u} coordinates, got shape {U.shape}")
        return U

    def check_disturbances(self, D) -> np.ndarray:
        D = np.ascontiguousarray(D, dtype=float)
        if D.ndim == 1 and self.n_delta == 1:
            D = D[:, None]
        elif D.ndim == 1:
            D = D[None, :]
        if D.ndim != 2 or D.shape[1] != self.n_delta:
            raise DimensionError(
                f"disturbance samples must have {self.n_delta} coordinates, got shape {D.shape}"
            )
        return D

    def costs(self, U) -> np.ndarray:
        """Vectorized cost with the non-finite check applied."""
        U = self.check_points(U)
        values = np.asarray(self.cost(U), dtype=float)
        bad = ~np.isfinite(values)
        if bad.any():
            j = int(np.argmax(bad))
            raise EvaluationError(f"cost is non-finite ({values[j]}) at u={U[j].tolist()}")
        return values

    def constraint_matrix(self, U, D) -> np.ndarray:
        U = self.check_points(U)
        D = self.check_disturbances(D)
        H = np.asarray(self.constraint(U, D), dtype=float)
        if not np.isfinite(H).all():
            j, q = np.argwhere(~np.isfinite(H))[0]
            raise EvaluationError(
                f"constraint is non-finite at u={U[j].tolist()}, delta={D[q].tolist()}"
            )
        return H


def evaluate_cost(problem: ChanceConstrainedProblem, u) -> float:
    """J(u) for a single in-domain decision point."""
    u = np.asarray(u, dtype=float)
    if u.shape != (problem.n_u,):
        raise DimensionError(f"expected a point with {problem.n_u} coordinates, got shape {u.shape}")
    if not problem.domain.contains(u):
        raise ValueError(f"u={u.tolist()} lies outside the decision domain")
    return float(problem.costs(u)[0])


def evaluate_constraint(problem: ChanceConstrainedProblem, u, d) -> float:
    """h(u, delta) for a single decision and a single disturbance sample."""
    u = np.asarray(u, dtype=float)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if u.shape != (problem.n_u,):
        raise DimensionError(f"expected a point with {problem.n_u} coordinates, got shape {u.shape}")
    if d.shape != (problem.n_delta,):
        raise DimensionError(
            f"expected a disturbance with {problem.n_delta} coordinates, got shape {d.shape}"
        )
    return float(problem.constraint_matrix(u[None, :], d[None, :])[0, 0])


def from_pointwise(domain, cost_fn, constraint_fn, disturbance, alpha, name="custom"):
    """Build a problem from scalar ``cost_fn(u)`` and ``constraint_fn(u, d)``.

    Convenient for user problems; the loops are Python-speed.
    """

    def cost(U):
        return np.array([cost_fn(u) for u in U], dtype=float)

    def constraint(U, D):
        return np.array([[constraint_fn(u, d) for d in D] for u in U], dtype=float).reshape(
            len(U), len(D)
        )

    return ChanceConstrainedProblem(
        domain=domain,
        cost=cost,
        constraint=constraint,
        disturbance=disturbance,
        alpha=alpha,
        name=name,
    )


# -- the polynomial benchmark -------------------------------------------------

BENCHMARK_NAME = "paper-nonconvex-2d"
BENCHMARK_A = (1.5, 2.0)
BENCHMARK_B = (2.0, 3.0)


def _poly_cost(U):
    return kernels.poly_cost(np.ascontiguousarray(U, dtype=float))


def _poly_constraint(a, b, U, D):
    return kernels.poly_constraint(
        np.ascontiguousarray(U, dtype=float), np.ascontiguousarray(D[:, 0]), a, b
    )


def _poly_counter(a, b, U, D):
    return kernels.poly_violation_counts(
        np.ascontiguousarray(U, dtype=float), np.ascontiguousarray(D[:, 0]), a, b
    )


def _poly_checker(a, b, U, D):
    return kernels.poly_scenario_check(
        np.ascontiguousarray(U, dtype=float), np.ascontiguousarray(D[:, 0]), a, b
    )


def make_polynomial_problem(a, b, lower, upper, alpha, name="polynomial"):
    """Quartic-well problem family with a scalar N(0, 1) disturbance.

    cost:       sum_i ((u_i + 0.5)^4 - 30 u_i^2 - 20 u_i) / 100
    constraint: sum_i (0.05 t_i^4 - b_i t_i^2) - (1 - 0.1 delta)^2,
                with t_i = u_i - a_i delta
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    domain = BoxDomain(lower, upper)
    if a.shape != (domain.dim,) or b.shape != (domain.dim,):
        raise DimensionError("coefficient vectors must match the domain dimension")
    return ChanceConstrainedProblem(
        domain=domain,
        cost=_poly_cost,
        constraint=partial(_poly_constraint, a, b),
        disturbance=DisturbanceModel.standard_normal(1),
        alpha=alpha,
        name=name,
        violation_counter=partial(_poly_counter, a, b),
        scenario_checker=partial(_poly_checker, a, b),
    )


def make_benchmark() -> ChanceConstrainedProblem:
    """The non-convex 2-D benchmark on [-6, 5]^2 with alpha = 0.05."""
    return make_polynomial_problem(
        BENCHMARK_A, BENCHMARK_B, (-6.0, -6.0), (5.0, 5.0), alpha=0.05, name=BENCHMARK_NAME
    )


PROBLEMS = {BENCHMARK_NAME: make_benchmark}


def get_problem(name: str) -> ChanceConstrainedProblem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {sorted(PROBLEMS)}") from None
