"""Scenario-approach baseline.

The chance constraint is replaced by ``h(u, delta_i) <= 0`` for N drawn
scenarios. The sampled program is solved by dense random search: M uniform
points, keep those satisfying every scenario, return the cheapest. That
makes no convexity assumption, which the non-convex benchmark needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import ChanceConstrainedProblem, EvaluationError
from .sampling import DEFAULT_SEED, Purpose, sample_decisions, sample_disturbances, stream_for


def scenario_bound(alpha: float, beta: float, n_u: int) -> int:
    """Smallest scenario count N with confidence ``1 - beta`` of violation <= alpha.

    ``N >= (2/alpha) ln(1/beta) + 2 n_u + (2 n_u/alpha) ln(2/alpha)``
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if int(n_u) != n_u or n_u < 1:
        raise ValueError(f"n_u must be a positive integer, got {n_u}")
    value = (2.0 / alpha) * math.log(1.0 / beta) + 2 * n_u + (2.0 * n_u / alpha) * math.log(2.0 / alpha)
    return math.ceil(value)


@dataclass(frozen=True)
class ScenarioConfig:
    n_scenarios: int = 100
    inner_search_points: int = 100_000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_scenarios < 1:
            raise ValueError("n_scenarios must be >= 1")
        if self.inner_search_points < 1:
            raise ValueError("inner_search_points must be >= 1")


@dataclass
class ScenarioResult:
    point: Optional[np.ndarray]
    cost: float
    n_scenarios: int
    n_search_points: int
    n_scenario_feasible: int
    # scenario evaluations actually performed (the check stops at the first violated scenario)
    checks: int

    @property
    def failed(self) -> bool:
        return self.point is None

    def to_dict(self) -> dict:
        return {
            "failed": self.failed,
            "point": None if self.point is None else self.point.tolist(),
            "cost": None if self.failed else self.cost,
            "n_scenarios": self.n_scenarios,
            "n_search_points": self.n_search_points,
            "n_scenario_feasible": self.n_scenario_feasible,
            "checks": self.checks,
        }


def scenario_feasibility(problem: ChanceConstrainedProblem, U, scenarios):
    """Which points satisfy every scenario, plus scenarios checked per point."""
    U = problem.check_points(U)
    if len(scenarios) == 0:
        return np.ones(len(U), dtype=bool), np.zeros(len(U), dtype=np.int64)
    scenarios = problem.check_disturbances(scenarios)
    if problem.scenario_checker is not None:
        feasible, checked = problem.scenario_checker(U, scenarios)
        feasible = np.asarray(feasible, dtype=bool)
        checked = np.asarray(checked, dtype=np.int64)
        if (checked < 0).any():
            j = int(np.argmax(checked < 0))
            raise EvaluationError(f"constraint is non-finite at u={U[j].tolist()}")
        return feasible, checked
    H = problem.constraint_matrix(U, scenarios)
    violated = H > 0.0
    hit = violated.any(axis=1)
    checked = np.where(hit, np.argmax(violated, axis=1) + 1, len(scenarios))
    return ~hit, checked.astype(np.int64)


def solve_scenario(
    problem: ChanceConstrainedProblem,
    config: ScenarioConfig,
    trial: int = 0,
    scenarios=None,
) -> ScenarioResult:
    """Solve the sampled program for one draw of scenarios.

    ``scenarios`` overrides the drawn set; an empty (0, n_delta) array gives
    the unconstrained minimizer over the search points.
    """
    if scenarios is None:
        scenarios = sample_disturbances(
            problem.disturbance,
            config.n_scenarios,
            stream_for(config.seed, trial, 0, Purpose.SCENARIOS),
        )
    else:
        scenarios = np.asarray(scenarios, dtype=float).reshape(-1, problem.n_delta)
    points = sample_decisions(
        problem.domain,
        config.inner_search_points,
        stream_for(config.seed, trial, 0, Purpose.SEARCH_POINTS),
    )
    feasible, checked = scenario_feasibility(problem, points, scenarios)
    idx = np.flatnonzero(feasible)
    result = ScenarioResult(
        point=None,
        cost=math.inf,
        n_scenarios=len(scenarios),
        n_search_points=len(points),
        n_scenario_feasible=int(idx.size),
        checks=int(checked.sum()),
    )
    if idx.size:
        costs = problem.costs(points[idx])
        j = int(np.argmin(costs))
        result.point = points[idx[j]]
        result.cost = float(costs[j])
    return result
