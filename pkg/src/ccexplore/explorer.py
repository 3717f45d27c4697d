"""Two-layer randomized optimizer exploration.

Each iteration draws a batch of decision candidates uniformly over the box
and one shared batch of disturbances, discards every candidate whose
empirical violation probability exceeds ``alpha - alpha_margin``, and
offers the cheapest survivor to the incumbent. The incumbent is replaced
only on strict cost improvement.

The incumbent starts with cost +inf, so the first surviving candidate is
always taken and the result is never an unchecked random point. An
iteration with no survivors keeps the incumbent and moves on.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problem import ChanceConstrainedProblem, EvaluationError
from .sampling import DEFAULT_SEED, Purpose, sample_decisions, sample_disturbances, stream_for
from .violation import ViolationEstimate, count_violations

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplorerConfig:
    n_decisions: int = 100
    n_disturbances: int = 1000
    alpha_margin: float = 0.005
    max_iterations: int = 50
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("n_decisions", "n_disturbances", "max_iterations"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")

    def validate(self, problem: ChanceConstrainedProblem):
        if not (0.0 < self.alpha_margin < problem.alpha):
            raise ValueError(
                f"alpha_margin must lie in (0, alpha={problem.alpha}), got {self.alpha_margin}"
            )

    def threshold(self, problem: ChanceConstrainedProblem) -> float:
        return problem.alpha - self.alpha_margin


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    n_feasible: int
    accepted: bool
    best_point: Optional[np.ndarray] = None
    best_cost: Optional[float] = None
    best_estimate: Optional[ViolationEstimate] = None
    incumbent_point: Optional[np.ndarray] = None
    incumbent_cost: float = math.inf
    incumbent_estimate: Optional[ViolationEstimate] = None


@dataclass
class ExplorerTrace:
    records: list = field(default_factory=list)
    initial_point: Optional[np.ndarray] = None
    point: Optional[np.ndarray] = None
    cost: float = math.inf
    estimate: Optional[ViolationEstimate] = None
    constraint_evaluations: int = 0

    @property
    def failed(self) -> bool:
        """True when no candidate ever survived the filter."""
        return self.point is None

    def incumbent_costs(self) -> list:
        return [r.incumbent_cost for r in self.records]

    def to_dict(self) -> dict:
        return {
            "failed": self.failed,
            "point": None if self.point is None else self.point.tolist(),
            "cost": None if self.failed else self.cost,
            "estimate": None if self.estimate is None else self.estimate.to_dict(),
            "iterations": len(self.records),
            "constraint_evaluations": self.constraint_evaluations,
        }


def _filter_mask(problem, candidates, batch, alpha_margin):
    counts = count_violations(problem, candidates, batch)
    # same division as ViolationEstimate.v_hat, so the two never disagree
    keep = counts / len(batch) <= problem.alpha - alpha_margin
    return keep, counts


def filter_feasible(problem: ChanceConstrainedProblem, candidates, batch, alpha_margin: float):
    """Candidates with ``v_hat <= alpha - alpha_margin``, in input order.

    All candidates are scored against the same batch. Returns a list of
    ``(point, ViolationEstimate)`` pairs.
    """
    candidates = problem.check_points(candidates)
    batch = problem.check_disturbances(batch)
    if len(candidates) == 0 or len(batch) == 0:
        raise ValueError("candidates and batch must be non-empty")
    keep, counts = _filter_mask(problem, candidates, batch, alpha_margin)
    n = len(batch)
    return [(candidates[j], ViolationEstimate(int(counts[j]), n)) for j in np.flatnonzero(keep)]


def explore(problem: ChanceConstrainedProblem, config: ExplorerConfig, trial: int = 0) -> ExplorerTrace:
    """Run the two-layer exploration; streams are derived from (seed, trial, iteration)."""
    config.validate(problem)
    n_d = config.n_disturbances
    limit = config.threshold(problem)
    trace = ExplorerTrace()
    trace.initial_point = sample_decisions(
        problem.domain, 1, stream_for(config.seed, trial, 0, Purpose.INIT)
    )[0]

    inc_point, inc_cost, inc_est = None, math.inf, None
    for it in range(config.max_iterations):
        candidates = sample_decisions(
            problem.domain, config.n_decisions, stream_for(config.seed, trial, it, Purpose.DECISIONS)
        )
        batch = sample_disturbances(
            problem.disturbance, n_d, stream_for(config.seed, trial, it, Purpose.DISTURBANCES)
        )
        try:
            counts = count_violations(problem, candidates, batch)
            trace.constraint_evaluations += len(candidates) * n_d
            keep = np.flatnonzero(counts / n_d <= limit)
            best_point = best_cost = best_est = None
            accepted = False
            if keep.size:
                costs = problem.costs(candidates[keep])
                j = int(np.argmin(costs))  # first index on ties
                best_point = candidates[keep[j]]
                best_cost = float(costs[j])
                best_est = ViolationEstimate(int(counts[keep[j]]), n_d)
                if best_cost < inc_cost:
                    inc_point, inc_cost, inc_est = best_point, best_cost, best_est
                    accepted = True
        except EvaluationError as exc:
            raise EvaluationError(f"trial {trial}, iteration {it}: {exc}") from exc

        trace.records.append(
            IterationRecord(
                iteration=it,
                n_feasible=int(keep.size),
                accepted=accepted,
                best_point=best_point,
                best_cost=best_cost,
                best_estimate=best_est,
                incumbent_point=inc_point,
                incumbent_cost=inc_cost,
                incumbent_estimate=inc_est,
            )
        )
        logger.debug(
            "trial %d iter %d: %d feasible, incumbent cost %s%s",
            trial, it, keep.size, inc_cost, " (accepted)" if accepted else "",
        )

    trace.point, trace.cost, trace.estimate = inc_point, inc_cost, inc_est
    return trace


def write_trace_csv(trace: ExplorerTrace, path, n_u: int):
    """Per-iteration incumbent history; empty fields while no incumbent exists."""
    header = ["iter", "n_feasible", "accepted"] + [f"u_{i + 1}" for i in range(n_u)] + ["cost", "v_hat"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in trace.records:
            if r.incumbent_point is None:
                tail = [""] * (n_u + 2)
            else:
                tail = [_fmt(x) for x in r.incumbent_point]
                tail += [_fmt(r.incumbent_cost), _fmt(r.incumbent_estimate.v_hat)]
            writer.writerow([r.iteration, r.n_feasible, int(r.accepted)] + tail)


def _fmt(x) -> str:
    return format(float(x), ".17g")
