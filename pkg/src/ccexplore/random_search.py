"""Classical random search with greedy acceptance.

Each step draws one candidate from a neighbourhood of the incumbent and
keeps it only on strict improvement. Draws that leave the box are redrawn
up to ``MAX_RETRIES`` times; after that the step is skipped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .problem import BoxDomain, EvaluationError
from .sampling import DEFAULT_SEED, RngStream

MAX_RETRIES = 100


@dataclass(frozen=True)
class NeighborhoodSpec:
    """``radius`` bounds the squared distance: ``||v' - v||^2 < radius``.

    ``uniform-ball`` samples uniformly in that open ball. ``normal-isotropic``
    uses a Gaussian step with per-axis standard deviation ``sqrt(radius)``.
    """

    radius: float
    distribution: str = "uniform-ball"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("neighbourhood radius must be positive")
        if self.distribution not in ("uniform-ball", "normal-isotropic"):
            raise ValueError(f"unknown neighbourhood distribution {self.distribution!r}")

    def draw(self, rng: np.random.Generator, center: np.ndarray) -> np.ndarray:
        n = center.size
        scale = np.sqrt(self.radius)
        if self.distribution == "normal-isotropic":
            return center + scale * rng.standard_normal(n)
        while True:
            direction = rng.standard_normal(n)
            norm = np.linalg.norm(direction)
            if norm > 0:
                break
        r = scale * rng.random() ** (1.0 / n)
        return center + direction / norm * r


@dataclass(frozen=True)
class SearchConfig:
    neighborhood: NeighborhoodSpec
    max_iterations: int = 1000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class SearchResult:
    point: np.ndarray
    cost: float
    history: list = field(default_factory=list)
    skipped: int = 0


def _scalar_cost(cost, v):
    value = float(cost(v))
    if not np.isfinite(value):
        raise EvaluationError(f"cost is non-finite ({value}) at v={v.tolist()}")
    return value


def random_optimize(cost, domain: BoxDomain, config: SearchConfig, stream=None) -> SearchResult:
    """Minimize scalar ``cost(v)`` over ``domain`` by random local search.

    ``history`` holds the incumbent cost after initialization and after each
    iteration, so it has ``max_iterations + 1`` entries.
    """
    rng = (stream if stream is not None else RngStream(config.seed)).generator()
    v = rng.uniform(domain.lower, domain.upper)
    fv = _scalar_cost(cost, v)
    history = [fv]
    skipped = 0
    for _ in range(config.max_iterations):
        for _attempt in range(MAX_RETRIES):
            candidate = config.neighborhood.draw(rng, v)
            if domain.contains(candidate):
                break
        else:
            skipped += 1
            history.append(fv)
            continue
        fc = _scalar_cost(cost, candidate)
        if fc < fv:
            v, fv = candidate, fc
        history.append(fv)
    return SearchResult(point=v, cost=fv, history=history, skipped=skipped)
