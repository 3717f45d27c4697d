"""Seeded, splittable random streams and the two samplers built on them.

Every stream is addressed by a root seed plus a derivation path, typically
``(trial, iteration, purpose)``. The path is fed to ``SeedSequence`` as its
spawn key, so distinct paths give independent PCG64 generators and the same
path always reproduces the same draws, whatever order streams are created in.

Normal variates come from ``Generator.standard_normal`` (ziggurat, exact
tails); this is recorded in run metadata as :data:`NORMAL_METHOD`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problem import BoxDomain, DisturbanceKind, DisturbanceModel

DEFAULT_SEED = 20190521
NORMAL_METHOD = "numpy PCG64 + Generator.standard_normal (ziggurat)"

_U64 = 1 << 64


class Purpose(enum.IntEnum):
    INIT = 0
    DECISIONS = 1
    DISTURBANCES = 2
    ORACLE = 3
    SCENARIOS = 4
    SEARCH_POINTS = 5
    NEIGHBORHOOD = 6


@dataclass(frozen=True)
class RngStream:
    seed: int
    path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.seed) < _U64):
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        for key in self.path:
            if not (0 <= int(key) < _U64):
                raise ValueError(f"stream path entries must be unsigned 64-bit, got {self.path}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "path", tuple(int(k) for k in self.path))

    def child(self, *keys) -> RngStream:
        return RngStream(self.seed, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))


def stream_for(seed: int, trial: int, iteration: int, purpose: Purpose) -> RngStream:
    return RngStream(seed, (trial, iteration, int(purpose)))


def _generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return stream.generator()


def sample_decisions(domain: BoxDomain, count: int, stream) -> np.ndarray:
    """``count`` i.i.d. uniform points in the box, as a (count, n_u) array."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _generator(stream)
    return rng.uniform(domain.lower, domain.upper, size=(count, domain.dim))


def sample_disturbances(model: DisturbanceModel, count: int, stream) -> np.ndarray:
    """``count`` i.i.d. disturbance samples, as a (count, n_delta) array."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _generator(stream)
    if model.kind is DisturbanceKind.STANDARD_NORMAL:
        return rng.standard_normal((count, model.dim))
    if model.kind is DisturbanceKind.UNIFORM_BOX:
        return rng.uniform(model.box.lower, model.box.upper, size=(count, model.dim))
    if model.kind is DisturbanceKind.SAMPLER:
        out = np.asarray(model.sampler(rng, count), dtype=float).reshape(count, model.dim)
        return out
    raise ValueError(f"unsupported disturbance kind: {model.kind}")
