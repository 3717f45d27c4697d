"""Monte Carlo study harness: repeated independent trials of one method.

Each trial derives its own streams from ``(seed, trial, ...)`` and its
final point is scored by an oracle violation estimate drawn from the
trial's ORACLE stream. Trials are independent, so results do not depend on
the worker count or completion order.
"""
from __future__ import annotations

import csv
import math
import multiprocessing
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__, kernels
from .explorer import ExplorerConfig, explore
from .problem import BENCHMARK_NAME, ChanceConstrainedProblem, EvaluationError, get_problem
from .sampling import DEFAULT_SEED, NORMAL_METHOD, Purpose, stream_for
from .scenario import ScenarioConfig, solve_scenario
from .violation import ORACLE_MIN_SAMPLES, ViolationEstimate, oracle_violation

METHODS = ("two-layer", "scenario")
_U64 = 1 << 64


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


_COMMON_KEYS = ("problem", "method", "trials", "seed", "oracle_n")
_METHOD_KEYS = {
    "two-layer": ("n_decisions", "n_disturbances", "alpha_eps", "iterations"),
    "scenario": ("n_scenarios", "search_points"),
}
_INT_KEYS = {"trials", "seed", "oracle_n", "n_decisions", "n_disturbances", "iterations", "n_scenarios", "search_points"}


@dataclass(frozen=True)
class StudyConfig:
    method: str = "two-layer"
    problem: str = BENCHMARK_NAME
    trials: int = 500
    seed: int = DEFAULT_SEED
    oracle_n: int = 1_000_000
    n_decisions: int = 100
    n_disturbances: int = 1000
    alpha_eps: float = 0.005
    iterations: int = 50
    n_scenarios: int = 100
    search_points: int = 100_000

    @classmethod
    def from_dict(cls, data: dict) -> StudyConfig:
        """Validate a JSON-style mapping; raises :class:`ConfigError`."""
        if not isinstance(data, dict):
            raise ConfigError("config", "expected a JSON object")
        if "config" in data and isinstance(data["config"], dict):
            # a run's meta file doubles as its config
            data = data["config"]
        known = set(_COMMON_KEYS) | {k for keys in _METHOD_KEYS.values() for k in keys}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
        values = {}
        for key, value in data.items():
            if key in _INT_KEYS:
                if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
                    raise ConfigError(key, f"expected an integer, got {value!r}")
                values[key] = int(value)
            elif key == "alpha_eps":
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(key, f"expected a number, got {value!r}")
                values[key] = float(value)
            else:
                if not isinstance(value, str):
                    raise ConfigError(key, f"expected a string, got {value!r}")
                values[key] = value
        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> ChanceConstrainedProblem:
        if self.method not in METHODS:
            raise ConfigError("method", f"must be one of {METHODS}, got {self.method!r}")
        try:
            problem = get_problem(self.problem)
        except KeyError as exc:
            raise ConfigError("problem", exc.args[0]) from None
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if not (0 <= self.seed < _U64):
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.oracle_n < ORACLE_MIN_SAMPLES:
            raise ConfigError("oracle_n", f"must be >= {ORACLE_MIN_SAMPLES}")
        if self.method == "two-layer":
            for key in ("n_decisions", "n_disturbances", "iterations"):
                if getattr(self, key) < 1:
                    raise ConfigError(key, "must be >= 1")
            if not (0.0 < self.alpha_eps < problem.alpha):
                raise ConfigError("alpha_eps", f"must lie in (0, alpha={problem.alpha}), got {self.alpha_eps}")
        else:
            for key in ("n_scenarios", "search_points"):
                if getattr(self, key) < 1:
                    raise ConfigError(key, "must be >= 1")
        return problem

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in _COMMON_KEYS + _METHOD_KEYS[self.method]}

    def explorer_config(self) -> ExplorerConfig:
        return ExplorerConfig(
            n_decisions=self.n_decisions,
            n_disturbances=self.n_disturbances,
            alpha_margin=self.alpha_eps,
            max_iterations=self.iterations,
            seed=self.seed,
        )

    def scenario_config(self) -> ScenarioConfig:
        return ScenarioConfig(
            n_scenarios=self.n_scenarios, inner_search_points=self.search_points, seed=self.seed
        )

    @property
    def label(self) -> str:
        if self.method == "two-layer":
            return f"two-layer, N_delta={self.n_disturbances}"
        return f"scenario, N={self.n_scenarios}"


@dataclass(frozen=True)
class TrialRow:
    trial: int
    failed: bool
    point: Optional[tuple] = None
    cost: float = math.nan
    oracle: Optional[ViolationEstimate] = None
    error: str = ""


@dataclass
class StudyResult:
    rows: list
    alpha: float
    n_u: int
    label: str = ""
    config: Optional[StudyConfig] = None
    traces: dict = field(default_factory=dict)

    @property
    def aggregates(self) -> dict:
        return summarize(self.rows, self.alpha)


def summarize(rows, alpha: float) -> dict:
    ok = [r for r in rows if not r.failed]
    costs = [r.cost for r in ok]
    viols = [r.oracle.v_hat for r in ok]
    n = len(costs)
    if n:
        mean = math.fsum(costs) / n
        std = math.sqrt(math.fsum((c - mean) ** 2 for c in costs) / (n - 1)) if n > 1 else 0.0
        stats = {
            "cost_mean": mean,
            "cost_min": min(costs),
            "cost_max": max(costs),
            "cost_std": std,
            "violation_mean": math.fsum(viols) / n,
        }
    else:
        stats = dict.fromkeys(("cost_mean", "cost_min", "cost_max", "cost_std", "violation_mean"), math.nan)
    within = sum(1 for v in viols if v <= alpha)
    stats.update(
        n_trials=len(rows),
        n_failed=len(rows) - n,
        # failed trials count as not meeting the level
        fraction_within_alpha=within / len(rows) if rows else math.nan,
    )
    return stats


def run_trial(problem: ChanceConstrainedProblem, config: StudyConfig, trial: int, keep_trace: bool = False):
    trace = None
    try:
        if config.method == "two-layer":
            trace = explore(problem, config.explorer_config(), trial=trial)
            point, cost, failed = trace.point, trace.cost, trace.failed
            error = "no candidate passed the violation filter" if failed else ""
        else:
            res = solve_scenario(problem, config.scenario_config(), trial=trial)
            point, cost, failed = res.point, res.cost, res.failed
            error = "no search point satisfied every scenario" if failed else ""
        if failed:
            row = TrialRow(trial=trial, failed=True, error=error)
        else:
            oracle = oracle_violation(
                problem, point, config.oracle_n, stream_for(config.seed, trial, 0, Purpose.ORACLE)
            )
            row = TrialRow(trial=trial, failed=False, point=tuple(float(x) for x in point), cost=float(cost), oracle=oracle)
    except EvaluationError as exc:
        row = TrialRow(trial=trial, failed=True, error=str(exc))
    return row, (trace if keep_trace else None)


def _job(args):
    config, trial, keep_trace = args
    return run_trial(get_problem(config.problem), config, trial, keep_trace)


def run_study(
    problem: Optional[ChanceConstrainedProblem],
    config: StudyConfig,
    workers: int = 1,
    keep_traces: bool = False,
) -> StudyResult:
    """Run ``config.trials`` trials; rows come back ordered by trial id.

    With ``workers > 1`` trials are farmed out to spawned processes, which
    rebuild the problem by name, so ``problem`` must be the registered one.
    """
    registered = config.validate()
    if problem is None:
        problem = registered
    if config.method == "two-layer":
        config.explorer_config().validate(problem)
    workers = max(1, min(int(workers), config.trials))
    if workers == 1:
        outputs = [run_trial(problem, config, t, keep_traces) for t in range(config.trials)]
    else:
        if problem.name != config.problem:
            raise ValueError("parallel studies need a registered problem")
        jobs = [(config, t, keep_traces) for t in range(config.trials)]
        chunk = max(1, math.ceil(config.trials / (4 * workers)))
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            outputs = list(pool.map(_job, jobs, chunksize=chunk))
    rows = [row for row, _ in outputs]
    traces = {row.trial: tr for row, tr in outputs if tr is not None}
    return StudyResult(rows=rows, alpha=problem.alpha, n_u=problem.n_u, label=config.label, config=config, traces=traces)


# -- output -------------------------------------------------------------------

def _fmt(x) -> str:
    return format(float(x), ".17g")


def emit_csv(result: StudyResult, path):
    """Header plus one row per trial; reals at 17 significant digits."""
    n_u = result.n_u
    header = ["trial", "failed"] + [f"u_{i + 1}" for i in range(n_u)]
    header += ["cost", "oracle_violations", "oracle_n", "oracle_v_hat", "error"]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in result.rows:
                if r.failed:
                    writer.writerow([r.trial, 1] + [""] * (n_u + 4) + [r.error])
                else:
                    writer.writerow(
                        [r.trial, 0]
                        + [_fmt(x) for x in r.point]
                        + [_fmt(r.cost), r.oracle.violations, r.oracle.sample_count, _fmt(r.oracle.v_hat), ""]
                    )
    except OSError as exc:
        raise OSError(f"cannot write study CSV to {path}: {exc}") from exc


def read_csv(path, alpha: float, label: str = "") -> StudyResult:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        n_u = sum(1 for name in reader.fieldnames if name.startswith("u_"))
        rows = []
        for rec in reader:
            if rec["failed"] == "1":
                rows.append(TrialRow(trial=int(rec["trial"]), failed=True, error=rec["error"]))
                continue
            rows.append(
                TrialRow(
                    trial=int(rec["trial"]),
                    failed=False,
                    point=tuple(float(rec[f"u_{i + 1}"]) for i in range(n_u)),
                    cost=float(rec["cost"]),
                    oracle=ViolationEstimate(int(rec["oracle_violations"]), int(rec["oracle_n"])),
                )
            )
    return StudyResult(rows=rows, alpha=alpha, n_u=n_u, label=label)


_MARKERS = [
    {"marker": "*", "color": "green"},
    {"marker": ".", "color": "blue"},
    {"marker": "s", "color": "magenta"},
    {"marker": "o", "color": "red", "facecolors": "none"},
]


def emit_scatter_plot(results, path):
    """SVG scatter of final (u_1, u_2), one marker series per study."""
    results = list(results)
    if not results:
        raise ValueError("no study results to plot")
    for res in results:
        if res.n_u != 2:
            raise ValueError(f"scatter plot needs n_u == 2, got {res.n_u} for {res.label!r}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "ccexplore"
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, res in enumerate(results):
        pts = np.array([r.point for r in res.rows if not r.failed], dtype=float).reshape(-1, 2)
        style = dict(_MARKERS[i % len(_MARKERS)])
        face = style.pop("facecolors", None)
        coll = ax.scatter(
            pts[:, 0], pts[:, 1], label=res.label or f"series {i}",
            facecolors=face if face else style["color"], edgecolors=style["color"],
            marker=style["marker"], s=30,
        )
        coll.set_gid(f"series-{i}")
    ax.set_xlabel("u_1")
    ax.set_ylabel("u_2")
    ax.legend()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def build_info() -> dict:
    import numba

    return {
        "package": __version__,
        "backend": kernels.BACKEND,
        "normal_method": NORMAL_METHOD,
        "numpy": np.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


def study_meta(config: StudyConfig, result: StudyResult, outputs: dict) -> dict:
    return {
        "config": config.to_dict(),
        "label": result.label,
        "aggregates": result.aggregates,
        "build": build_info(),
        "outputs": outputs,
    }


def with_overrides(config: StudyConfig, **overrides) -> StudyConfig:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **overrides)
