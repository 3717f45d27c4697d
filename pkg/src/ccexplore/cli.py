"""Command-line entry point.

Subcommands: solve, scenario, bound, study, oracle. Values resolve as
built-in defaults < ``--config`` JSON < command-line flags, and the
resolved config is written to ``<prefix>.meta.json``. Passing that meta
file back as ``--config`` reproduces the run. ``CCEXPLORE_OUTPUT_DIR`` sets
the directory that relative output prefixes are resolved against.

Exit status: 0 on success, 2 on configuration errors, 1 on runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .explorer import explore, write_trace_csv
from .problem import EvaluationError, get_problem
from .sampling import Purpose, stream_for
from .scenario import scenario_bound, solve_scenario
from .study import (
    ConfigError,
    StudyConfig,
    build_info,
    emit_csv,
    emit_scatter_plot,
    run_study,
    study_meta,
)
from .violation import ORACLE_MIN_SAMPLES, oracle_violation

OUTPUT_DIR_ENV = "CCEXPLORE_OUTPUT_DIR"

logger = logging.getLogger("ccexplore")

# flag dest -> config key
_FLAG_KEYS = {
    "problem": "problem",
    "seed": "seed",
    "trials": "trials",
    "oracle_n": "oracle_n",
    "n_decisions": "n_decisions",
    "n_disturbances": "n_disturbances",
    "alpha_eps": "alpha_eps",
    "iterations": "iterations",
    "n_scenarios": "n_scenarios",
    "search_points": "search_points",
}


def _add_common(p, method_flags):
    p.add_argument("--config", help="JSON config (or a previous run's meta.json)")
    p.add_argument("--problem", help="problem name (default: paper-nonconvex-2d)")
    p.add_argument("--seed", type=int, help="root seed (unsigned 64-bit)")
    p.add_argument("--oracle-n", dest="oracle_n", type=int, help="samples for oracle violation scoring")
    p.add_argument("--output-prefix", dest="output_prefix", help="output path prefix")
    if "two-layer" in method_flags:
        p.add_argument("--n-decisions", dest="n_decisions", type=int, help="decision samples per iteration (N_u)")
        p.add_argument("--n-disturbances", dest="n_disturbances", type=int, help="disturbance samples per iteration (N_delta)")
        p.add_argument("--alpha-eps", dest="alpha_eps", type=float, help="filter margin below alpha")
        p.add_argument("--iterations", type=int, help="number of iterations")
    if "scenario" in method_flags:
        p.add_argument("--n-scenarios", dest="n_scenarios", type=int, help="scenario count N")
        p.add_argument("--search-points", dest="search_points", type=int, help="inner search points M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccexplore", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("-v", "--verbose", action="count", default=0, help="log progress (-vv per iteration)")

    p = sub.add_parser("solve", parents=[verbosity], help="run the two-layer explorer once")
    _add_common(p, ("two-layer",))

    p = sub.add_parser("scenario", parents=[verbosity], help="solve one sampled scenario program")
    _add_common(p, ("scenario",))

    p = sub.add_parser("bound", parents=[verbosity], help="print the scenario sample-count bound")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--nu", type=int, required=True, help="decision dimension n_u")

    p = sub.add_parser("study", parents=[verbosity], help="Monte Carlo study over many trials")
    _add_common(p, ("two-layer", "scenario"))
    p.add_argument("--method", choices=("two-layer", "scenario"))
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--plot", action="store_true", help="also write <prefix>.svg")
    p.add_argument("--traces", action="store_true", help="write every trial's iteration trace")

    p = sub.add_parser("oracle", parents=[verbosity], help="high-sample violation estimate at one point")
    p.add_argument("--problem", default="paper-nonconvex-2d")
    p.add_argument("--point", required=True, help="comma-separated coordinates, e.g. 5,5")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _load_config(args, method) -> StudyConfig:
    data = {}
    if args.config:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"malformed JSON in {path}: {exc}") from None
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = dict(data["config"])
    if not isinstance(data, dict):
        raise ConfigError("config", "expected a JSON object")
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    if method is not None:
        if data.get("method", method) != method:
            raise ConfigError("method", f"this subcommand runs {method!r}, config says {data['method']!r}")
        data["method"] = method
    elif getattr(args, "method", None):
        data["method"] = args.method
    return StudyConfig.from_dict(data)


def _prefix(args, default) -> Path:
    prefix = Path(args.output_prefix or default)
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir and not prefix.is_absolute():
        prefix = Path(out_dir) / prefix
    prefix.parent.mkdir(parents=True, exist_ok=True)
    return prefix


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _oracle_dict(problem, point, config):
    est = oracle_violation(problem, point, config.oracle_n, stream_for(config.seed, 0, 0, Purpose.ORACLE))
    return est.to_dict()


def cmd_solve(args) -> int:
    config = _load_config(args, "two-layer")
    problem = get_problem(config.problem)
    prefix = _prefix(args, "solve")
    trace = explore(problem, config.explorer_config())
    result = trace.to_dict()
    result["oracle"] = None if trace.failed else _oracle_dict(problem, trace.point, config)
    trace_path = Path(f"{prefix}.trace.csv")
    write_trace_csv(trace, trace_path, problem.n_u)
    _write_json(f"{prefix}.json", result)
    _write_json(
        f"{prefix}.meta.json",
        {"config": config.to_dict(), "build": build_info(), "outputs": [str(trace_path), f"{prefix}.json"]},
    )
    print(json.dumps(result, sort_keys=True))
    return 1 if trace.failed else 0


def cmd_scenario(args) -> int:
    config = _load_config(args, "scenario")
    problem = get_problem(config.problem)
    prefix = _prefix(args, "scenario")
    res = solve_scenario(problem, config.scenario_config())
    result = res.to_dict()
    result["oracle"] = None if res.failed else _oracle_dict(problem, res.point, config)
    _write_json(f"{prefix}.json", result)
    _write_json(f"{prefix}.meta.json", {"config": config.to_dict(), "build": build_info(), "outputs": [f"{prefix}.json"]})
    print(json.dumps(result, sort_keys=True))
    return 1 if res.failed else 0


def cmd_bound(args) -> int:
    try:
        n = scenario_bound(args.alpha, args.beta, args.nu)
    except ValueError as exc:
        raise ConfigError("bound", str(exc)) from None
    print(n)
    return 0


def cmd_study(args) -> int:
    config = _load_config(args, None)
    if args.workers < 1:
        raise ConfigError("workers", "must be >= 1")
    problem = get_problem(config.problem)
    prefix = _prefix(args, "study")
    logger.info("study %s: %d trials, %d workers", config.label, config.trials, args.workers)
    result = run_study(problem, config, workers=args.workers, keep_traces=args.traces)
    outputs = {"csv": f"{prefix}.csv"}
    emit_csv(result, outputs["csv"])
    if args.plot:
        outputs["svg"] = f"{prefix}.svg"
        emit_scatter_plot([result], outputs["svg"])
    if args.traces:
        trace_dir = Path(f"{prefix}.traces")
        trace_dir.mkdir(exist_ok=True)
        outputs["traces"] = str(trace_dir)
        for trial, trace in sorted(result.traces.items()):
            write_trace_csv(trace, trace_dir / f"trial_{trial:04d}.csv", problem.n_u)
    _write_json(f"{prefix}.meta.json", study_meta(config, result, outputs))
    print(json.dumps(result.aggregates, sort_keys=True))
    return 0


def cmd_oracle(args) -> int:
    try:
        problem = get_problem(args.problem)
    except KeyError as exc:
        raise ConfigError("problem", exc.args[0]) from None
    try:
        point = np.array([float(x) for x in args.point.split(",")])
    except ValueError:
        raise ConfigError("point", f"expected comma-separated numbers, got {args.point!r}") from None
    if point.shape != (problem.n_u,):
        raise ConfigError("point", f"expected {problem.n_u} coordinates, got {point.size}")
    if args.n < ORACLE_MIN_SAMPLES:
        raise ConfigError("n", f"must be >= {ORACLE_MIN_SAMPLES}")
    seed = StudyConfig().seed if args.seed is None else args.seed
    est = oracle_violation(problem, point, args.n, stream_for(seed, 0, 0, Purpose.ORACLE))
    print(json.dumps(est.to_dict(), sort_keys=True))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "scenario": cmd_scenario,
    "bound": cmd_bound,
    "study": cmd_study,
    "oracle": cmd_oracle,
}


def parse_and_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"ccexplore {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except (EvaluationError, OSError, RuntimeError) as exc:
        print(f"ccexplore {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
