import json
import os
import subprocess
import sys

import pytest

from ccexplore.cli import parse_and_dispatch

FAST = ["--n-decisions", "20", "--n-disturbances", "100", "--iterations", "5", "--oracle-n", "100000"]


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CCEXPLORE_OUTPUT_DIR", raising=False)
    return tmp_path


def test_bound(capsys):
    assert parse_and_dispatch(["bound", "--alpha", "0.05", "--beta", "0.01", "--nu", "2"]) == 0
    assert capsys.readouterr().out.strip() == "484"


def test_bound_invalid(capsys):
    assert parse_and_dispatch(["bound", "--alpha", "1.5", "--beta", "0.01", "--nu", "2"]) == 2


def test_solve_margin_too_large(capsys):
    assert parse_and_dispatch(["solve", "--alpha-eps", "0.06"]) == 2
    err = capsys.readouterr().err
    assert "alpha_eps" in err and len(err.strip().splitlines()) == 1


def test_missing_config(capsys):
    assert parse_and_dispatch(["study", "--config", "missing.json"]) == 2
    assert "missing.json" in capsys.readouterr().err


def test_malformed_config(in_tmp, capsys):
    (in_tmp / "bad.json").write_text("{not json")
    assert parse_and_dispatch(["study", "--config", "bad.json"]) == 2
    (in_tmp / "odd.json").write_text('{"trials": "many"}')
    assert parse_and_dispatch(["study", "--config", "odd.json"]) == 2
    assert "trials" in capsys.readouterr().err


def test_unknown_subcommand():
    assert parse_and_dispatch(["optimize"]) == 2


def test_solve_outputs(in_tmp, capsys):
    assert parse_and_dispatch(["solve", *FAST, "--output-prefix", "run"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["failed"] is False and len(result["point"]) == 2
    assert result["constraint_evaluations"] == 20 * 100 * 5
    assert (in_tmp / "run.trace.csv").read_text().startswith("iter,n_feasible,accepted,u_1,u_2,cost,v_hat")
    meta = json.loads((in_tmp / "run.meta.json").read_text())
    assert meta["config"]["n_disturbances"] == 100
    assert meta["build"]["normal_method"]


def test_flags_override_config(in_tmp, capsys):
    (in_tmp / "c.json").write_text(json.dumps({"n_disturbances": 50, "iterations": 3, "oracle_n": 100000}))
    assert parse_and_dispatch(["solve", "--config", "c.json", "--iterations", "4", "--output-prefix", "o"]) == 0
    meta = json.loads((in_tmp / "o.meta.json").read_text())
    assert meta["config"]["iterations"] == 4 and meta["config"]["n_disturbances"] == 50


def test_scenario_subcommand(in_tmp, capsys):
    args = ["scenario", "--n-scenarios", "50", "--search-points", "2000", "--oracle-n", "100000"]
    assert parse_and_dispatch(args) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n_scenarios"] == 50 and out["n_search_points"] == 2000


def test_oracle_subcommand(capsys):
    assert parse_and_dispatch(["oracle", "--point", "5,5", "--n", "100000"]) == 0
    est = json.loads(capsys.readouterr().out)
    assert est["sample_count"] == 100000
    assert est["v_hat"] == est["violations"] / 100000
    assert parse_and_dispatch(["oracle", "--point", "5", "--n", "100000"]) == 2
    assert parse_and_dispatch(["oracle", "--point", "5,5", "--n", "10"]) == 2


def test_study_meta_reproduces_outputs(in_tmp, capsys):
    args = ["study", "--trials", "3", "--workers", "1", *FAST]
    assert parse_and_dispatch([*args, "--output-prefix", "first", "--plot", "--traces"]) == 0
    assert (in_tmp / "first.svg").exists()
    assert len(list((in_tmp / "first.traces").iterdir())) == 3
    assert parse_and_dispatch(["study", "--config", "first.meta.json", "--workers", "1", "--output-prefix", "second"]) == 0
    assert (in_tmp / "first.csv").read_bytes() == (in_tmp / "second.csv").read_bytes()


def test_output_dir_env(in_tmp, monkeypatch, capsys):
    monkeypatch.setenv("CCEXPLORE_OUTPUT_DIR", str(in_tmp / "out"))
    assert parse_and_dispatch(["study", "--trials", "1", "--workers", "1", *FAST, "--output-prefix", "s"]) == 0
    assert (in_tmp / "out" / "s.csv").exists()


def _solve_bytes(tmp, backend):
    env = dict(os.environ, CCEXPLORE_BACKEND=backend)
    subprocess.run(
        [sys.executable, "-m", "ccexplore", "solve", *FAST, "--output-prefix", str(tmp / backend)],
        check=True, env=env, capture_output=True,
    )
    return (tmp / f"{backend}.trace.csv").read_bytes()


def test_backends_give_identical_traces(in_tmp):
    assert _solve_bytes(in_tmp, "numba") == _solve_bytes(in_tmp, "numpy")


def test_backend_recorded_in_meta(in_tmp):
    env = dict(os.environ, CCEXPLORE_BACKEND="numpy")
    subprocess.run(
        [sys.executable, "-m", "ccexplore", "solve", *FAST, "--output-prefix", "np"],
        check=True, env=env, capture_output=True, cwd=in_tmp,
    )
    assert json.loads((in_tmp / "np.meta.json").read_text())["build"]["backend"] == "numpy"
