import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccexplore import (
    BoxDomain,
    ChanceConstrainedProblem,
    DisturbanceModel,
    EvaluationError,
    ExplorerConfig,
    Purpose,
    explore,
    filter_feasible,
    sample_decisions,
)
from ccexplore.explorer import write_trace_csv
from ccexplore.sampling import stream_for


def threshold_problem(alpha=0.05):
    """h = d - u: the violation probability at u is 1 - Phi(u) for normal d."""
    return ChanceConstrainedProblem(
        domain=BoxDomain([-3.0], [3.0]),
        cost=lambda U: U[:, 0],
        constraint=lambda U, D: D[:, 0][None, :] - U[:, :1],
        disturbance=DisturbanceModel.standard_normal(),
        alpha=alpha,
    )


def constant_problem(value):
    return ChanceConstrainedProblem(
        domain=BoxDomain([-1.0, -1.0], [1.0, 1.0]),
        cost=lambda U: (U ** 2).sum(axis=1),
        constraint=lambda U, D: np.full((len(U), len(D)), float(value)),
        disturbance=DisturbanceModel.standard_normal(),
        alpha=0.05,
    )


def test_filter_threshold_examples():
    prob = threshold_problem()
    # with 1000 samples spaced on a grid we control v_hat exactly
    batch = np.arange(1000, dtype=float)[:, None]  # h > 0 iff d > u
    cands = np.array([[955.5], [953.5], [954.5]])  # v_hat 0.044, 0.046, 0.045
    kept = filter_feasible(prob, cands, batch, 0.005)
    assert [p[0] for p, _ in kept] == [955.5, 954.5]
    assert [e.v_hat for _, e in kept] == [0.044, 0.045]


def test_filter_everything_violates():
    prob = constant_problem(1.0)
    assert filter_feasible(prob, np.zeros((4, 2)), np.zeros((10, 1)), 0.01) == []


def test_filter_rejects_empty_inputs(bench):
    with pytest.raises(ValueError):
        filter_feasible(bench, np.zeros((0, 2)), np.zeros((3, 1)), 0.005)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), margin=st.floats(0.001, 0.049))
def test_filter_output_is_feasible_subset(bench, seed, margin):
    rng = np.random.default_rng(seed)
    cands = rng.uniform(-6, 5, size=(30, 2))
    batch = rng.standard_normal((200, 1))
    kept = filter_feasible(bench, cands, batch, margin)
    rows = {tuple(c) for c in cands}
    assert all(tuple(p) in rows for p, _ in kept)
    assert all(e.v_hat <= bench.alpha - margin for _, e in kept)
    idx = [int(np.flatnonzero((cands == p).all(axis=1))[0]) for p, _ in kept]
    assert idx == sorted(idx)


def test_never_violated_reduces_to_random_search():
    prob = constant_problem(-1.0)
    cfg = ExplorerConfig(n_decisions=20, n_disturbances=5, alpha_margin=0.01, max_iterations=15, seed=4)
    trace = explore(prob, cfg)
    # brute force: replay the decision streams and take the overall minimum
    best = math.inf
    for it in range(15):
        U = sample_decisions(prob.domain, 20, stream_for(4, 0, it, Purpose.DECISIONS))
        best = min(best, float((U ** 2).sum(axis=1).min()))
    assert trace.cost == best
    assert all(r.n_feasible == 20 for r in trace.records)
    costs = trace.incumbent_costs()
    assert all(b <= a for a, b in zip(costs, costs[1:]))


def test_always_violated_reports_failure():
    trace = explore(constant_problem(1.0), ExplorerConfig(10, 10, 0.01, 8))
    assert trace.failed and trace.point is None
    assert all(r.n_feasible == 0 and not r.accepted and r.best_point is None for r in trace.records)
    assert trace.to_dict()["failed"] is True


def test_invalid_margin(bench):
    with pytest.raises(ValueError):
        explore(bench, ExplorerConfig(alpha_margin=0.06))
    with pytest.raises(ValueError):
        ExplorerConfig(n_decisions=0)


def test_budget_accounting():
    calls = []
    prob = threshold_problem()

    def counting(U, D):
        calls.append(len(U) * len(D))
        return D[:, 0][None, :] - U[:, :1]

    prob = ChanceConstrainedProblem(prob.domain, prob.cost, counting, prob.disturbance, prob.alpha)
    trace = explore(prob, ExplorerConfig(n_decisions=13, n_disturbances=17, max_iterations=4, alpha_margin=0.01))
    assert sum(calls) == 13 * 17 * 4 == trace.constraint_evaluations


def test_evaluation_failure_has_iteration_context():
    with pytest.raises(EvaluationError, match="iteration 0"):
        explore(constant_problem(np.nan), ExplorerConfig(5, 5, 0.01, 3))


def test_benchmark_trace_properties(bench):
    cfg = ExplorerConfig(n_decisions=50, n_disturbances=200, max_iterations=20, seed=8)
    trace = explore(bench, cfg, trial=2)
    assert not trace.failed
    assert trace.estimate.v_hat <= bench.alpha - cfg.alpha_margin
    prev = math.inf
    for r in trace.records:
        if r.accepted:
            assert r.best_cost < prev
            assert r.incumbent_estimate.v_hat <= 0.045
        else:
            assert r.incumbent_cost == prev
        prev = r.incumbent_cost
    again = explore(bench, cfg, trial=2)
    np.testing.assert_array_equal(trace.point, again.point)
    other = explore(bench, cfg, trial=3)
    assert not np.array_equal(trace.point, other.point)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**40), n_u=st.integers(1, 40), n_d=st.integers(1, 150), iters=st.integers(1, 12))
def test_incumbent_monotone(bench, seed, n_u, n_d, iters):
    trace = explore(bench, ExplorerConfig(n_u, n_d, 0.005, iters, seed))
    costs = trace.incumbent_costs()
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    for a, r in zip([math.inf] + costs, trace.records):
        assert r.accepted == (r.incumbent_cost < a)
        if r.n_feasible == 0:
            assert r.best_point is None and not r.accepted


def test_trace_csv(tmp_path, bench):
    trace = explore(bench, ExplorerConfig(5, 50, 0.005, 6, seed=1))
    path = tmp_path / "t.csv"
    write_trace_csv(trace, path, 2)
    lines = path.read_text().splitlines()
    assert lines[0] == "iter,n_feasible,accepted,u_1,u_2,cost,v_hat"
    assert len(lines) == 7
