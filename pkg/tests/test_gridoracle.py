import json

import numpy as np

from ccexplore import RngStream, sample_disturbances
from ccexplore.gridoracle import cached_grid_optimum, constrained_grid_optimum, grid_points
from ccexplore.violation import count_violations


def test_early_stop_matches_exhaustive_scan(bench):
    res = constrained_grid_optimum(bench, resolution=60, n_samples=2000, threshold=0.045, seed=5)
    U = grid_points(bench, 60)
    batch = sample_disturbances(bench.disturbance, 2000, RngStream(5, (0,)))
    feasible = count_violations(bench, U, batch) / 2000 <= 0.045
    costs = bench.costs(U)
    j = np.flatnonzero(feasible)[np.argmin(costs[feasible])]
    assert res["cost"] == costs[j]
    assert res["point"] == U[j].tolist()
    assert res["unconstrained_cost"] == costs.min() <= res["cost"]


def test_grid_includes_box_corners(bench):
    U = grid_points(bench, 5)
    assert U.shape == (25, 2)
    assert U.min() == -6.0 and U.max() == 5.0


def test_cache_reused_and_refreshed(bench, tmp_path):
    path = tmp_path / "g.json"
    first = cached_grid_optimum(bench, path, resolution=30, n_samples=500)
    stored = json.loads(path.read_text())
    stored["cost"] = 123.0
    path.write_text(json.dumps(stored))
    assert cached_grid_optimum(bench, path, resolution=30, n_samples=500)["cost"] == 123.0
    # different parameters force a recompute
    again = cached_grid_optimum(bench, path, resolution=31, n_samples=500)
    assert again["resolution"] == 31 and again["cost"] != 123.0
    assert first["problem"] == bench.name
