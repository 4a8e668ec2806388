"""Alignment cost tests, checked against exhaustive warping-path enumeration."""

import numpy as np
import pytest

from trajclust.data import Trajectory, TrajectorySet
from trajclust.dtw import DtwConfig, cost_matrix, dtw_cost


def _point_dist(p, q, metric):
    if metric == "l2":
        return float(np.hypot(p[0] - q[0], p[1] - q[1]))
    return float(abs(p[0] - q[0]) + abs(p[1] - q[1]))


def brute_force_dtw(a, b, metric="l1", free_start=False):
    """Minimum path cost over every monotone warping path (lengths <= ~7)."""
    n, m = len(a), len(b)
    best = [np.inf]

    def walk(i, j, acc):
        acc += _point_dist(a[i], b[j], metric)
        if acc >= best[0]:
            return
        if i == n - 1 and j == m - 1:
            best[0] = acc
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            if i + di < n and j + dj < m:
                walk(i + di, j + dj, acc)

    if free_start:
        starts = [(i, 0) for i in range(n)] + [(0, j) for j in range(m)]
    else:
        starts = [(0, 0)]
    for i, j in set(starts):
        walk(i, j, 0.0)
    return best[0]


def _traj(points, tid="t"):
    return Trajectory(tid, np.asarray(points, dtype=float))


def _random_traj(rng, max_len=6, tid="t"):
    n = rng.integers(1, max_len + 1)
    return Trajectory(tid, rng.normal(size=(n, 2)) * 3)


def test_identity_is_zero():
    rng = np.random.default_rng(0)
    for _ in range(10):
        t = _random_traj(rng)
        assert dtw_cost(t, t) == 0.0


def test_worked_example_l1():
    a = _traj([[0, 0], [0, 1], [0, 2]], "a")
    b = _traj([[0, 0], [0, 2]], "b")
    assert dtw_cost(a, b, DtwConfig(point_metric="l1")) == 1.0


def test_single_point_pair():
    for c in (0.5, -2.0, 7.25):
        a = _traj([[0, 0]], "a")
        b = _traj([[0, c]], "b")
        assert dtw_cost(a, b) == abs(c)


@pytest.mark.parametrize("metric", ["l1", "l2"])
def test_matches_path_enumeration(metric):
    rng = np.random.default_rng(7)
    cfg = DtwConfig(point_metric=metric)
    for _ in range(60):
        a = _random_traj(rng, tid="a")
        b = _random_traj(rng, tid="b")
        expected = brute_force_dtw(a.points, b.points, metric)
        assert dtw_cost(a, b, cfg) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_free_start_matches_enumeration():
    rng = np.random.default_rng(8)
    cfg = DtwConfig(free_start=True)
    for _ in range(40):
        a = _random_traj(rng, tid="a")
        b = _random_traj(rng, tid="b")
        expected = brute_force_dtw(a.points, b.points, "l1", free_start=True)
        assert dtw_cost(a, b, cfg) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_free_start_skips_prefix_for_free():
    # b contains a as its suffix; with a free start the alignment is perfect
    b = _traj([[5, 5], [9, 9], [1, 1], [2, 2]], "b")
    a = _traj([[1, 1], [2, 2]], "a")
    assert dtw_cost(a, b, DtwConfig(free_start=True)) == 0.0
    assert dtw_cost(a, b, DtwConfig(free_start=False)) > 0.0


def test_symmetry_exact():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = _random_traj(rng, tid="a")
        b = _random_traj(rng, tid="b")
        assert dtw_cost(a, b) == dtw_cost(b, a)


def test_shared_endpoint_extension_keeps_cost():
    rng = np.random.default_rng(11)
    for _ in range(20):
        end = rng.normal(size=2)
        a_pts = np.vstack([rng.normal(size=(rng.integers(1, 5), 2)), end])
        b_pts = np.vstack([rng.normal(size=(rng.integers(1, 5), 2)), end])
        a, b = _traj(a_pts, "a"), _traj(b_pts, "b")
        a_ext = _traj(np.vstack([a_pts, end]), "a2")
        b_ext = _traj(np.vstack([b_pts, end]), "b2")
        assert dtw_cost(a_ext, b_ext) == dtw_cost(a, b)


def test_cost_matrix_matches_pairwise_calls():
    rng = np.random.default_rng(3)
    trajs = tuple(_random_traj(rng, tid=f"t{i}") for i in range(8))
    tset = TrajectorySet(trajs)
    c = cost_matrix(tset)
    for i in range(8):
        assert c.values[i, i] == 0.0
        for j in range(i + 1, 8):
            assert c.values[i, j] == dtw_cost(trajs[i], trajs[j])
            assert c.values[i, j] == c.values[j, i]


def test_cost_matrix_identical_trajectories_zero():
    pts = np.array([[1.0, 2.0], [3.0, 4.0]])
    tset = TrajectorySet(tuple(Trajectory(f"t{i}", pts) for i in range(4)))
    assert np.all(cost_matrix(tset).values == 0.0)


def test_cost_matrix_embeds_worked_example():
    a = _traj([[0, 0], [0, 1], [0, 2]], "a")
    b = _traj([[0, 0], [0, 2]], "b")
    c = _traj([[4, 4], [4, 5]], "c")
    m = cost_matrix(TrajectorySet((a, b, c)))
    assert m.values[0, 1] == 1.0


def test_window_infeasible_raises():
    a = _traj(np.zeros((6, 2)), "a")
    b = _traj(np.zeros((2, 2)), "b")
    with pytest.raises(ValueError, match="infeasible"):
        dtw_cost(a, b, DtwConfig(window=2))


def test_wide_window_equals_unwindowed():
    rng = np.random.default_rng(9)
    for _ in range(10):
        a = _random_traj(rng, tid="a")
        b = _random_traj(rng, tid="b")
        assert dtw_cost(a, b, DtwConfig(window=10)) == dtw_cost(a, b)
