"""Dynamic time warping costs between variable-length 2-D trajectories.

The alignment cost between two trajectories is the minimum, over all
monotone warping paths from (1, 1) to (n, m), of the summed point-wise
distances along the path (moves: down, right, diagonal).  The default
boundary forces a full alignment (skipping a prefix is infinitely
expensive); ``free_start`` relaxes that so either sequence's prefix can be
skipped at zero cost, which is useful for comparison but collapses the
dissimilarity between nested trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .data import SymMatrix, Trajectory, TrajectorySet

POINT_METRICS = ("l1", "l2")


@dataclass(frozen=True)
class DtwConfig:
    point_metric: str = "l1"
    window: int | None = None  # Sakoe-Chiba band half-width, in samples
    free_start: bool = False

    def __post_init__(self) -> None:
        if self.point_metric not in POINT_METRICS:
            raise ValueError(f"point_metric must be one of {POINT_METRICS}")
        if self.window is not None and self.window < 0:
            raise ValueError("window must be non-negative")


@njit(cache=True)
def _dtw_pair(pts, lens, i, j, use_l2, free_start, window):
    n = lens[i]
    m = lens[j]
    inf = np.inf
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    prev[0] = 0.0
    for c in range(1, m + 1):
        prev[c] = 0.0 if free_start else inf
    for r in range(1, n + 1):
        cur[0] = 0.0 if free_start else inf
        lo = 1
        hi = m
        if window >= 0:
            if r - window > lo:
                lo = r - window
            if r + window < hi:
                hi = r + window
        for c in range(1, lo):
            cur[c] = inf
        for c in range(hi + 1, m + 1):
            cur[c] = inf
        for c in range(lo, hi + 1):
            dx = pts[i, r - 1, 0] - pts[j, c - 1, 0]
            dy = pts[i, r - 1, 1] - pts[j, c - 1, 1]
            if use_l2:
                d = np.sqrt(dx * dx + dy * dy)
            else:
                d = abs(dx) + abs(dy)
            best = prev[c]
            if prev[c - 1] < best:
                best = prev[c - 1]
            if cur[c - 1] < best:
                best = cur[c - 1]
            cur[c] = d + best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m]


@njit(cache=True, parallel=True)
def _dtw_all_pairs(pts, lens, rows, cols, use_l2, free_start, window):
    out = np.empty(rows.shape[0])
    for p in prange(rows.shape[0]):
        out[p] = _dtw_pair(pts, lens, rows[p], cols[p], use_l2, free_start, window)
    return out


def _pack(trajectories) -> tuple[np.ndarray, np.ndarray]:
    lens = np.array([len(t) for t in trajectories], dtype=np.int64)
    pts = np.zeros((len(lens), int(lens.max()), 2))
    for i, t in enumerate(trajectories):
        pts[i, : lens[i]] = t.points
    return pts, lens


def _check_window(cfg: DtwConfig, n: int, m: int) -> int:
    if cfg.window is None:
        return -1
    if cfg.window < abs(n - m):
        raise ValueError(f"window {cfg.window} infeasible for lengths {n} and {m}")
    return cfg.window


def dtw_cost(a: Trajectory, b: Trajectory, cfg: DtwConfig = DtwConfig()) -> float:
    """Alignment cost between two trajectories (symmetric, zero on identity)."""
    window = _check_window(cfg, len(a), len(b))
    pts, lens = _pack([a, b])
    return float(_dtw_pair(pts, lens, 0, 1, cfg.point_metric == "l2", cfg.free_start, window))


def cost_matrix(tset: TrajectorySet, cfg: DtwConfig = DtwConfig()) -> SymMatrix:
    """All-pairs alignment costs; each unordered pair is computed once."""
    k = len(tset)
    if k < 2:
        raise ValueError("need at least 2 trajectories")
    pts, lens = _pack(tset.trajectories)
    window = -1
    if cfg.window is not None:
        spread = int(lens.max() - lens.min())
        if cfg.window < spread:
            raise ValueError(f"window {cfg.window} infeasible: length spread is {spread}")
        window = cfg.window
    rows, cols = np.triu_indices(k, 1)
    vals = _dtw_all_pairs(
        pts, lens, rows.astype(np.int64), cols.astype(np.int64), cfg.point_metric == "l2", cfg.free_start, window
    )
    out = np.zeros((k, k))
    out[rows, cols] = vals
    out[cols, rows] = vals
    return SymMatrix(out)
