"""Embeddings from dissimilarity matrices via multidimensional scaling.

Two flavors are provided.  Classical MDS double-centers the input (read as
squared distances), eigendecomposes, and scales eigenvectors by root
eigenvalues; the sorted eigenvalue spectrum doubles as an elbow plot for
choosing the output dimension.  Non-metric MDS (SMACOF) fits coordinates
whose distances respect only the rank order of the input dissimilarities,
alternating isotonic (pool-adjacent-violators) regression of disparities
with Guttman-transform majorization steps, so stress never increases.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .data import Embedding, SymMatrix
from .seeding import stream_rng


@dataclass(frozen=True)
class MdsConfig:
    target_dim: int | None = None  # elbow-selected when absent
    smacof_max_iter: int = 300
    smacof_eps: float = 1e-6  # relative stress decrease
    seed: int = 0

    def __post_init__(self) -> None:
        if self.target_dim is not None and self.target_dim < 1:
            raise ValueError("target_dim must be positive")
        if self.smacof_max_iter < 1 or self.smacof_eps <= 0:
            raise ValueError("smacof_max_iter and smacof_eps must be positive")


def elbow_dimension(eigenvalues: np.ndarray) -> int:
    """Dimension after which the largest relative eigenvalue drop occurs.

    Considers consecutive ratios within the first min(10, len-1)
    eigenvalues; ties and degenerate spectra resolve toward the smallest
    dimension.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size < 2 or np.any(ev < 0):
        raise ValueError("need at least 2 non-negative eigenvalues")
    window = min(10, ev.size - 1)
    best_d, best_ratio = 1, -np.inf
    for d in range(1, max(window, 2)):
        hi, lo = ev[d - 1], ev[d]
        if lo > 0:
            ratio = hi / lo
        else:
            ratio = np.inf if hi > 0 else 1.0
        if ratio > best_ratio:
            best_d, best_ratio = d, ratio
    if np.all(ev == ev[0]):
        warnings.warn("all eigenvalues equal: no elbow, returning 1")
    return best_d


def classical_mds(m: SymMatrix, cfg: MdsConfig = MdsConfig()) -> tuple[Embedding, np.ndarray]:
    """Coordinates whose squared distances reproduce the input matrix.

    Returns the embedding (truncated to ``target_dim``, or to the elbow
    dimension when unset) together with the full descending eigenvalue
    spectrum (negatives clamped to zero).
    """
    k = m.order
    if cfg.target_dim is not None and cfg.target_dim > k:
        raise ValueError(f"target_dim {cfg.target_dim} exceeds K={k}")
    v = m.values
    row_mean = v.mean(axis=1)
    b = -0.5 * (v - row_mean[:, None] - row_mean[None, :] + v.mean())
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)
    evecs = evecs[:, order]
    d = cfg.target_dim if cfg.target_dim is not None else elbow_dimension(evals)
    coords = evecs[:, :d] * np.sqrt(evals[:d])[None, :]
    return Embedding(coords, kind="classical_mds"), evals


def explained_dim(eigenvalues: np.ndarray, ratio: float) -> int:
    """Smallest dimension whose eigenvalue mass reaches the given ratio."""
    ev = np.maximum(np.asarray(eigenvalues, dtype=float), 0.0)
    total = ev.sum()
    if total <= 0:
        return 1
    return int(np.searchsorted(np.cumsum(ev) / total, ratio) + 1)


@njit(cache=True)
def _pav(y):
    """Best non-decreasing least-squares fit to y (pool adjacent violators)."""
    n = y.shape[0]
    means = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        means[top] = y[i]
        counts[top] = 1
        top += 1
        while top > 1 and means[top - 2] >= means[top - 1]:
            merged = means[top - 2] * counts[top - 2] + means[top - 1] * counts[top - 1]
            counts[top - 2] += counts[top - 1]
            means[top - 2] = merged / counts[top - 2]
            top -= 1
    out = np.empty(n)
    pos = 0
    for b in range(top):
        for _ in range(counts[b]):
            out[pos] = means[b]
            pos += 1
    return out


@dataclass(frozen=True)
class NmdsResult:
    embedding: Embedding
    stress_trace: tuple[float, ...]  # raw stress per iteration
    normalized_stress: float  # sqrt(sum (d - disparity)^2 / sum d^2) at the last iterate


def run_nonmetric_mds(c: SymMatrix, cfg: MdsConfig) -> NmdsResult:
    k = c.order
    if k < 3:
        raise ValueError("need at least 3 elements")
    if cfg.target_dim is None:
        raise ValueError("non-metric MDS requires an explicit target_dim")

    iu = np.triu_indices(k, 1)
    diss = c.values[iu]
    if np.ptp(diss) == 0.0:
        raise ValueError("dissimilarities have zero variance")
    order = np.argsort(diss, kind="stable")
    n_pairs = diss.size

    rng = stream_rng(cfg.seed, "nmds")
    x = rng.standard_normal((k, cfg.target_dim))
    trace: list[float] = []
    old_stress = np.inf
    norm_stress = np.inf

    for _ in range(cfg.smacof_max_iter):
        diff = x[:, None, :] - x[None, :, :]
        dist_full = np.sqrt(np.sum(diff * diff, axis=2))
        dist = dist_full[iu]

        disp = np.empty_like(dist)
        disp[order] = _pav(dist[order])
        scale = np.sqrt(n_pairs / np.sum(disp * disp))
        disp *= scale

        stress = float(np.sum((dist - disp) ** 2))
        trace.append(stress)
        denom = float(np.sum(dist * dist))
        norm_stress = np.sqrt(stress / denom) if denom > 0 else np.inf
        if old_stress - stress < cfg.smacof_eps * max(old_stress, np.finfo(float).tiny):
            break
        old_stress = stress

        disp_full = np.zeros((k, k))
        disp_full[iu] = disp
        disp_full += disp_full.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist_full > 0, disp_full / dist_full, 0.0)
        bmat = -ratio
        np.fill_diagonal(bmat, 0.0)
        np.fill_diagonal(bmat, -bmat.sum(axis=1))
        x = (bmat @ x) / k

    return NmdsResult(Embedding(x, kind="nonmetric_mds"), tuple(trace), float(norm_stress))


def nonmetric_mds(c: SymMatrix, cfg: MdsConfig) -> Embedding:
    """SMACOF embedding preserving the rank order of dissimilarities."""
    return run_nonmetric_mds(c, cfg).embedding
