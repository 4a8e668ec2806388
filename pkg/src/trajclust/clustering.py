"""Clustering of embedded trajectories and cluster-count selection.

A full-covariance Gaussian mixture fitted by EM is the primary clusterer;
k-means is the alternative.  Both are restarted from several seeded
initializations and keep the best fit.  The cluster count is chosen by
maximizing the mean silhouette score over a candidate range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Embedding, Labeling
from .seeding import stream_rng

_LL_TOL = 1e-8
_MAX_EM_ITER = 500
_RESTARTS = 5


@dataclass(frozen=True)
class GmmModel:
    k: int
    weights: np.ndarray  # (k,)
    means: np.ndarray  # (k, d)
    covariances: np.ndarray  # (k, d, d)
    log_likelihood_trace: tuple[float, ...]
    n_reinits: int = 0


@dataclass(frozen=True)
class ModelSelection:
    candidate_ks: tuple[int, ...]
    silhouettes: tuple[float, ...]
    best_k: int


def _as_coords(e: Embedding | np.ndarray) -> np.ndarray:
    return e.coords if isinstance(e, Embedding) else np.asarray(e, dtype=float)


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    return (m + np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True))).squeeze(axis)


def _kmeans_pp_centers(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:  # all remaining points coincide with a center
            centers[c] = x[rng.integers(n)]
            continue
        centers[c] = x[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, np.sum((x - centers[c]) ** 2, axis=1))
    return centers


def _chol_with_ridge(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky factor, adding an escalating trace-scaled ridge if needed."""
    try:
        return np.linalg.cholesky(cov), cov
    except np.linalg.LinAlgError:
        pass
    d = cov.shape[0]
    ridge = max(1e-6 * np.trace(cov) / d, 1e-12)
    for _ in range(12):
        try:
            fixed = cov + ridge * np.eye(d)
            return np.linalg.cholesky(fixed), fixed
        except np.linalg.LinAlgError:
            ridge *= 10.0
    raise np.linalg.LinAlgError("covariance not repairable to SPD")


def _log_gaussians(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """Per-component log densities, shape (n, k)."""
    n, d = x.shape
    out = np.empty((n, means.shape[0]))
    for j in range(means.shape[0]):
        chol, _ = _chol_with_ridge(covs[j])
        diff = (x - means[j]).T
        sol = np.linalg.solve(chol, diff)
        maha = np.sum(sol * sol, axis=0)
        logdet = 2.0 * np.sum(np.log(np.diagonal(chol)))
        out[:, j] = -0.5 * (d * np.log(2.0 * np.pi) + logdet + maha)
    return out


def _fit_gmm_once(x: np.ndarray, k: int, rng: np.random.Generator):
    n, d = x.shape
    means = _kmeans_pp_centers(x, k, rng)
    pooled = np.atleast_2d(np.cov(x, rowvar=False)) if n > 1 else np.eye(d)
    _, pooled = _chol_with_ridge(pooled)
    covs = np.repeat(pooled[None, :, :], k, axis=0)
    weights = np.full(k, 1.0 / k)

    trace: list[float] = []
    n_reinits = 0
    for _ in range(_MAX_EM_ITER):
        log_dens = _log_gaussians(x, means, covs)
        weighted = log_dens + np.log(weights)[None, :]
        point_ll = _logsumexp(weighted, axis=1)
        ll = float(point_ll.sum())
        resp = np.exp(weighted - point_ll[:, None])

        nk = resp.sum(axis=0)
        empty = np.where(nk < 1e-10)[0]
        if empty.size:  # revive dead components at the worst-explained points
            worst_order = np.argsort(point_ll)
            for t, j in enumerate(empty):
                worst = int(worst_order[t % n])
                resp[:, j] = 0.0
                resp[worst, :] = 0.0
                resp[worst, j] = 1.0
                n_reinits += 1
            nk = resp.sum(axis=0)

        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        for j in range(k):
            diff = x - means[j]
            cov = (resp[:, j][:, None] * diff).T @ diff / nk[j]
            _, covs[j] = _chol_with_ridge(cov)

        trace.append(ll)
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) <= _LL_TOL * max(1.0, abs(trace[-1])):
            break

    return GmmModel(k, weights, means, covs, tuple(trace), n_reinits)


def fit_gmm(e: Embedding | np.ndarray, k: int, seed: int) -> GmmModel:
    """EM fit with k-means++ init; best of several restarts by likelihood."""
    x = _as_coords(e)
    if k < 1 or k > x.shape[0]:
        raise ValueError(f"k={k} must be in [1, {x.shape[0]}]")
    best: GmmModel | None = None
    for restart in range(_RESTARTS):
        model = _fit_gmm_once(x, k, stream_rng(seed, "gmm", k, restart))
        if best is None or model.log_likelihood_trace[-1] > best.log_likelihood_trace[-1]:
            best = model
    assert best is not None
    return best


def predict_labels(model: GmmModel, e: Embedding | np.ndarray) -> Labeling:
    """Assign each point to its maximum-responsibility component."""
    x = _as_coords(e)
    if x.shape[1] != model.means.shape[1]:
        raise ValueError("embedding dimension does not match the model")
    weighted = _log_gaussians(x, model.means, model.covariances) + np.log(model.weights)[None, :]
    return Labeling(np.argmax(weighted, axis=1), model.k)


def responsibilities(model: GmmModel, e: Embedding | np.ndarray) -> np.ndarray:
    x = _as_coords(e)
    weighted = _log_gaussians(x, model.means, model.covariances) + np.log(model.weights)[None, :]
    return np.exp(weighted - _logsumexp(weighted, axis=1)[:, None])


def kmeans(e: Embedding | np.ndarray, k: int, seed: int) -> Labeling:
    """Lloyd iterations from k-means++ starts; best of restarts by inertia."""
    x = _as_coords(e)
    n = x.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k={k} must be in [1, {n}]")
    best_labels, best_inertia = None, np.inf
    for restart in range(_RESTARTS):
        rng = stream_rng(seed, "kmeans", k, restart)
        centers = _kmeans_pp_centers(x, k, rng)
        labels = np.full(n, -1)
        for _ in range(100):
            d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            new_labels = np.argmin(d2, axis=1)
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for j in range(k):
                mask = labels == j
                if mask.any():
                    centers[j] = x[mask].mean(axis=0)
                else:  # re-seed an empty cluster at the worst-fit point
                    centers[j] = x[np.argmax(d2[np.arange(n), labels])]
        inertia = float(np.sum((x - centers[labels]) ** 2))
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    assert best_labels is not None
    return Labeling(best_labels, k)


def kmeans_inertia_trace(e: Embedding | np.ndarray, k: int, seed: int) -> list[float]:
    """Inertia after each Lloyd update of a single (non-restarted) run."""
    x = _as_coords(e)
    rng = stream_rng(seed, "kmeans", k, 0)
    centers = _kmeans_pp_centers(x, k, rng)
    labels = np.full(x.shape[0], -1)
    trace = []
    for _ in range(100):
        d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        trace.append(float(d2[np.arange(x.shape[0]), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = x[mask].mean(axis=0)
    return trace


def compact_labeling(labeling: Labeling) -> Labeling:
    """Renumber labels so only occupied cluster ids remain."""
    occupied, inverse = np.unique(labeling.labels, return_inverse=True)
    return Labeling(inverse, occupied.size)


def silhouette_score(e: Embedding | np.ndarray, labeling: Labeling) -> float:
    """Mean over points of (b - a) / max(a, b) with Euclidean distances."""
    x = _as_coords(e)
    labels = labeling.labels
    k = labeling.k
    if k < 2:
        raise ValueError("silhouette requires at least 2 clusters")
    n = x.shape[0]
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0):
        raise ValueError("silhouette requires every cluster to be non-empty")

    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)

    sums = np.zeros((n, k))
    for c in range(k):
        sums[:, c] = dist[:, labels == c].sum(axis=1)

    own = counts[labels]
    scores = np.zeros(n)
    multi = own > 1
    a = np.zeros(n)
    a[multi] = sums[np.arange(n), labels][multi] / (own[multi] - 1)

    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), labels] = np.inf
    b = mean_other.min(axis=1)

    denom = np.maximum(a, b)
    valid = multi & (denom > 0)
    scores[valid] = (b[valid] - a[valid]) / denom[valid]
    return float(scores.mean())


def select_k(
    e: Embedding | np.ndarray,
    ks: range | tuple[int, ...] = range(2, 8),
    method: str = "gmm",
    seed: int = 0,
) -> tuple[ModelSelection, Labeling]:
    """Fit each candidate k, score by silhouette, return the best labeling."""
    if method not in ("gmm", "kmeans"):
        raise ValueError("method must be 'gmm' or 'kmeans'")
    x = _as_coords(e)
    ks = tuple(ks)
    if not ks or any(k < 2 or k > x.shape[0] for k in ks):
        raise ValueError("every candidate k must satisfy 2 <= k <= K")
    scores: list[float] = []
    labelings: list[Labeling] = []
    for k in ks:
        if method == "gmm":
            labeling = predict_labels(fit_gmm(x, k, seed), x)
        else:
            labeling = kmeans(x, k, seed)
        labelings.append(labeling)
        compacted = compact_labeling(labeling)
        scores.append(silhouette_score(x, compacted) if compacted.k > 1 else -1.0)
    best = int(np.argmax(scores))
    return ModelSelection(ks, tuple(scores), ks[best]), labelings[best]
