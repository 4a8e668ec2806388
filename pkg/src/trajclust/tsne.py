"""t-SNE on a dissimilarity matrix.

Input dissimilarities (alignment costs) are used directly as distances in
the Gaussian kernel: conditional neighbor probabilities for row i are
proportional to exp(-c_ij^2 * beta_i), with beta_i found by bisection so
each row's perplexity (2^entropy) hits the target.  The joint affinities
are matched by a Student-t distribution in the plane via gradient descent
on the KL divergence, with the usual early-exaggeration and momentum
schedule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Embedding, SymMatrix
from .seeding import stream_rng

_EPS = 1e-12


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0  # clamped to (K-1)/3 when larger
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch_iter: int = 250
    init_sigma: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.perplexity <= 0 or self.iterations < 1 or self.learning_rate <= 0:
            raise ValueError("perplexity, iterations, and learning_rate must be positive")


def _row_affinities(sq_dists: np.ndarray, target_perplexity: float, tol: float = 1e-5, max_steps: int = 50):
    """Gaussian row distribution with bandwidth bisected to the target perplexity."""
    beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
    log_target = np.log(target_perplexity)
    p = np.empty_like(sq_dists)
    for _ in range(max_steps):
        np.exp(-sq_dists * beta, out=p)
        total = p.sum()
        if total <= 0.0:
            total = np.finfo(float).tiny
        entropy = np.log(total) + beta * float(sq_dists @ p) / total
        p /= total
        if abs(np.exp(entropy) - target_perplexity) <= tol:
            break
        if entropy > log_target:  # too spread out -> narrow the kernel
            beta_lo = beta
            beta = beta * 2.0 if np.isinf(beta_hi) else 0.5 * (beta_lo + beta_hi)
        else:
            beta_hi = beta
            beta = 0.5 * (beta_lo + beta_hi)
    return p


def conditional_affinities(c: SymMatrix, perplexity: float) -> np.ndarray:
    """Row-stochastic neighbor probabilities p(j | i) from dissimilarities."""
    k = c.order
    if k < 3:
        raise ValueError("need at least 3 elements")
    if perplexity >= k:
        raise ValueError(f"perplexity {perplexity} must be below K={k}")
    sq = c.values**2
    p = np.zeros((k, k))
    idx = np.arange(k)
    for i in range(k):
        others = idx != i
        row = sq[i, others]
        if np.all(row == 0.0):
            warnings.warn(f"degenerate dissimilarity row {i}: falling back to uniform affinities")
            p[i, others] = 1.0 / (k - 1)
            continue
        p[i, others] = _row_affinities(row, perplexity)
    return p


def symmetrize_affinities(p_cond: np.ndarray) -> np.ndarray:
    """Joint affinities p_ij = (p(j|i) + p(i|j)) / 2K, floored to avoid log(0)."""
    k = p_cond.shape[0]
    p = (p_cond + p_cond.T) / (2.0 * k)
    np.maximum(p, _EPS, out=p)
    np.fill_diagonal(p, 0.0)
    return p


def _student_t_kernel(y: np.ndarray) -> np.ndarray:
    """Unnormalized heavy-tailed similarities 1 / (1 + ||y_i - y_j||^2)."""
    sq = np.sum(y * y, axis=1)
    num = sq[:, None] + sq[None, :]
    num -= 2.0 * (y @ y.T)
    num += 1.0
    np.reciprocal(num, out=num)
    np.fill_diagonal(num, 0.0)
    return num


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P || Q) of the joint affinities against the embedding's Student-t map."""
    num = _student_t_kernel(y)
    q = num / num.sum()
    np.maximum(q, _EPS, out=q)
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of kl_divergence with respect to the coordinates."""
    num = _student_t_kernel(y)
    q = num / num.sum()
    np.maximum(q, _EPS, out=q)
    w = (p - q) * num
    return 4.0 * (y * w.sum(axis=1)[:, None] - w @ y)


@dataclass(frozen=True)
class TsneResult:
    embedding: Embedding
    kl_trace: tuple[tuple[int, float], ...]  # (iteration, KL against true P)


def run_tsne(c: SymMatrix, cfg: TsneConfig = TsneConfig()) -> TsneResult:
    k = c.order
    if k < 3:
        raise ValueError("need at least 3 trajectories")
    perplexity = min(cfg.perplexity, (k - 1) / 3.0)
    p = symmetrize_affinities(conditional_affinities(c, perplexity))

    rng = stream_rng(cfg.seed, "tsne")
    y = rng.normal(scale=cfg.init_sigma, size=(k, 2))
    update = np.zeros_like(y)
    kl_trace: list[tuple[int, float]] = []

    for it in range(1, cfg.iterations + 1):
        p_eff = p * cfg.early_exaggeration if it <= cfg.exaggeration_iters else p
        momentum = cfg.momentum_early if it <= cfg.momentum_switch_iter else cfg.momentum_late

        num = _student_t_kernel(y)
        q = num / num.sum()
        np.maximum(q, _EPS, out=q)
        w = (p_eff - q) * num
        grad = 4.0 * (y * w.sum(axis=1)[:, None] - w @ y)
        if not np.all(np.isfinite(grad)):
            raise FloatingPointError(f"non-finite t-SNE gradient at iteration {it}")

        update = momentum * update - cfg.learning_rate * grad
        y = y + update
        y = y - y.mean(axis=0)

        if it == 1 or it == cfg.iterations or it % 25 == 0:
            kl_trace.append((it, kl_divergence(p, y)))

    return TsneResult(Embedding(y, kind="tsne"), tuple(kl_trace))


def tsne_embed(c: SymMatrix, cfg: TsneConfig = TsneConfig()) -> Embedding:
    """Two-dimensional t-SNE coordinates for the matrix's elements."""
    return run_tsne(c, cfg).embedding
