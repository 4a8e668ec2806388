"""Stage-chain composition of the clustering methods.

The full method (dtmm) runs alignment costs, t-SNE, minimax distances,
classical MDS, and silhouette-selected mixture clustering.  The four
baselines drop or substitute stages:

* b1: costs -> t-SNE -> cluster
* b2: costs -> non-metric MDS -> cluster
* b3: costs -> non-metric MDS -> minimax -> MDS -> cluster
* b4: costs -> minimax (on the cost matrix directly) -> MDS -> cluster

The chains are data, so reports can state exactly which stages ran.  A
StageCache lets callers share identical stage results (e.g. the cost
matrix) across methods on the same input without affecting results.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

from .clustering import (
    Labeling,
    compact_labeling,
    fit_gmm,
    kmeans,
    predict_labels,
    select_k,
    silhouette_score,
)
from .config import Config
from .data import Embedding, SymMatrix, TrajectorySet, labeling_from_tags
from .dtw import cost_matrix
from .evaluation import mutual_information, rand_index, v_measure
from .mds import classical_mds, explained_dim, nonmetric_mds
from .minimax import minimax_from_embedding, minimax_from_matrix
from .scenarios import build_evaluation_sets
from .tsne import tsne_embed

METHOD_CHAINS: dict[str, tuple[str, ...]] = {
    "dtmm": ("dtw", "tsne", "minimax", "mds", "cluster"),
    "b1": ("dtw", "tsne", "cluster"),
    "b2": ("dtw", "nmds", "cluster"),
    "b3": ("dtw", "nmds", "minimax", "mds", "cluster"),
    "b4": ("dtw", "minimax", "mds", "cluster"),
}

METHODS = tuple(METHOD_CHAINS)


class StageCache(dict):
    """Memo for stage results, valid for one (trajectory set, config) pair."""

    def fetch(self, key: tuple, compute: Callable):
        if key not in self:
            self[key] = compute()
        return self[key]


@dataclass(frozen=True)
class PipelineArtifacts:
    cost: SymMatrix
    pre_embedding: Embedding | None  # t-SNE or nMDS output
    minimax: SymMatrix | None
    final_embedding: Embedding  # what the clusterer consumed
    eigenvalues: tuple[float, ...] | None  # spectrum behind the final MDS


@dataclass(frozen=True)
class RunReport:
    method: str
    set_name: str
    n_trajectories: int
    stages: tuple[str, ...]
    selected_k: int
    labels: tuple[int, ...]
    candidate_ks: tuple[int, ...]
    silhouettes: tuple[float, ...]
    silhouette: float
    rand_index: float | None
    mutual_information: float | None
    v_measure: float | None
    embed_dim: int
    seed: int
    config: dict
    timings_s: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "set": self.set_name,
            "n": self.n_trajectories,
            "stages": list(self.stages),
            "k": self.selected_k,
            "labels": list(self.labels),
            "candidate_ks": list(self.candidate_ks),
            "silhouettes": list(self.silhouettes),
            "silhouette": self.silhouette,
            "RI": self.rand_index,
            "MI": self.mutual_information,
            "VM": self.v_measure,
            "embed_dim": self.embed_dim,
            "seed": self.seed,
            "config": self.config,
            "timings_s": self.timings_s,
        }


def _nmds_dim(cost: SymMatrix, cfg: Config, cache: StageCache) -> int:
    """Dimension holding the requested eigenvalue mass of the cost spectrum.

    The eigenanalysis follows the classical-MDS Gram convention: the costs
    are distances, so they are squared before double centering.
    """
    evals = cache.fetch(
        ("cost-spectrum",),
        lambda: classical_mds(SymMatrix(cost.values**2), replace(cfg.mds, target_dim=1))[1],
    )
    return max(explained_dim(evals, cfg.baselines.nmds_variance_ratio), 2)


def build_embedding(
    tset: TrajectorySet, method: str, cfg: Config, cache: StageCache | None = None
) -> tuple[PipelineArtifacts, dict[str, float]]:
    """Run every stage before clustering; returns artifacts and timings."""
    if method not in METHOD_CHAINS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if len(tset) < 3:
        raise ValueError("need at least 3 trajectories")
    cache = StageCache() if cache is None else cache
    chain = METHOD_CHAINS[method]
    timings: dict[str, float] = {}

    def timed(stage: str, key: tuple, compute: Callable):
        start = time.perf_counter()
        try:
            result = cache.fetch(key, compute)
        except Exception as exc:
            raise RuntimeError(f"stage {stage!r} of method {method!r} failed: {exc}") from exc
        timings[stage] = time.perf_counter() - start
        return result

    cost: SymMatrix = timed("dtw", ("dtw",), lambda: cost_matrix(tset, cfg.dtw))

    pre: Embedding | None = None
    if "tsne" in chain:
        pre = timed("tsne", ("tsne",), lambda: tsne_embed(cost, replace(cfg.tsne, seed=cfg.seed)))
    elif "nmds" in chain:
        dim = _nmds_dim(cost, cfg, cache)
        pre = timed(
            "nmds",
            ("nmds", dim),
            lambda: nonmetric_mds(cost, replace(cfg.mds, target_dim=dim, seed=cfg.seed)),
        )

    mm: SymMatrix | None = None
    evals = None
    if "minimax" in chain:
        if pre is not None:
            src_key = ("minimax", chain[1])
            mm = timed("minimax", src_key, lambda: minimax_from_embedding(pre))
        else:
            mm = timed("minimax", ("minimax", "cost"), lambda: minimax_from_matrix(cost))
        target = cfg.mds.target_dim
        if method == "b3" and target is None:
            target = cfg.baselines.b3_final_dim
        mds_cfg = replace(cfg.mds, target_dim=target, seed=cfg.seed)
        key = ("mds", chain[1], target)
        final, evals = timed("mds", key, lambda: classical_mds(mm, mds_cfg))
    else:
        assert pre is not None
        final = pre

    artifacts = PipelineArtifacts(
        cost=cost,
        pre_embedding=pre,
        minimax=mm,
        final_embedding=final,
        eigenvalues=tuple(float(v) for v in evals) if evals is not None else None,
    )
    return artifacts, timings


def _cluster(embedding: Embedding, cfg: Config, seed: int):
    if cfg.cluster.k is not None:
        k = cfg.cluster.k
        if cfg.cluster.method == "gmm":
            labeling = predict_labels(fit_gmm(embedding, k, seed), embedding)
        else:
            labeling = kmeans(embedding, k, seed)
        compacted = compact_labeling(labeling)
        score = silhouette_score(embedding, compacted) if compacted.k > 1 else -1.0
        return (k,), (score,), k, labeling
    ks = range(cfg.cluster.k_min, cfg.cluster.k_max + 1)
    selection, labeling = select_k(embedding, ks, method=cfg.cluster.method, seed=seed)
    return selection.candidate_ks, selection.silhouettes, selection.best_k, labeling


def _metrics(tset: TrajectorySet, labeling: Labeling):
    if not tset.has_truth():
        return None, None, None
    truth = labeling_from_tags([t.truth_label for t in tset])
    return (
        rand_index(truth, labeling),
        mutual_information(truth, labeling, normalized=True),
        v_measure(truth, labeling),
    )


def run_method(
    tset: TrajectorySet,
    method: str,
    cfg: Config,
    cache: StageCache | None = None,
    set_name: str = "",
) -> tuple[RunReport, PipelineArtifacts]:
    """Execute a full stage chain and report selection, labels, and scores."""
    artifacts, timings = build_embedding(tset, method, cfg, cache)
    start = time.perf_counter()
    ks, scores, best_k, labeling = _cluster(artifacts.final_embedding, cfg, cfg.seed)
    timings["cluster"] = time.perf_counter() - start
    ri, mi, vm = _metrics(tset, labeling)
    best_idx = ks.index(best_k)
    report = RunReport(
        method=method,
        set_name=set_name or str(tset.provenance.get("set", "")),
        n_trajectories=len(tset),
        stages=METHOD_CHAINS[method],
        selected_k=best_k,
        labels=tuple(int(v) for v in labeling.labels),
        candidate_ks=tuple(ks),
        silhouettes=tuple(scores),
        silhouette=scores[best_idx],
        rand_index=ri,
        mutual_information=mi,
        v_measure=vm,
        embed_dim=artifacts.final_embedding.dim,
        seed=cfg.seed,
        config=_jsonable(cfg.flat()),
        timings_s=timings,
    )
    return report, artifacts


def sweep_ks(
    tset: TrajectorySet,
    method: str,
    cfg: Config,
    cache: StageCache | None = None,
    set_name: str = "",
) -> list[dict]:
    """Per-k silhouette (and truth metrics when available) for one method.

    The embedding is built once; only the clustering stage varies with k.
    """
    artifacts, _ = build_embedding(tset, method, cfg, cache)
    embedding = artifacts.final_embedding
    rows = []
    for k in range(cfg.cluster.k_min, cfg.cluster.k_max + 1):
        if cfg.cluster.method == "gmm":
            labeling = predict_labels(fit_gmm(embedding, k, cfg.seed), embedding)
        else:
            labeling = kmeans(embedding, k, cfg.seed)
        compacted = compact_labeling(labeling)
        score = silhouette_score(embedding, compacted) if compacted.k > 1 else -1.0
        ri, mi, vm = _metrics(tset, labeling)
        rows.append(
            {
                "set": set_name or str(tset.provenance.get("set", "")),
                "method": method,
                "k": k,
                "silhouette": score,
                "RI": ri,
                "MI": mi,
                "VM": vm,
            }
        )
    return rows


def run_augmentation_study(n: int, seed: int, cfg: Config | None = None) -> list[RunReport]:
    """The scarce-minority experiment: dtmm on set4 (halved cut-ins) and on
    its two synthetically augmented counterparts set5/set6."""
    cfg = cfg or Config()
    cfg = replace(cfg, seed=seed)
    sets = build_evaluation_sets(n, seed)
    reports = []
    for name in ("set4", "set5", "set6"):
        report, _ = run_method(sets[name], "dtmm", cfg, set_name=name)
        reports.append(report)
    return reports


def _jsonable(flat: dict) -> dict:
    out = {}
    for key, value in flat.items():
        if isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def format_report_table(reports: list[RunReport]) -> str:
    """Fixed-width table of per-run scores, one row per (set, method)."""
    headers = ["set", "method", "k", "RI", "MI", "VM", "SS"]
    rows = []
    for r in reports:
        fmt = lambda v: "-" if v is None else f"{v:.3f}"
        rows.append(
            [r.set_name or "-", r.method, str(r.selected_k), fmt(r.rand_index), fmt(r.mutual_information), fmt(r.v_measure), fmt(r.silhouette)]
        )
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines)
