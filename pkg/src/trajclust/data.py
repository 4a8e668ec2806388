"""Domain types and file formats for trajectory clustering.

A trajectory is a variable-length sequence of 2-D points recording the
lateral and longitudinal position of a surrounding vehicle relative to the
ego vehicle, sampled at a fixed rate.  Sets of trajectories, symmetric
dissimilarity matrices, embeddings, and cluster labelings are the data
that flow between pipeline stages.

File formats:

* Trajectories: JSON Lines.  An optional first header line
  ``{"point_order": ["lateral", "longitudinal"], "provenance": {...}}``
  pins the coordinate order; every following line is one record
  ``{"id": str, "label": str|null, "hz": int, "points": [[lat, lon], ...]}``.
* Matrices: headerless CSV, one row per line, 17 significant digits
  (lossless for float64).
* Labelings: JSON ``{"k": int, "labels": [int, ...], "method": str,
  "seed": int, "ids": [str, ...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

LAT, LON = 0, 1  # column indices inside a trajectory's point array

POINT_ORDER = ("lateral", "longitudinal")

SYMMETRY_ATOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """One observed object track: an (n, 2) float array of [lat, lon] points."""

    id: str
    points: np.ndarray
    sample_rate_hz: int = 10
    truth_label: str | None = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError(f"trajectory {self.id!r}: points must be a non-empty (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"trajectory {self.id!r}: non-finite coordinate")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"trajectory {self.id!r}: sample rate must be positive")
        object.__setattr__(self, "points", pts)
        self.points.setflags(write=False)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass(frozen=True)
class TrajectorySet:
    """Ordered collection of trajectories with unique ids."""

    trajectories: tuple[Trajectory, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        ids = [t.id for t in self.trajectories]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate trajectory ids: {dupes[:5]}")

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)

    def __getitem__(self, i: int) -> Trajectory:
        return self.trajectories[i]

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.trajectories]

    @property
    def truth_labels(self) -> list[str | None]:
        return [t.truth_label for t in self.trajectories]

    def has_truth(self) -> bool:
        return all(t.truth_label is not None for t in self.trajectories)


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric, zero-diagonal, non-negative K x K dissimilarity matrix."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValueError("matrix has non-finite entries")
        asym = np.max(np.abs(v - v.T)) if v.size else 0.0
        if asym > SYMMETRY_ATOL:
            raise ValueError(f"matrix asymmetry {asym:.3e} exceeds {SYMMETRY_ATOL}")
        if np.any(np.diagonal(v) != 0.0):
            raise ValueError("matrix diagonal must be exactly zero")
        if np.any(v < 0.0):
            raise ValueError("matrix entries must be non-negative")
        object.__setattr__(self, "values", v)
        self.values.setflags(write=False)

    @property
    def order(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Embedding:
    """K x d coordinates for the trajectories, in set order."""

    coords: np.ndarray
    kind: str  # tsne | classical_mds | nonmetric_mds

    _KINDS = ("tsne", "classical_mds", "nonmetric_mds")

    def __post_init__(self) -> None:
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2:
            raise ValueError("embedding coords must be 2-D")
        if not np.all(np.isfinite(c)):
            raise ValueError("embedding has non-finite coordinates")
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        object.__setattr__(self, "coords", c)
        self.coords.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class Labeling:
    """Cluster assignment: length-K labels over clusters 0..k-1."""

    labels: np.ndarray
    k: int

    def __post_init__(self) -> None:
        lab = np.asarray(self.labels, dtype=int)
        if lab.ndim != 1:
            raise ValueError("labels must be 1-D")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if lab.size and (lab.min() < 0 or lab.max() >= self.k):
            raise ValueError(f"labels must lie in [0, {self.k})")
        object.__setattr__(self, "labels", lab)
        self.labels.setflags(write=False)

    def __len__(self) -> int:
        return self.labels.size


def labeling_from_tags(tags: Sequence[str]) -> Labeling:
    """Integer labeling from string tags, ids assigned by first appearance."""
    seen: dict[str, int] = {}
    out = np.empty(len(tags), dtype=int)
    for i, tag in enumerate(tags):
        if tag not in seen:
            seen[tag] = len(seen)
        out[i] = seen[tag]
    return Labeling(out, max(len(seen), 1))


# ---------------------------------------------------------------------------
# Trajectory JSONL


def _record_to_trajectory(rec: dict, lineno: int) -> Trajectory:
    try:
        pts = rec["points"]
        if len(pts) == 0:
            raise ValueError("empty trajectory")
        return Trajectory(
            id=str(rec["id"]),
            points=np.asarray(pts, dtype=float),
            sample_rate_hz=int(rec.get("hz", 10)),
            truth_label=rec.get("label"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"line {lineno}: {exc}") from exc


def load_trajectories(path: str | Path) -> TrajectorySet:
    """Read a trajectory JSONL file, preserving record order."""
    path = Path(path)
    trajectories: list[Trajectory] = []
    provenance: dict = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if "point_order" in rec:  # header line
                if tuple(rec["point_order"]) != POINT_ORDER:
                    raise ValueError(
                        f"{path}: line {lineno}: unsupported point order {rec['point_order']!r}"
                    )
                provenance = rec.get("provenance", {})
                continue
            trajectories.append(_record_to_trajectory(rec, lineno))
    if not trajectories:
        raise ValueError(f"{path}: no trajectory records")
    return TrajectorySet(tuple(trajectories), provenance)


def save_trajectories(tset: TrajectorySet, path: str | Path) -> None:
    """Write the canonical JSONL form (header line first)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        header = {"point_order": list(POINT_ORDER), "provenance": tset.provenance}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for t in tset:
            rec = {
                "id": t.id,
                "label": t.truth_label,
                "hz": t.sample_rate_hz,
                "points": [[float(p[LAT]), float(p[LON])] for p in t.points],
            }
            fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# Matrix CSV


def save_matrix(m: SymMatrix, path: str | Path) -> None:
    """Write K rows of K comma-separated values at 17 significant digits."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in m.values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix(path: str | Path) -> SymMatrix:
    values = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    return SymMatrix(values)


# ---------------------------------------------------------------------------
# Labeling JSON


def save_labeling(
    labeling: Labeling, path: str | Path, *, method: str, seed: int, ids: Iterable[str] | None = None
) -> None:
    doc: dict = {
        "k": labeling.k,
        "labels": [int(v) for v in labeling.labels],
        "method": method,
        "seed": seed,
    }
    if ids is not None:
        doc["ids"] = list(ids)
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_labeling(path: str | Path) -> tuple[Labeling, dict]:
    """Read a labeling file; returns (labeling, raw document)."""
    with Path(path).open("r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return Labeling(np.asarray(doc["labels"], dtype=int), int(doc["k"])), doc
