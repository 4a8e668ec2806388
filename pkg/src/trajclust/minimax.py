"""Minimax (path-based) distances over the complete graph of embedded points.

The minimax distance between nodes i and j is the minimum over all
connecting paths of the maximum edge weight on the path.  It equals the
largest edge weight on the unique i-j path of any minimum spanning tree,
so the full matrix is derived from one MST: process tree edges in
ascending weight order and, whenever an edge merges two components, that
edge's weight is the minimax distance between every cross-component pair.
The result is an ultrametric, which guarantees it embeds exactly as
squared Euclidean distances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Embedding, SymMatrix


@dataclass(frozen=True)
class WeightedGraph:
    """Complete graph over K node indices with symmetric edge weights."""

    weights: SymMatrix

    @property
    def order(self) -> int:
        return self.weights.order


@dataclass(frozen=True)
class Mst:
    """Spanning tree as K-1 (i, j, weight) edges with i < j."""

    edges: tuple[tuple[int, int, float], ...]
    n_nodes: int

    @property
    def total_weight(self) -> float:
        return float(sum(e[2] for e in self.edges))


def build_graph(v: Embedding) -> WeightedGraph:
    """Complete graph weighted by pairwise squared Euclidean distances."""
    if v.rows < 2:
        raise ValueError("need at least 2 embedded points")
    coords = v.coords
    sq = np.sum(coords * coords, axis=1)
    w = sq[:, None] + sq[None, :] - 2.0 * (coords @ coords.T)
    np.maximum(w, 0.0, out=w)  # rounding can leave tiny negatives
    w = 0.5 * (w + w.T)
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(SymMatrix(w))


def graph_from_matrix(m: SymMatrix) -> WeightedGraph:
    """Treat an existing dissimilarity matrix directly as edge weights."""
    return WeightedGraph(m)


def prim_mst(g: WeightedGraph) -> Mst:
    """Minimum spanning tree; equal weights tie-break toward smaller index."""
    w = g.weights.values
    k = g.order
    in_tree = np.zeros(k, dtype=bool)
    best = np.full(k, np.inf)
    parent = np.full(k, -1, dtype=int)
    in_tree[0] = True
    best[1:] = w[0, 1:]
    parent[1:] = 0
    edges: list[tuple[int, int, float]] = []
    for _ in range(k - 1):
        cand = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(cand))  # argmin takes the first min -> smallest index
        i, j = parent[nxt], nxt
        edges.append((min(i, j), max(i, j), float(w[i, j])))
        in_tree[nxt] = True
        closer = w[nxt] < best
        closer &= ~in_tree
        best[closer] = w[nxt][closer]
        parent[closer] = nxt
    return Mst(tuple(edges), k)


def minimax_distances(mst: Mst) -> SymMatrix:
    """All-pairs max-edge-on-tree-path distances via ascending-weight merges."""
    k = mst.n_nodes
    if len(mst.edges) != k - 1:
        raise ValueError("tree must have exactly K-1 edges")
    m = np.zeros((k, k))
    comp_of = np.arange(k)
    members: list[list[int]] = [[i] for i in range(k)]
    order = sorted(mst.edges, key=lambda e: (e[2], e[0], e[1]))
    for i, j, weight in order:
        ci, cj = comp_of[i], comp_of[j]
        if ci == cj:
            raise ValueError("input edges contain a cycle")
        if len(members[ci]) < len(members[cj]):
            ci, cj = cj, ci
        a = np.asarray(members[ci])
        b = np.asarray(members[cj])
        m[np.ix_(a, b)] = weight
        m[np.ix_(b, a)] = weight
        members[ci].extend(members[cj])
        comp_of[members[cj]] = ci
        members[cj] = []
    return SymMatrix(m)


def minimax_from_embedding(v: Embedding) -> SymMatrix:
    return minimax_distances(prim_mst(build_graph(v)))


def minimax_from_matrix(m: SymMatrix) -> SymMatrix:
    return minimax_distances(prim_mst(graph_from_matrix(m)))
