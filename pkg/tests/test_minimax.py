"""Minimax distance tests: MST oracles and the semiring-closure equivalence."""

import itertools

import numpy as np
import pytest

from trajclust.data import Embedding, SymMatrix
from trajclust.minimax import (
    Mst,
    build_graph,
    graph_from_matrix,
    minimax_distances,
    minimax_from_embedding,
    prim_mst,
)


def random_weights(rng, k):
    w = rng.random((k, k)) * 10
    w = np.triu(w, 1)
    w = w + w.T
    return SymMatrix(w)


def semiring_closure(w):
    """All-pairs min-max path weights by Floyd-Warshall over (min, max)."""
    m = w.copy()
    k = w.shape[0]
    for mid in range(k):
        m = np.minimum(m, np.maximum(m[:, mid][:, None], m[mid, :][None, :]))
    np.fill_diagonal(m, 0.0)
    return m


def prufer_trees(k):
    """Every labeled tree on k nodes, as edge lists, via Prufer sequences."""
    if k == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for v in seq:
            degree[v] += 1
        edges = []
        seq_list = list(seq)
        leaves = sorted(i for i in range(k) if degree[i] == 1)
        for v in seq_list:
            leaf = leaves.pop(0)
            edges.append((min(leaf, v), max(leaf, v)))
            degree[v] -= 1
            if degree[v] == 1:
                # insert keeping leaves sorted
                lo, hi = 0, len(leaves)
                while lo < hi:
                    mid = (lo + hi) // 2
                    if leaves[mid] < v:
                        lo = mid + 1
                    else:
                        hi = mid
                leaves.insert(lo, v)
        edges.append((leaves[0], leaves[1]))
        yield edges


def test_build_graph_345():
    emb = Embedding(np.array([[0.0, 0.0], [3.0, 4.0]]), kind="tsne")
    assert build_graph(emb).weights.values[0, 1] == 25.0


def test_build_graph_coincident_zero():
    emb = Embedding(np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 0.0]]), kind="tsne")
    w = build_graph(emb).weights.values
    assert w[0, 1] == 0.0


def test_build_graph_matches_direct_computation():
    rng = np.random.default_rng(2)
    coords = rng.normal(size=(12, 3))
    w = build_graph(Embedding(coords, kind="classical_mds")).weights.values
    for i in range(12):
        for j in range(12):
            expected = float(np.sum((coords[i] - coords[j]) ** 2))
            assert abs(w[i, j] - expected) <= 1e-12


def test_prim_unique_mst():
    w = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    mst = prim_mst(graph_from_matrix(SymMatrix(w)))
    assert set(mst.edges) == {(0, 1, 1.0), (0, 2, 2.0)}


def test_prim_total_weight_is_minimal_over_all_trees():
    rng = np.random.default_rng(4)
    for k in (3, 4, 5, 6, 7):
        w = random_weights(rng, k)
        mst = prim_mst(graph_from_matrix(w))
        best = min(
            sum(w.values[i, j] for i, j in edges) for edges in prufer_trees(k)
        )
        assert mst.total_weight == pytest.approx(best, rel=1e-12)


def test_prim_keeps_zero_weight_edge_for_duplicates():
    coords = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0]])
    mst = prim_mst(build_graph(Embedding(coords, kind="tsne")))
    assert any(w == 0.0 and {i, j} == {0, 1} for i, j, w in mst.edges)


def test_chain_max_edge():
    mst = Mst(((0, 1, 1.0), (1, 2, 4.0)), 3)
    m = minimax_distances(mst).values
    assert m[0, 2] == 4.0
    assert m[0, 1] == 1.0
    assert m[1, 2] == 4.0


def test_minimax_zero_diagonal():
    rng = np.random.default_rng(1)
    w = random_weights(rng, 6)
    m = minimax_distances(prim_mst(graph_from_matrix(w)))
    assert np.all(np.diag(m.values) == 0)


def test_minimax_equals_semiring_closure_over_full_graph():
    rng = np.random.default_rng(11)
    for trial in range(40):
        k = int(rng.integers(3, 13))
        w = random_weights(rng, k)
        m = minimax_distances(prim_mst(graph_from_matrix(w))).values
        expected = semiring_closure(w.values)
        assert np.array_equal(m, expected)


def test_ultrametric_inequality():
    rng = np.random.default_rng(12)
    for _ in range(10):
        k = int(rng.integers(3, 10))
        w = random_weights(rng, k)
        m = minimax_distances(prim_mst(graph_from_matrix(w))).values
        for i, j, l in itertools.permutations(range(k), 3):
            assert m[i, l] <= max(m[i, j], m[j, l]) + 1e-12


def test_minimax_dominated_by_direct_edge():
    rng = np.random.default_rng(13)
    w = random_weights(rng, 9)
    m = minimax_distances(prim_mst(graph_from_matrix(w))).values
    assert np.all(m <= w.values + 1e-15)


def test_scale_equivariance_exact():
    rng = np.random.default_rng(14)
    w = random_weights(rng, 8)
    m1 = minimax_distances(prim_mst(graph_from_matrix(w))).values
    for c in (0.5, 3.0):
        scaled = SymMatrix(c * w.values)
        m2 = minimax_distances(prim_mst(graph_from_matrix(scaled))).values
        assert np.array_equal(m2, c * m1)


def test_minimax_from_embedding_pipeline():
    rng = np.random.default_rng(15)
    coords = rng.normal(size=(10, 2))
    m = minimax_from_embedding(Embedding(coords, kind="tsne")).values
    w = build_graph(Embedding(coords, kind="tsne")).weights.values
    assert np.array_equal(m, semiring_closure(w))
