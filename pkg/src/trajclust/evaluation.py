"""External clustering metrics against ground-truth labels.

All three scores are computed from the contingency table between the true
classes and the predicted clusters and are invariant to permuting cluster
ids on either side: the Rand index counts pairwise together/apart
agreements, mutual information uses natural-log entropies (optionally
normalized by sqrt(H(T) * H(P))), and the V-measure is the harmonic mean
of homogeneity and completeness.
"""

from __future__ import annotations

import numpy as np

from .data import Labeling


def contingency_table(truth: Labeling, pred: Labeling) -> np.ndarray:
    if len(truth) != len(pred):
        raise ValueError("labelings have different lengths")
    table = np.zeros((truth.k, pred.k), dtype=np.int64)
    np.add.at(table, (truth.labels, pred.labels), 1)
    return table


def rand_index(truth: Labeling, pred: Labeling) -> float:
    """Fraction of point pairs on which the two labelings agree."""
    n = len(truth)
    if len(pred) != n:
        raise ValueError("labelings have different lengths")
    if n < 2:
        raise ValueError("need at least 2 points")
    table = contingency_table(truth, pred)

    def pairs(counts: np.ndarray) -> float:
        return float(np.sum(counts * (counts - 1))) / 2.0

    together_both = pairs(table.ravel())
    together_truth = pairs(table.sum(axis=1))
    together_pred = pairs(table.sum(axis=0))
    total = n * (n - 1) / 2.0
    disagreements = (together_truth - together_both) + (together_pred - together_both)
    return (total - disagreements) / total


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_information(truth: Labeling, pred: Labeling, normalized: bool = True) -> float:
    """I(T; P) in nats; normalized by sqrt(H(T) * H(P)) when requested."""
    table = contingency_table(truth, pred).astype(float)
    n = table.sum()
    joint = table / n
    pt = joint.sum(axis=1)
    pp = joint.sum(axis=0)
    mask = joint > 0
    outer = pt[:, None] * pp[None, :]
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / outer[mask])))
    mi = max(mi, 0.0)  # guard rounding on independent labelings
    if not normalized:
        return mi
    denom = np.sqrt(_entropy(table.sum(axis=1)) * _entropy(table.sum(axis=0)))
    if denom == 0.0:
        return 0.0
    return min(mi / denom, 1.0)


def v_measure(truth: Labeling, pred: Labeling) -> float:
    """Harmonic mean of homogeneity and completeness (entropy based)."""
    table = contingency_table(truth, pred).astype(float)
    n = table.sum()
    h_truth = _entropy(table.sum(axis=1))
    h_pred = _entropy(table.sum(axis=0))

    # conditional entropies from the joint table
    joint = table / n
    col = joint.sum(axis=0)
    row = joint.sum(axis=1)
    mask = joint > 0
    h_t_given_p = float(-np.sum(joint[mask] * np.log((joint / col[None, :])[mask])))
    h_p_given_t = float(-np.sum(joint[mask] * np.log((joint / row[:, None])[mask])))

    homogeneity = 1.0 if h_truth == 0 else 1.0 - h_t_given_p / h_truth
    completeness = 1.0 if h_pred == 0 else 1.0 - h_p_given_t / h_pred
    if homogeneity + completeness == 0.0:
        return 0.0
    return 2.0 * homogeneity * completeness / (homogeneity + completeness)


def align_labels_for_display(truth: Labeling, pred: Labeling) -> Labeling:
    """Permute predicted ids onto the best-overlapping true ids.

    Greedy maximum-overlap matching (ties toward the smaller true id);
    purely cosmetic, metric values do not depend on it.  Unmatched
    predicted clusters keep distinct ids above the matched range.
    """
    table = contingency_table(truth, pred)
    r, c = table.shape
    mapping = np.full(c, -1)
    used_truth: set[int] = set()
    flat_order = sorted(
        ((int(table[i, j]), i, j) for i in range(r) for j in range(c)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    for count, i, j in flat_order:
        if count == 0:
            break
        if mapping[j] != -1 or i in used_truth:
            continue
        mapping[j] = i
        used_truth.add(i)
    next_free = r
    for j in range(c):
        if mapping[j] == -1:
            mapping[j] = next_free
            next_free += 1
    return Labeling(mapping[pred.labels], max(int(mapping.max()) + 1, truth.k))
