"""Clustering agreement metrics and closed-form approximation-ratio bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContingencyTable",
    "ari",
    "contingency",
    "kmeans_bound",
    "kmedian_bound",
    "nmi",
]

NMI_NORMALIZATIONS = ("min", "geometric", "arithmetic", "max")


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("partitions must be 1-D label arrays")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        raise ValueError("partitions must be non-empty")
    return a, b


def contingency(a, b) -> ContingencyTable:
    """Joint label-count table for two partitions of the same points."""
    a, b = _check_pair(a, b)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ka = int(ai.max()) + 1
    kb = int(bi.max()) + 1
    counts = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts=counts,
                            row_marginals=counts.sum(axis=1),
                            col_marginals=counts.sum(axis=0),
                            n=a.shape[0])


def ari(a, b) -> float:
    """Adjusted Rand index via pair counting.

    When the expected index equals the maximum index (both partitions a
    single cluster, or both all singletons) the usual ratio is 0/0; the
    convention here is 1.0 when the two partitions group points identically
    and 0.0 otherwise.
    """
    table = contingency(a, b)
    sum_cells = int(sum(math.comb(int(v), 2) for v in table.counts.ravel()))
    sum_a = int(sum(math.comb(int(v), 2) for v in table.row_marginals))
    sum_b = int(sum(math.comb(int(v), 2) for v in table.col_marginals))
    pairs = math.comb(table.n, 2)
    if pairs == 0:
        return 1.0
    expected = sum_a * sum_b / pairs
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        same = (sum_cells == sum_a == sum_b)
        return 1.0 if same else 0.0
    return float((sum_cells - expected) / (maximum - expected))


def nmi(a, b, normalization: str = "arithmetic") -> float:
    """Normalized mutual information of two partitions.

    Mutual information (natural log, with 0 log 0 := 0) divided by a mean of
    the two label entropies; the mean is selectable since conventions vary.
    Two zero-entropy partitions score 1.0; otherwise a zero normalizer (one
    constant partition under "min"/"geometric") scores 0.0.
    """
    if normalization not in NMI_NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NMI_NORMALIZATIONS}")
    table = contingency(a, b)
    n = table.n
    pa = table.row_marginals / n
    pb = table.col_marginals / n
    ha = float(-np.sum(pa[pa > 0] * np.log(pa[pa > 0])))
    hb = float(-np.sum(pb[pb > 0] * np.log(pb[pb > 0])))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    pij = table.counts / n
    mask = pij > 0
    outer = np.outer(pa, pb)
    mi = float(np.sum(pij[mask] * np.log(pij[mask] / outer[mask])))
    mi = max(mi, 0.0)
    if normalization == "min":
        norm = min(ha, hb)
    elif normalization == "max":
        norm = max(ha, hb)
    elif normalization == "geometric":
        norm = math.sqrt(ha * hb)
    else:
        norm = 0.5 * (ha + hb)
    if norm == 0.0:
        return 0.0
    return float(min(1.0, mi / norm))


def _check_bound_alpha(alpha: float) -> None:
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"bound diverges outside alpha in [0, 0.5), got {alpha}")


def kmedian_bound(alpha: float, epsilon: float) -> float:
    """Worst-case cost ratio of the k-median solver:
    1 + (6a - 4a^2 + e*a) / ((1 - a)(1 - 2a))."""
    _check_bound_alpha(alpha)
    return 1.0 + (6.0 * alpha - 4.0 * alpha**2 + epsilon * alpha) / (
        (1.0 - alpha) * (1.0 - 2.0 * alpha))


def kmeans_bound(alpha: float, epsilon: float) -> float:
    """Worst-case cost ratio of the k-means solver:
    1 + a/(1 - a) + (4a + a*e) / ((1 - 2a)(1 - a))."""
    _check_bound_alpha(alpha)
    return 1.0 + alpha / (1.0 - alpha) + (4.0 * alpha + alpha * epsilon) / (
        (1.0 - 2.0 * alpha) * (1.0 - alpha))
