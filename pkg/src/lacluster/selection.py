"""Trimmed-neighborhood machinery shared by the k-median and k-means solvers.

Both solvers score a candidate center by the cost of the fraction of cluster
points nearest to it; they differ only in the exponent of the distance.  One
code path serves both via the ``squared`` switch.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "ceil_exact",
    "greedy_argmin",
    "iter_index_subsets",
    "trimmed_costs",
    "trimmed_indices",
    "trimmed_size",
]

# Guard against float noise pushing a mathematically integral value over the
# next ceiling (e.g. 144.00000000000003 must ceil to 144, not 145).
_CEIL_EPS = 1e-9


def ceil_exact(x: float) -> int:
    return int(math.ceil(x - _CEIL_EPS))


def trimmed_size(n: int, alpha: float) -> int:
    """Number of nearest cluster points scored for a candidate: ceil((1-alpha)*n)."""
    if n < 1:
        raise ValueError("cluster must be non-empty")
    return min(n, max(1, ceil_exact((1.0 - alpha) * n)))


def trimmed_costs(dmat: np.ndarray, m: int) -> np.ndarray:
    """Row-wise sum of the ``m`` smallest entries of a distance matrix."""
    if m >= dmat.shape[1]:
        return dmat.sum(axis=1)
    return np.partition(dmat, m - 1, axis=1)[:, :m].sum(axis=1)


def trimmed_indices(dists: np.ndarray, m: int) -> np.ndarray:
    """Indices of the ``m`` smallest distances, ties broken by point index,
    returned in ascending index order."""
    idx = np.argsort(dists, kind="stable")[:m]
    idx.sort()
    return idx


def greedy_argmin(cluster_pts: np.ndarray, candidates: np.ndarray, alpha: float,
                  squared: bool = False) -> int:
    """Index of the candidate with the least trimmed cost over the cluster.

    Ties go to the earliest candidate.
    """
    if len(candidates) == 0:
        raise ValueError("no candidates to select from")
    if len(cluster_pts) == 0:
        raise ValueError("cluster must be non-empty")
    m = trimmed_size(len(cluster_pts), alpha)
    metric = "sqeuclidean" if squared else "euclidean"
    dmat = cdist(candidates, cluster_pts, metric=metric)
    return int(np.argmin(trimmed_costs(dmat, m)))


def iter_index_subsets(n: int, size: int, cap: int, rng):
    """Index subsets of ``range(n)`` of the given size, at most ``cap`` of them.

    When all C(n, size) subsets fit under the cap they are produced
    exhaustively in lexicographic order; otherwise ``cap`` distinct subsets
    are drawn uniformly at random (as sorted index tuples).
    """
    if size < 1 or size > n:
        return
    total = math.comb(n, size)
    if total <= cap:
        yield from combinations(range(n), size)
        return
    seen: set[tuple] = set()
    while len(seen) < cap:
        pick = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        if pick not in seen:
            seen.add(pick)
            yield pick
