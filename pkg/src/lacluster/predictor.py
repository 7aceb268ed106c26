"""Ground-truth generation and controlled label corruption.

The benchmark protocol simulates a label predictor: a reference partition is
computed by distance-weighted seeding plus Lloyd-style refinement, then a
fraction of each cluster's points is reassigned to other clusters to reach a
target error rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geom import as_points, centroid, cost_kmeans, cost_kmedian, nearest_assign, weiszfeld_median

__all__ = [
    "CorruptionReport",
    "LloydResult",
    "corrupt_labels",
    "label_error_rate",
    "refine_lloyd",
    "seed_dsampling",
]


@dataclass(frozen=True)
class CorruptionReport:
    requested_alpha: float
    achieved_alpha: float
    moved: int


@dataclass(frozen=True)
class LloydResult:
    centers: np.ndarray
    labels: np.ndarray
    costs: tuple[float, ...]


def seed_dsampling(points, k: int, power: int, rng) -> np.ndarray:
    """Distance-weighted seeding: first center uniform, each next center a
    dataset point drawn with probability proportional to dist^power to the
    chosen set (power 1 for median-style, 2 for means-style seeding)."""
    X = as_points(points)
    n = X.shape[0]
    if power not in (1, 2):
        raise ValueError(f"power must be 1 or 2, got {power}")
    if k > n:
        raise ValueError(f"k={k} exceeds point count {n}")
    chosen = [int(rng.integers(n))]
    d = np.linalg.norm(X - X[chosen[0]], axis=1)
    for _ in range(1, k):
        w = d**power
        total = w.sum()
        if total > 0:
            idx = int(rng.choice(n, p=w / total))
        else:
            # all remaining mass sits on already-chosen coordinates
            # (duplicate points); fall back to uniform over fresh indices
            fresh = np.setdiff1d(np.arange(n), np.array(chosen))
            idx = int(rng.choice(fresh))
        chosen.append(idx)
        d = np.minimum(d, np.linalg.norm(X - X[idx], axis=1))
    return X[chosen].copy()


def _repair_empty(X: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    """Give each empty cluster the point farthest from its current center
    (skipping points that are the last member of their own cluster)."""
    labels = labels.copy()
    for c in range(k):
        if (labels == c).any():
            continue
        sizes = np.bincount(labels, minlength=k)
        dists = np.linalg.norm(X - centers[labels], axis=1)
        dists[sizes[labels] < 2] = -1.0
        j = int(np.argmax(dists))
        labels[j] = c
    return labels


def refine_lloyd(points, init, mode: str, max_iter: int = 64, tol: float = 1e-7) -> LloydResult:
    """Alternate nearest assignment and center updates until the relative
    cost improvement drops below ``tol`` (or ``max_iter`` passes).

    ``mode`` selects the center update: per-cluster geometric median
    ("median") or centroid ("mean").  Empty clusters are repaired by stealing
    the point farthest from its assigned center.
    """
    X = as_points(points)
    centers = as_points(init).copy()
    if mode not in ("median", "mean"):
        raise ValueError(f"mode must be 'median' or 'mean', got {mode}")
    cost_fn = cost_kmedian if mode == "median" else cost_kmeans
    k = centers.shape[0]
    costs = [cost_fn(X, centers)]
    for _ in range(max_iter):
        labels = nearest_assign(X, centers)
        labels = _repair_empty(X, labels, centers, k)
        for c in range(k):
            pts = X[labels == c]
            if mode == "median":
                centers[c] = weiszfeld_median(pts, tol=1e-8, max_iter=200).point
            else:
                centers[c] = centroid(pts)
        costs.append(cost_fn(X, centers))
        prev, cur = costs[-2], costs[-1]
        if prev <= 0.0 or (prev - cur) < tol * prev:
            break
    return LloydResult(centers=centers, labels=nearest_assign(X, centers),
                       costs=tuple(costs))


def label_error_rate(predicted: np.ndarray, truth: np.ndarray, k: int) -> float:
    """Smallest alpha for which every predicted cluster shares at least a
    (1 - alpha) fraction of max(|predicted_i|, |truth_i|) with its true
    counterpart."""
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    worst = 1.0
    for c in range(k):
        p = predicted == c
        t = truth == c
        bigger = max(int(p.sum()), int(t.sum()))
        if bigger == 0:
            continue
        worst = min(worst, float((p & t).sum()) / bigger)
    return 1.0 - worst


def corrupt_labels(truth, k: int, alpha: float, rng, allow_self: bool = False):
    """Reassign floor(alpha * size) uniformly chosen points of each true
    cluster to a uniformly random destination cluster.

    By default the destination is one of the other k-1 clusters
    (self-reassignment would be a silent no-op); pass ``allow_self`` to draw
    from all k.  Returns the corrupted labels plus a report carrying the
    achieved error rate, recomputed exactly.
    """
    truth = np.asarray(truth, dtype=np.int64)
    labels = truth.copy()
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    if k == 1 and alpha > 0.0 and not allow_self:
        raise ValueError("degenerate corruption: k = 1 leaves no other cluster")
    moved = 0
    for c in range(k):
        # membership comes from the true partition, so points moved into c
        # by an earlier cluster's pass are never re-drawn
        members = np.flatnonzero(truth == c)
        m = int(np.floor(alpha * members.size + 1e-9))
        if m == 0:
            continue
        picks = rng.choice(members, size=m, replace=False)
        if allow_self:
            dest = rng.integers(0, k, size=m)
        else:
            dest = rng.integers(0, k - 1, size=m)
            dest = dest + (dest >= c)
        labels[picks] = dest
        moved += m
    achieved = label_error_rate(labels, truth, k)
    return labels, CorruptionReport(requested_alpha=alpha,
                                    achieved_alpha=achieved, moved=moved)
