"""Euclidean primitives: distances, clustering costs, centroids, and a
Weiszfeld solver for the geometric median.

All reductions run in float64 and iterate points in row order, so repeated
calls on the same inputs are bit-identical.  Tolerances are relative to
``coord_scale`` (the largest coordinate range of the point set), which makes
behaviour independent of the data's magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "MedianResult",
    "as_point",
    "as_points",
    "centroid",
    "coord_scale",
    "cost_kmeans",
    "cost_kmedian",
    "dist",
    "nearest_assign",
    "pairwise_distances",
    "weiszfeld_median",
]


def as_points(x) -> np.ndarray:
    """Coerce ``x`` to an (n, d) float64 matrix and validate it.

    Rejects empty sets, non-2D shapes and non-finite entries.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected an (n, d) point matrix, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"point set must be non-empty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("point set contains non-finite values")
    return arr


def as_point(x) -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 vector."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D point, got shape {arr.shape}")
    return arr


def coord_scale(points) -> float:
    """Largest per-coordinate range of the set; 0 for degenerate sets."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    if arr.ndim == 1:
        arr = arr[None, :]
    return float(np.max(arr.max(axis=0) - arr.min(axis=0)))


def dist(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    p = as_point(p)
    q = as_point(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    return float(np.linalg.norm(p - q))


def pairwise_distances(a, b) -> np.ndarray:
    """Distance matrix between the rows of ``a`` and the rows of ``b``."""
    a = as_points(a)
    b = as_points(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return cdist(a, b)


def cost_kmedian(points, centers) -> float:
    """Sum over points of the distance to the nearest center."""
    d = pairwise_distances(points, centers)
    return float(np.sum(d.min(axis=1)))


def cost_kmeans(points, centers) -> float:
    """Sum over points of the squared distance to the nearest center."""
    d = pairwise_distances(points, centers)
    return float(np.sum(d.min(axis=1) ** 2))


def centroid(points) -> np.ndarray:
    """Coordinate-wise mean of a non-empty point set."""
    pts = as_points(points)
    return pts.mean(axis=0)


def nearest_assign(points, centers) -> np.ndarray:
    """Label each point with the index of its nearest center.

    Ties are broken towards the lowest center index.
    """
    d = pairwise_distances(points, centers)
    return np.argmin(d, axis=1).astype(np.int64)


@dataclass(frozen=True)
class MedianResult:
    """Outcome of a geometric-median search."""

    point: np.ndarray
    cost: float
    iterations: int
    converged: bool


def weiszfeld_median(points, tol: float = 1e-9, max_iter: int = 256) -> MedianResult:
    """Approximate the geometric median by damped reweighted averaging.

    Starts from the centroid and applies the classic reweighted-mean update.
    When an iterate lands on (or within 1e-12 of scale of) a data point the
    plain update divides by zero; in that case the point's subgradient is
    tested directly: if the pull of the remaining points does not exceed the
    anchor's multiplicity the anchor is the exact median, otherwise the
    iterate is nudged 1e-9 of scale along the descent direction and the
    iteration continues.

    ``converged`` is set once the step length drops below ``tol * scale``.
    The best iterate is always returned; non-convergence is reported via the
    flag rather than an exception.
    """
    pts = as_points(points)
    n = pts.shape[0]
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = coord_scale(pts)
    if n == 1 or scale == 0.0:
        z = pts[0].copy()
        return MedianResult(z, float(np.linalg.norm(pts - z, axis=1).sum()), 0, True)

    anchor_eps = 1e-12 * scale
    nudge = 1e-9 * scale
    z = pts.mean(axis=0)
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        diff = pts - z
        d = np.linalg.norm(diff, axis=1)
        near = d <= anchor_eps
        if near.any():
            multiplicity = int(near.sum())
            far = ~near
            if not far.any():
                converged = True
                break
            g = np.sum(-diff[far] / d[far, None], axis=0)
            gnorm = float(np.linalg.norm(g))
            if gnorm <= multiplicity:
                # anchored point satisfies the subgradient optimality test
                z = pts[int(np.argmax(near))].copy()
                converged = True
                break
            z = z - (nudge / gnorm) * g
            continue
        w = 1.0 / d
        z_new = (pts * w[:, None]).sum(axis=0) / w.sum()
        step = float(np.linalg.norm(z_new - z))
        z = z_new
        if step < tol * scale:
            converged = True
            break
    cost = float(np.linalg.norm(pts - z, axis=1).sum())
    return MedianResult(z, cost, it, converged)
