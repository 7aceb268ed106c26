"""Affine spans of point samples and lattice enumeration inside balls.

A sample of points defines an affine flat (origin plus an orthonormal set of
directions).  Candidate centers are lattice points of a grid laid on that
flat, restricted to a ball around an anchor point.  When the exact lattice
would be too large, enumeration degrades to uniform random lattice sampling
so the candidate count stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geom import as_point, as_points, coord_scale

__all__ = ["AffineBasis", "GridSpec", "build_affine_basis", "enumerate_grid", "project"]

# Lattice membership uses a 1e-9 relative slack so exact boundary points
# (distance == radius up to rounding) are kept.
_BALL_SLACK = 1e-9


@dataclass(frozen=True)
class AffineBasis:
    """An affine flat: ``origin`` plus orthonormal ``directions`` (m rows)."""

    origin: np.ndarray
    directions: np.ndarray

    @property
    def m(self) -> int:
        return self.directions.shape[0]


@dataclass(frozen=True)
class GridSpec:
    """A lattice of spacing ``side`` on ``basis``, anchored at ``center``,
    restricted to the ball of ``radius`` around ``center``."""

    center: np.ndarray
    basis: AffineBasis
    side: float
    radius: float


def build_affine_basis(sample, rank_tol: float = 1e-9) -> AffineBasis:
    """Orthonormal basis of the affine span of ``sample``.

    The origin is the first sample point.  Remaining points contribute
    difference vectors which are orthogonalized sequentially (with one
    re-orthogonalization pass for stability); vectors whose residual norm
    falls below ``rank_tol * scale`` are dropped, so duplicated or nearly
    collinear samples do not inflate the dimension.
    """
    pts = as_points(sample)
    origin = pts[0].copy()
    d = pts.shape[1]
    scale = coord_scale(pts)
    dirs: list[np.ndarray] = []
    if scale > 0.0:
        for v in pts[1:] - origin:
            w = v.astype(np.float64, copy=True)
            for _ in range(2):
                for e in dirs:
                    w -= (w @ e) * e
            nrm = float(np.linalg.norm(w))
            if nrm >= rank_tol * scale:
                dirs.append(w / nrm)
                if len(dirs) == d:
                    break
    directions = np.array(dirs) if dirs else np.empty((0, d))
    return AffineBasis(origin, directions)


def project(p, basis: AffineBasis) -> np.ndarray:
    """Orthogonal projection of ``p`` onto the affine flat of ``basis``."""
    p = as_point(p)
    if p.shape[0] != basis.origin.shape[0]:
        raise ValueError(
            f"dimension mismatch: point has {p.shape[0]}, basis has {basis.origin.shape[0]}"
        )
    rel = p - basis.origin
    if basis.m == 0:
        return basis.origin.copy()
    return basis.origin + basis.directions.T @ (basis.directions @ rel)


def _in_ball(points: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    return np.linalg.norm(points - center, axis=1) <= radius * (1.0 + _BALL_SLACK)


def enumerate_grid(spec: GridSpec, max_points: int, rng=None):
    """Lattice points of ``spec`` inside its ball.

    Returns ``(points, truncated)``.  The lattice is
    ``center + sum_j z_j * side * dir_j`` over integer vectors ``z``; points
    are kept when their Euclidean distance to the center is within the radius
    (with a 1e-9 relative boundary slack).  Enumeration walks the integer box
    ``|z_j| <= radius/side`` in lexicographic order with per-level radius
    pruning.  If more than ``max_points`` lattice points lie in the ball, the
    exhaustive walk is abandoned and exactly ``max_points`` distinct lattice
    points are drawn uniformly from the box with rejection against the ball;
    the result is then flagged truncated.
    """
    if max_points < 1:
        raise ValueError("max_points must be >= 1")
    center = as_point(spec.center)
    side = float(spec.side)
    radius = float(spec.radius)
    if not (np.isfinite(center).all() and np.isfinite(side) and np.isfinite(radius)):
        raise ValueError("grid spec has non-finite fields")
    if side <= 0 or radius <= 0:
        raise ValueError("grid spec requires side > 0 and radius > 0")

    m = spec.basis.m
    if m == 0:
        return center[None, :].copy(), False
    dirs = spec.basis.directions

    # Loose prefilter in coefficient space; the test that decides membership
    # is always the constructed-point distance.
    pre_r = radius * (1.0 + 2.0 * _BALL_SLACK)
    accepted: list[np.ndarray] = []
    z = np.zeros(m)
    overflow = False

    def walk(level: int, acc: float) -> None:
        nonlocal overflow
        if overflow:
            return
        rem = pre_r * pre_r - acc
        if rem < 0:
            return
        lim = int(np.floor(np.sqrt(rem) / side))
        if level == m - 1:
            # vectorize the innermost coordinate
            zj = np.arange(-lim, lim + 1, dtype=np.float64)
            block = np.tile(z, (zj.size, 1))
            block[:, level] = zj
            pts = center + (block * side) @ dirs
            sel = pts[_in_ball(pts, center, radius)]
            if len(accepted) + sel.shape[0] > max_points:
                overflow = True
                return
            accepted.extend(sel)
            return
        for zj in range(-lim, lim + 1):
            z[level] = zj
            walk(level + 1, acc + (zj * side) ** 2)
            if overflow:
                return
        z[level] = 0

    walk(0, 0.0)
    if not overflow:
        return np.array(accepted), False

    if rng is None:
        raise ValueError("rng is required once enumeration exceeds max_points")
    box = int(np.floor(pre_r / side))
    seen: set[bytes] = set()
    out: list[np.ndarray] = []
    batch = max(2048, 4 * max_points)
    while len(out) < max_points:
        zs = rng.integers(-box, box + 1, size=(batch, m))
        keep = np.einsum("ij,ij->i", zs, zs) * side * side <= pre_r * pre_r
        zs = zs[keep]
        pts = center + (zs * side) @ dirs
        ok = _in_ball(pts, center, radius)
        for zrow, prow in zip(zs[ok], pts[ok]):
            key = zrow.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(prow)
                if len(out) == max_points:
                    break
    return np.array(out), True
