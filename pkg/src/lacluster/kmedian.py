"""Label-guided k-median solver.

Each predicted cluster is processed independently: repeated sampling trials
estimate the cluster's cost scale, a ladder of dyadic scales drives grid
construction on the affine span of a second sample, and a greedy pass picks
the candidate whose trimmed neighborhood is cheapest.

The theoretical sample sizes are enormous for small ``alpha * epsilon``, so
every size is clamped by explicit caps; the caps keep runtime linear in the
cluster size while preserving the sampling structure.  Alongside the grid
candidates, each cluster also contributes its own robust anchors (the cluster
median and its trimmed refinements), which guarantees the greedy pass never
does worse than the plain per-cluster median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import as_points, centroid, coord_scale, cost_kmedian, weiszfeld_median
from .selection import (
    ceil_exact,
    greedy_argmin,
    iter_index_subsets,
    trimmed_indices,
    trimmed_size,
)
from .subspace import GridSpec, build_affine_basis, enumerate_grid

__all__ = [
    "KMedianCaps",
    "KMedianConfig",
    "ScaleLadder",
    "SolveResult",
    "TheorySizes",
    "collect_candidates",
    "csc",
    "greedy_select",
    "run",
    "scale_ladder",
    "theory_sizes",
]

# Below this error rate the theoretical sample sizes blow up (or are
# undefined at exactly zero), so capped sizes are used directly.
MIN_THEORY_ALPHA = 0.01

# Anchor-candidate refinement: re-center on the trimmed neighborhood at most
# this many times (stops early at a fixed point).
_REFINE_ROUNDS = 6

# The realised per-cluster error rate can exceed the nominal one (corruption
# both removes points and injects foreign ones), so refinement chains are run
# at amplified trim levels as well; the greedy pass arbitrates.
_REFINE_AMPLIFY = (1.0, 1.5, 2.0)
_REFINE_TRIM_CAP = 0.45

_WEISZFELD_TOL = 1e-8
_WEISZFELD_ITERS = 200


@dataclass(frozen=True)
class KMedianCaps:
    """Practical limits on the theoretical sample/candidate sizes."""

    max_trials: int = 8
    max_q_size: int = 26
    max_r_size: int = 8
    max_subsets_per_trial: int = 16
    max_grid_points: int = 512
    max_candidates_per_cluster: int = 4096

    def validate(self) -> None:
        for name in ("max_trials", "max_q_size", "max_r_size",
                     "max_subsets_per_trial", "max_grid_points",
                     "max_candidates_per_cluster"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class KMedianConfig:
    """Solver parameters.

    ``alpha`` is the assumed label error rate, ``epsilon`` the accuracy
    parameter, ``delta`` the failure probability and ``zeta`` the scale
    estimation parameter (must stay below 1/12).
    """

    alpha: float = 0.2
    epsilon: float = 0.5
    delta: float = 0.1
    zeta: float = 1.0 / 13.0
    seed: int = 0
    caps: KMedianCaps = field(default_factory=KMedianCaps)

    def validate(self) -> None:
        # alpha == 0.5 is allowed mechanically (the sweep includes it) even
        # though the quality guarantee only covers alpha < 0.5.
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must be in [0, 0.5], got {self.alpha}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 < self.zeta < 1.0 / 12.0:
            raise ValueError(f"zeta must be in (0, 1/12), got {self.zeta}")
        self.caps.validate()


@dataclass(frozen=True)
class TheorySizes:
    q_size: int
    r_size: int
    trials: int


@dataclass(frozen=True)
class ScaleLadder:
    """Dyadic scales t = 2^l bracketing a cluster's average cost estimate."""

    v: float
    a: float
    b: float
    levels: tuple[int, ...]
    scales: tuple[float, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class SolveResult:
    centers: np.ndarray
    warnings: tuple[str, ...] = ()


def trial_count(delta: float, k: int) -> int:
    """Number of sampling trials per cluster: ceil(ln(delta/k) / ln(0.975))."""
    return ceil_exact(math.log(delta / k) / math.log(0.975))


def theory_sizes(cfg: KMedianConfig, k: int) -> TheorySizes:
    """Uncapped sample sizes.  Undefined at alpha = 0 (the second sample's
    size diverges), in which case capped sizes must be used instead."""
    if cfg.alpha <= 0.0:
        raise ValueError("theory sizes unavailable at alpha = 0; caps required")
    if cfg.alpha > 0.5:
        raise ValueError(f"alpha must be in (0, 0.5], got {cfg.alpha}")
    q = ceil_exact(2.0 / ((1.0 - cfg.alpha) * cfg.zeta))
    half = cfg.alpha * cfg.epsilon / 2.0
    r = ceil_exact(4.0 * math.log(1.0 / half) / ((1.0 - cfg.alpha) * half**3))
    return TheorySizes(q_size=q, r_size=r, trials=trial_count(cfg.delta, k))


def scale_ladder(sample, anchor, zeta: float) -> ScaleLadder:
    """Build the dyadic scale ladder from a subset's cost to its anchor.

    With v as the subset cost, scales run from 2^floor(log2(v*zeta^3/2)) up to
    2^ceil(log2(v/zeta)).  A zero-cost subset (all points equal to the anchor)
    yields a single tiny surrogate scale so downstream grids stay valid.
    """
    pts = as_points(sample)
    v = cost_kmedian(pts, np.asarray(anchor, dtype=np.float64)[None, :])
    if v <= 0.0:
        floor_t = max(1e-12, 1e-9 * coord_scale(np.vstack([pts, np.atleast_2d(anchor)])))
        return ScaleLadder(v=0.0, a=0.0, b=0.0, levels=(), scales=(floor_t,),
                           degenerate=True)
    a = v * zeta**3 / 2.0
    b = v / zeta
    lo = int(math.floor(math.log2(a)))
    hi = int(math.ceil(math.log2(b)))
    levels = tuple(range(lo, hi + 1))
    return ScaleLadder(v=v, a=a, b=b, levels=levels,
                       scales=tuple(2.0**l for l in levels))


def csc(sample, t: float, alpha: float, epsilon: float, caps: KMedianCaps, rng) -> np.ndarray:
    """Candidate centers for one scale: grids on the span of ``sample``.

    The grid spacing is ``alpha * epsilon * t / (4 |sample|)``; around every
    sample point a lattice restricted to the ball of radius ``2 t`` is
    enumerated (or randomly thinned to ``caps.max_grid_points``).  Returns
    the deduplicated union in generation order.
    """
    pts = as_points(sample)
    if t <= 0.0 or alpha * epsilon == 0.0:
        raise ValueError("invalid scale: need t > 0 and alpha * epsilon > 0")
    theta = alpha * epsilon * t / (4.0 * pts.shape[0])
    basis = build_affine_basis(pts)
    seen: set[bytes] = set()
    out: list[np.ndarray] = []
    for r in pts:
        spec = GridSpec(center=r, basis=basis, side=theta, radius=2.0 * t)
        grid_pts, _ = enumerate_grid(spec, caps.max_grid_points, rng)
        for p in grid_pts:
            key = p.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(p)
    return np.array(out)


def greedy_select(cluster, candidates, alpha: float) -> np.ndarray:
    """Candidate minimizing the trimmed distance cost over the cluster.

    Scores each candidate on its ceil((1-alpha)*n) nearest cluster points
    (ties between points by index, ties between candidates by order).
    """
    cluster = as_points(cluster)
    candidates = as_points(candidates)
    return candidates[greedy_argmin(cluster, candidates, alpha, squared=False)].copy()


def _cluster_rng(seed: int, cluster_index: int, trial: int):
    return np.random.default_rng(np.random.SeedSequence([seed, cluster_index, trial]))


def _split_sample(pts: np.ndarray, q_size: int, r_size: int, rng):
    """Draw the anchor point plus two disjoint subsets without replacement.

    Clusters too small to honour the requested sizes shrink them
    proportionally (never below one point); in the degenerate 1-2 point case
    disjointness is abandoned rather than failing.
    """
    n = pts.shape[0]
    if q_size + r_size + 1 > n:
        f = (n - 1) / (q_size + r_size)
        q_size = max(1, int(q_size * f))
        r_size = max(1, int(r_size * f))
    perm = rng.permutation(n)
    y = pts[perm[0]]
    qi = perm[1:1 + q_size]
    ri = perm[1 + q_size:1 + q_size + r_size]
    if qi.size == 0:
        qi = perm[:1]
    if ri.size == 0:
        ri = perm[-min(r_size, n):]
    return y, pts[qi], pts[ri]


def _anchor_candidates(pts: np.ndarray, alpha: float) -> list[np.ndarray]:
    """Robust per-cluster anchors: the cluster median plus trimmed-median
    refinement chains (re-center on the trimmed neighborhood until stable) at
    the nominal and amplified trim levels."""
    med = weiszfeld_median(pts, tol=_WEISZFELD_TOL, max_iter=_WEISZFELD_ITERS).point
    anchors = [med]
    levels = sorted({min(_REFINE_TRIM_CAP, f * alpha) if alpha > 0 else 0.0
                     for f in _REFINE_AMPLIFY})
    for level in levels:
        m = trimmed_size(pts.shape[0], level)
        c = med
        for _ in range(_REFINE_ROUNDS):
            idx = trimmed_indices(np.linalg.norm(pts - c, axis=1), m)
            c = weiszfeld_median(pts[idx], tol=_WEISZFELD_TOL,
                                 max_iter=_WEISZFELD_ITERS).point
            if any(np.array_equal(c, a) for a in anchors):
                break
            anchors.append(c)
    return anchors


def collect_candidates(pts, k: int, cluster_index: int, cfg: KMedianConfig) -> np.ndarray:
    """Candidate pool for one predicted cluster.

    Anchors come first, then grid candidates in trial order; the pool is
    deduplicated by exact coordinates and capped at
    ``caps.max_candidates_per_cluster`` by insertion order.
    """
    pts = as_points(pts)
    cfg.validate()
    caps = cfg.caps
    cap = caps.max_candidates_per_cluster
    seen: set[bytes] = set()
    pool: list[np.ndarray] = []

    def add(p: np.ndarray) -> bool:
        key = p.tobytes()
        if key not in seen:
            seen.add(key)
            pool.append(p)
        return len(pool) < cap

    for p in _anchor_candidates(pts, cfg.alpha):
        if not add(p):
            return np.array(pool)

    if cfg.alpha * cfg.epsilon == 0.0:
        # grid spacing is undefined without both alpha and epsilon; the
        # anchors alone carry the cluster
        return np.array(pool)

    if cfg.alpha >= MIN_THEORY_ALPHA:
        sizes = theory_sizes(cfg, k)
        q_size, r_size = sizes.q_size, sizes.r_size
    else:
        q_size, r_size = caps.max_q_size, caps.max_r_size
    q_size = min(q_size, caps.max_q_size)
    r_size = min(r_size, caps.max_r_size)
    trials = min(trial_count(cfg.delta, k), caps.max_trials)
    subset_size = ceil_exact(1.0 / cfg.zeta)

    for trial in range(trials):
        rng = _cluster_rng(cfg.seed, cluster_index, trial)
        y, q_pts, r_pts = _split_sample(pts, q_size, r_size, rng)
        size = min(subset_size, q_pts.shape[0])
        for subset in iter_index_subsets(q_pts.shape[0], size,
                                         caps.max_subsets_per_trial, rng):
            ladder = scale_ladder(q_pts[list(subset)], y, cfg.zeta)
            for t in ladder.scales:
                for p in csc(r_pts, t, cfg.alpha, cfg.epsilon, caps, rng):
                    if not add(p):
                        return np.array(pool)
    return np.array(pool)


def run(points, predicted, k: int, cfg: KMedianConfig) -> SolveResult:
    """Solve one labelled k-median instance.

    Clusters are processed independently with RNG streams derived from
    ``(cfg.seed, cluster, trial)``, so the output is a pure function of the
    inputs.  An empty predicted cluster falls back to the dataset centroid
    (with a warning); a cluster with no candidates falls back to its own
    median.
    """
    X = as_points(points)
    labels = np.asarray(predicted, dtype=np.int64)
    if labels.shape != (X.shape[0],):
        raise ValueError("predicted labels must be one id per point")
    if k < 1:
        raise ValueError("k must be >= 1")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError("labels out of range [0, k)")
    cfg.validate()

    centers = np.empty((k, X.shape[1]))
    warnings: list[str] = []
    for i in range(k):
        pts = X[labels == i]
        if pts.shape[0] == 0:
            centers[i] = centroid(X)
            warnings.append(f"cluster {i} empty; used dataset centroid")
            continue
        pool = collect_candidates(pts, k, i, cfg)
        if pool.shape[0] == 0:
            centers[i] = weiszfeld_median(pts, tol=_WEISZFELD_TOL,
                                          max_iter=_WEISZFELD_ITERS).point
            warnings.append(f"cluster {i} produced no candidates; used cluster median")
            continue
        centers[i] = greedy_select(pts, pool, cfg.alpha)
    return SolveResult(centers=centers, warnings=tuple(warnings))
