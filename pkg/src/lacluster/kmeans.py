"""Label-guided k-means solver.

Same sample-then-greedy structure as the k-median solver, but candidates are
centroids of small subsets of a per-trial sample (the squared-cost center has
a closed form, so no grids are needed) and the winning candidate is replaced
by the centroid of its trimmed neighborhood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import as_points, centroid
from .kmedian import SolveResult, _cluster_rng
from .selection import ceil_exact, greedy_argmin, iter_index_subsets, trimmed_indices, trimmed_size

__all__ = [
    "KMeansCaps",
    "KMeansConfig",
    "KMeansTheorySizes",
    "kmeans_candidates",
    "kmeans_greedy_select",
    "kmeans_run",
    "kmeans_theory_sizes",
]


@dataclass(frozen=True)
class KMeansCaps:
    # The squared-cost constants are genuinely small, so defaults usually
    # leave the subset enumeration exhaustive.
    max_trials: int = 8
    max_r_size: int = 12
    max_subsets_per_trial: int = 256

    def validate(self) -> None:
        for name in ("max_trials", "max_r_size", "max_subsets_per_trial"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class KMeansConfig:
    alpha: float = 0.2
    epsilon: float = 0.5
    delta: float = 0.1
    seed: int = 0
    caps: KMeansCaps = field(default_factory=KMeansCaps)

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must be in [0, 0.5], got {self.alpha}")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        self.caps.validate()


@dataclass(frozen=True)
class KMeansTheorySizes:
    r_size: int
    subset_size: int
    trials: int


def kmeans_theory_sizes(cfg: KMeansConfig, k: int) -> KMeansTheorySizes:
    """Uncapped sample size, subset size and trial count."""
    denom = (1.0 - cfg.alpha) * cfg.epsilon
    if denom <= 0.0:
        raise ValueError("need (1 - alpha) * epsilon > 0")
    return KMeansTheorySizes(
        r_size=ceil_exact(4.0 / denom),
        subset_size=ceil_exact(1.0 / denom),
        trials=ceil_exact(math.log(cfg.delta / k) / math.log(0.75)),
    )


def kmeans_candidates(sample, subset_size: int, cap: int, rng) -> np.ndarray:
    """Centroid of every subset of the given size (exhaustive up to ``cap``,
    then uniformly random distinct subsets)."""
    pts = as_points(sample)
    if subset_size < 1 or subset_size > pts.shape[0]:
        raise ValueError(
            f"subset_size must be in [1, {pts.shape[0]}], got {subset_size}")
    out = [pts[list(subset)].mean(axis=0)
           for subset in iter_index_subsets(pts.shape[0], subset_size, cap, rng)]
    return np.array(out)


def kmeans_greedy_select(cluster, candidates, alpha: float) -> np.ndarray:
    """Candidate minimizing the trimmed squared-distance cost; tie rules
    identical to the k-median greedy."""
    cluster = as_points(cluster)
    candidates = as_points(candidates)
    return candidates[greedy_argmin(cluster, candidates, alpha, squared=True)].copy()


def kmeans_run(points, predicted, k: int, cfg: KMeansConfig) -> SolveResult:
    """Solve one labelled k-means instance.

    Per cluster: sampling trials produce subset-centroid candidates, the
    greedy pass picks the trimmed-cost winner, and the final center is the
    centroid of the winner's trimmed neighborhood (the re-centering step that
    distinguishes the squared-cost variant).
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

    sizes = kmeans_theory_sizes(cfg, k)
    trials = min(sizes.trials, cfg.caps.max_trials)
    centers = np.empty((k, X.shape[1]))
    warnings: list[str] = []
    for i in range(k):
        pts = X[labels == i]
        if pts.shape[0] == 0:
            centers[i] = centroid(X)
            warnings.append(f"cluster {i} empty; used dataset centroid")
            continue
        r_size = min(sizes.r_size, cfg.caps.max_r_size, pts.shape[0])
        subset_size = min(sizes.subset_size, r_size)
        seen: set[bytes] = set()
        pool: list[np.ndarray] = []
        for trial in range(trials):
            rng = _cluster_rng(cfg.seed, i, trial)
            ri = rng.permutation(pts.shape[0])[:r_size]
            for cand in kmeans_candidates(pts[ri], subset_size,
                                          cfg.caps.max_subsets_per_trial, rng):
                key = cand.tobytes()
                if key not in seen:
                    seen.add(key)
                    pool.append(cand)
        if not pool:
            centers[i] = centroid(pts)
            warnings.append(f"cluster {i} produced no candidates; used cluster centroid")
            continue
        best = kmeans_greedy_select(pts, np.array(pool), cfg.alpha)
        m = trimmed_size(pts.shape[0], cfg.alpha)
        idx = trimmed_indices(np.linalg.norm(pts - best, axis=1), m)
        centers[i] = pts[idx].mean(axis=0)
    return SolveResult(centers=centers, warnings=tuple(warnings))
