"""Benchmark harness: dataset I/O, the experiment protocol and result tables.

Per seed the protocol (1) builds a ground-truth partition (Lloyd refinement
of distance-weighted seeding, unless a labels file supplies one), (2) corrupts
it at the requested rate, and (3) scores three methods on the same corrupted
labels: the ground-truth reference centers, the per-cluster centers recomputed
from the corrupted labels, and the sampling solver.  Records are deterministic
functions of the configuration; wall time is the one unavoidable exception
and can be zeroed via ``timing=False`` when byte-stable output is required.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .geom import as_points, centroid, cost_kmeans, cost_kmedian, nearest_assign, weiszfeld_median
from .kmeans import KMeansCaps, KMeansConfig, kmeans_run
from .kmedian import KMedianCaps, KMedianConfig, run as kmedian_run
from .metrics import ari as ari_score, nmi as nmi_score
from .predictor import corrupt_labels, refine_lloyd, seed_dsampling

__all__ = [
    "CapOverrides",
    "ExperimentConfig",
    "RESULT_COLUMNS",
    "ResultRecord",
    "load_dataset",
    "load_labels",
    "read_results",
    "run_experiment",
    "run_protocol",
    "solve",
    "sweep_alpha",
    "sweep_candidates",
    "write_results",
]

RESULT_COLUMNS = ("method", "k", "alpha_true", "alpha_used", "seed",
                  "cost", "time_ms", "ari", "nmi", "warnings")

METHOD_REFERENCE = "GroundTruthRef"
METHOD_PREDICTOR = "Predictor"
METHOD_SOLVER = "Ours"

# Distinct per-seed RNG streams for ground-truth generation and corruption;
# the solver derives its own streams from (seed, cluster, trial).
_STREAM_GROUND_TRUTH = 1_000_003
_STREAM_CORRUPTION = 1_000_033

_FLOAT_FMT = "{:.17g}"


@dataclass(frozen=True)
class CapOverrides:
    """Optional overrides of the solver cap defaults (None keeps defaults)."""

    max_trials: int | None = None
    max_q_size: int | None = None
    max_r_size: int | None = None
    max_subsets_per_trial: int | None = None
    max_grid_points: int | None = None
    max_candidates_per_cluster: int | None = None

    def _given(self, names) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name in names and getattr(self, f.name) is not None}

    def kmedian_caps(self) -> KMedianCaps:
        names = {f.name for f in fields(KMedianCaps)}
        return replace(KMedianCaps(), **self._given(names))

    def kmeans_caps(self) -> KMeansCaps:
        names = {f.name for f in fields(KMeansCaps)}
        return replace(KMeansCaps(), **self._given(names))


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    labels: str | None = None
    k: int = 10
    mode: str = "kmedian"
    alpha_true: float = 0.2
    sweep: bool = False
    epsilon: float = 0.5
    delta: float = 0.1
    seeds: tuple[int, ...] = tuple(range(10))
    caps: CapOverrides = field(default_factory=CapOverrides)
    out: str | None = None
    fmt: str = "csv"
    header: bool = False
    timing: bool = True

    def validate(self) -> None:
        if self.mode not in ("kmedian", "kmeans"):
            raise ValueError(f"mode must be 'kmedian' or 'kmeans', got {self.mode}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.alpha_true < 1.0:
            raise ValueError(f"alpha_true must be in [0, 1), got {self.alpha_true}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.fmt}")


@dataclass(frozen=True)
class ResultRecord:
    method: str
    k: int
    alpha_true: float
    alpha_used: float
    seed: int
    cost: float
    time_ms: float
    ari: float
    nmi: float
    warnings: str = ""
    # provenance of the corrupted labels this record was scored on; kept in
    # memory only, never serialized
    labels_digest: str = ""


def load_dataset(path, header: bool = False) -> np.ndarray:
    """Parse a delimited numeric text file (comma or whitespace) into an
    (n, d) matrix; rejects ragged rows and non-finite values by line."""
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            line = raw.strip()
            if not line:
                continue
            tokens = line.replace(",", " ").split()
            try:
                values = [float(t) for t in tokens]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
            if any(not math.isfinite(v) for v in values):
                raise ValueError(f"{path}: line {lineno}: non-finite value")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(values)}")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_labels(path, n: int):
    """Parse one integer label per line and remap the distinct values to a
    dense [0, k) range in order of first appearance.  Returns (labels, k)."""
    values: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-integer label") from None
    if len(values) != n:
        raise ValueError(f"{path}: expected {n} labels, got {len(values)}")
    mapping: dict[int, int] = {}
    dense = [mapping.setdefault(v, len(mapping)) for v in values]
    return np.array(dense, dtype=np.int64), len(mapping)


def _cluster_center(pts: np.ndarray, mode: str) -> np.ndarray:
    if mode == "median":
        return weiszfeld_median(pts, tol=1e-8, max_iter=200).point
    return centroid(pts)


def _centers_from_labels(X: np.ndarray, labels: np.ndarray, k: int, mode: str):
    centers = np.empty((k, X.shape[1]))
    warnings = []
    for c in range(k):
        pts = X[labels == c]
        if pts.shape[0] == 0:
            centers[c] = centroid(X)
            warnings.append(f"cluster {c} empty; used dataset centroid")
        else:
            centers[c] = _cluster_center(pts, mode)
    return centers, warnings


def solve(X, labels, k: int, mode: str, alpha: float, epsilon: float,
          delta: float, seed: int, caps: CapOverrides | None = None):
    """Run the sampling solver once.  Returns (centers, warnings, seconds)."""
    caps = caps or CapOverrides()
    start = time.perf_counter()
    if mode == "kmedian":
        cfg = KMedianConfig(alpha=alpha, epsilon=epsilon, delta=delta,
                            seed=seed, caps=caps.kmedian_caps())
        result = kmedian_run(X, labels, k, cfg)
    elif mode == "kmeans":
        cfg = KMeansConfig(alpha=alpha, epsilon=epsilon, delta=delta,
                           seed=seed, caps=caps.kmeans_caps())
        result = kmeans_run(X, labels, k, cfg)
    else:
        raise ValueError(f"mode must be 'kmedian' or 'kmeans', got {mode}")
    return result.centers, list(result.warnings), time.perf_counter() - start


def _ground_truth(X: np.ndarray, cfg: ExperimentConfig, gt_labels, k: int, seed: int):
    center_mode = "median" if cfg.mode == "kmedian" else "mean"
    if gt_labels is not None:
        centers, _ = _centers_from_labels(X, gt_labels, k, center_mode)
        return centers, gt_labels
    rng = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_GROUND_TRUTH]))
    init = seed_dsampling(X, k, power=1 if cfg.mode == "kmedian" else 2, rng=rng)
    lloyd = refine_lloyd(X, init, mode=center_mode, max_iter=64, tol=1e-7)
    return lloyd.centers, lloyd.labels


def sweep_candidates() -> np.ndarray:
    """The ten error-rate values tried by the tuner: uniformly spaced over
    [0.01, 0.5], endpoints included."""
    return np.linspace(0.01, 0.5, 10)


def run_protocol(X, gt_labels, cfg: ExperimentConfig, alphas=None):
    """Score all methods for every (seed, solver alpha) pair.

    ``alphas`` defaults to ``[cfg.alpha_true]``; the sweep passes the
    candidate grid instead.  Within a seed every method sees the identical
    corrupted labels.  Aggregate mean/std rows (seed = -1) are appended per
    (method, alpha) group in first-appearance order.
    """
    cfg.validate()
    X = as_points(X)
    k = cfg.k if gt_labels is None else int(np.max(gt_labels)) + 1
    if alphas is None:
        alphas = [cfg.alpha_true]
    cost_fn = cost_kmedian if cfg.mode == "kmedian" else cost_kmeans
    center_mode = "median" if cfg.mode == "kmedian" else "mean"

    records: list[ResultRecord] = []
    for seed in cfg.seeds:
        gt_centers, truth = _ground_truth(X, cfg, gt_labels, k, seed)
        rng = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_CORRUPTION]))
        corrupted, report = corrupt_labels(truth, k, cfg.alpha_true, rng)
        digest = hashlib.sha256(corrupted.tobytes()).hexdigest()[:16]

        def score(method, centers, alpha_used, seconds, warnings, _seed=seed,
                  _truth=truth, _digest=digest):
            assigned = nearest_assign(X, centers)
            return ResultRecord(
                method=method, k=k, alpha_true=cfg.alpha_true,
                alpha_used=alpha_used, seed=_seed,
                cost=cost_fn(X, centers),
                time_ms=seconds * 1000.0 if cfg.timing else 0.0,
                ari=ari_score(assigned, _truth), nmi=nmi_score(assigned, _truth),
                warnings="|".join(warnings), labels_digest=_digest)

        records.append(score(METHOD_REFERENCE, gt_centers, 0.0, 0.0, []))
        pred_centers, pred_warn = _centers_from_labels(X, corrupted, k, center_mode)
        records.append(score(METHOD_PREDICTOR, pred_centers, 0.0, 0.0, pred_warn))
        for alpha in alphas:
            try:
                centers, warn, seconds = solve(X, corrupted, k, cfg.mode,
                                               float(alpha), cfg.epsilon,
                                               cfg.delta, seed, cfg.caps)
                records.append(score(METHOD_SOLVER, centers, float(alpha),
                                     seconds, warn))
            except Exception as exc:  # keep the table complete on per-run failure
                records.append(ResultRecord(
                    method=METHOD_SOLVER, k=k, alpha_true=cfg.alpha_true,
                    alpha_used=float(alpha), seed=seed, cost=float("inf"),
                    time_ms=0.0, ari=0.0, nmi=0.0,
                    warnings=f"error: {exc}", labels_digest=digest))

    records.extend(_aggregates(records, cfg.alpha_true))
    return records


def _aggregates(records, alpha_true: float):
    groups: dict[tuple, list[ResultRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.alpha_used), []).append(rec)
    out = []
    for (method, alpha_used), recs in groups.items():
        for stat, fn in (("mean", np.mean), ("std", lambda v: np.std(v, ddof=0))):
            out.append(ResultRecord(
                method=f"{method}:{stat}", k=recs[0].k, alpha_true=alpha_true,
                alpha_used=alpha_used, seed=-1,
                cost=float(fn([r.cost for r in recs])),
                time_ms=float(fn([r.time_ms for r in recs])),
                ari=float(fn([r.ari for r in recs])),
                nmi=float(fn([r.nmi for r in recs]))))
    return out


def run_experiment(cfg: ExperimentConfig):
    """Load the configured dataset and run the single-alpha protocol."""
    cfg.validate()
    X = load_dataset(cfg.dataset, cfg.header)
    gt_labels = None
    if cfg.labels:
        gt_labels, _ = load_labels(cfg.labels, X.shape[0])
    return run_protocol(X, gt_labels, cfg)


def best_sweep_alpha(records) -> float:
    """Candidate alpha with the smallest mean solver cost (ties to the
    smaller alpha)."""
    sums: dict[float, list[float]] = {}
    for rec in records:
        if rec.method == METHOD_SOLVER and rec.seed >= 0:
            sums.setdefault(rec.alpha_used, []).append(rec.cost)
    if not sums:
        raise ValueError("no solver records to sweep over")
    best = None
    best_cost = math.inf
    for alpha in sorted(sums):
        mean_cost = float(np.mean(sums[alpha]))
        if mean_cost < best_cost:
            best, best_cost = alpha, mean_cost
    return float(best)


def sweep_alpha(cfg: ExperimentConfig):
    """Tune the solver alpha over ``sweep_candidates()`` on the same
    corrupted labels per seed.  Returns (best_alpha, records)."""
    cfg.validate()
    if not cfg.sweep:
        raise ValueError("sweep_alpha requires cfg.sweep to be set")
    X = load_dataset(cfg.dataset, cfg.header)
    gt_labels = None
    if cfg.labels:
        gt_labels, _ = load_labels(cfg.labels, X.shape[0])
    records = run_protocol(X, gt_labels, cfg, alphas=sweep_candidates())
    return best_sweep_alpha(records), records


def _format_value(value) -> str:
    if isinstance(value, float):
        return _FLOAT_FMT.format(value)
    return str(value)


def write_results(records, path, fmt: str = "csv") -> None:
    """Serialize records with a fixed column order; floats carry 17
    significant digits so a round-trip recovers them exactly."""
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            for rec in records:
                writer.writerow([_format_value(getattr(rec, c)) for c in RESULT_COLUMNS])
    elif fmt == "json":
        payload = [{c: getattr(rec, c) for c in RESULT_COLUMNS} for rec in records]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt}")


def read_results(path, fmt: str = "csv"):
    """Inverse of ``write_results`` (labels digests are not round-tripped)."""
    def build(row: dict) -> ResultRecord:
        return ResultRecord(
            method=row["method"], k=int(row["k"]),
            alpha_true=float(row["alpha_true"]), alpha_used=float(row["alpha_used"]),
            seed=int(row["seed"]), cost=float(row["cost"]),
            time_ms=float(row["time_ms"]), ari=float(row["ari"]),
            nmi=float(row["nmi"]), warnings=str(row["warnings"]))

    if fmt == "csv":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return [build(row) for row in csv.DictReader(fh)]
    if fmt == "json":
        with open(path, "r", encoding="utf-8") as fh:
            return [build(row) for row in json.load(fh)]
    raise ValueError(f"format must be 'csv' or 'json', got {fmt}")
