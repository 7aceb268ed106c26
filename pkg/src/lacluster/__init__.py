"""Label-guided k-median/k-means clustering with a benchmark harness.

The solvers exploit a noisy predicted partition: per cluster they sample
small subsets, search candidate centers on low-dimensional grids (k-median)
or among subset centroids (k-means), and keep the candidate whose trimmed
neighborhood is cheapest.  The harness reproduces the full benchmark
protocol (ground-truth generation, label corruption, scoring, tuning) and is
exposed both as a FastAPI service and a CLI client.
"""

__version__ = "0.1.0"

from .geom import (
    MedianResult,
    centroid,
    cost_kmeans,
    cost_kmedian,
    dist,
    nearest_assign,
    weiszfeld_median,
)
from .harness import (
    CapOverrides,
    ExperimentConfig,
    ResultRecord,
    load_dataset,
    load_labels,
    run_experiment,
    sweep_alpha,
    write_results,
)
from .kmeans import KMeansCaps, KMeansConfig, kmeans_run
from .kmedian import KMedianCaps, KMedianConfig, SolveResult, run
from .metrics import ari, kmeans_bound, kmedian_bound, nmi
from .predictor import CorruptionReport, corrupt_labels, refine_lloyd, seed_dsampling
from .subspace import AffineBasis, GridSpec, build_affine_basis, enumerate_grid, project

__all__ = [
    "AffineBasis",
    "CapOverrides",
    "CorruptionReport",
    "ExperimentConfig",
    "GridSpec",
    "KMeansCaps",
    "KMeansConfig",
    "KMedianCaps",
    "KMedianConfig",
    "MedianResult",
    "ResultRecord",
    "SolveResult",
    "__version__",
    "ari",
    "build_affine_basis",
    "centroid",
    "corrupt_labels",
    "cost_kmeans",
    "cost_kmedian",
    "dist",
    "enumerate_grid",
    "kmeans_bound",
    "kmeans_run",
    "kmedian_bound",
    "load_dataset",
    "load_labels",
    "nearest_assign",
    "nmi",
    "project",
    "refine_lloyd",
    "run",
    "run_experiment",
    "seed_dsampling",
    "sweep_alpha",
    "weiszfeld_median",
    "write_results",
]
