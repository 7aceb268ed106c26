"""FastAPI service wrapping the clustering library.

Clients ship point matrices inline; the experiment endpoint runs the full
benchmark protocol server-side and returns the result records, which the CLI
then writes to disk.  Domain validation failures surface as HTTP 400.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..geom import cost_kmeans, cost_kmedian
from ..harness import (
    CapOverrides,
    ExperimentConfig,
    best_sweep_alpha,
    run_protocol,
    solve,
    sweep_candidates,
)
from ..metrics import ari, kmeans_bound, kmedian_bound, nmi
from . import schemas

_INLINE_DATASET = "<inline>"


def _cap_overrides(model: schemas.CapsModel | None) -> CapOverrides:
    if model is None:
        return CapOverrides()
    return CapOverrides(**model.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(title="lacluster", version=__version__)

    @app.exception_handler(ValueError)
    async def value_error_handler(_: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve_endpoint(req: schemas.SolveRequest):
        X = np.asarray(req.points, dtype=np.float64)
        labels = np.asarray(req.labels, dtype=np.int64)
        centers, warnings, seconds = solve(
            X, labels, req.k, req.mode, req.alpha, req.epsilon, req.delta,
            req.seed, _cap_overrides(req.caps))
        cost_fn = cost_kmedian if req.mode == "kmedian" else cost_kmeans
        return schemas.SolveResponse(
            centers=centers.tolist(), cost=cost_fn(X, centers),
            time_ms=seconds * 1000.0, warnings=warnings)

    @app.post("/experiment", response_model=schemas.ExperimentResponse)
    def experiment_endpoint(req: schemas.ExperimentRequest):
        X = np.asarray(req.points, dtype=np.float64)
        gt = None if req.labels is None else np.asarray(req.labels, dtype=np.int64)
        cfg = ExperimentConfig(
            dataset=_INLINE_DATASET, k=req.k, mode=req.mode,
            alpha_true=req.alpha_true, sweep=req.sweep, epsilon=req.epsilon,
            delta=req.delta, seeds=tuple(req.seeds),
            caps=_cap_overrides(req.caps), timing=req.timing)
        alphas = sweep_candidates() if req.sweep else None
        records = run_protocol(X, gt, cfg, alphas=alphas)
        best = best_sweep_alpha(records) if req.sweep else None
        return schemas.ExperimentResponse(
            records=[schemas.RecordModel(
                method=r.method, k=r.k, alpha_true=r.alpha_true,
                alpha_used=r.alpha_used, seed=r.seed, cost=r.cost,
                time_ms=r.time_ms, ari=r.ari, nmi=r.nmi, warnings=r.warnings)
                for r in records],
            best_alpha=best)

    @app.post("/metrics", response_model=schemas.MetricsResponse)
    def metrics_endpoint(req: schemas.MetricsRequest):
        return schemas.MetricsResponse(ari=ari(req.labels_a, req.labels_b),
                                       nmi=nmi(req.labels_a, req.labels_b))

    @app.post("/bound", response_model=schemas.BoundResponse)
    def bound_endpoint(req: schemas.BoundRequest):
        fn = kmedian_bound if req.mode == "kmedian" else kmeans_bound
        return schemas.BoundResponse(ratio=fn(req.alpha, req.epsilon))

    return app


app = create_app()
