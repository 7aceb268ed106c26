"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CapsModel(BaseModel):
    max_trials: Optional[int] = None
    max_q_size: Optional[int] = None
    max_r_size: Optional[int] = None
    max_subsets_per_trial: Optional[int] = None
    max_grid_points: Optional[int] = None
    max_candidates_per_cluster: Optional[int] = None


class SolveRequest(BaseModel):
    points: list[list[float]]
    labels: list[int]
    k: int = Field(ge=1)
    mode: Literal["kmedian", "kmeans"] = "kmedian"
    alpha: float = 0.2
    epsilon: float = 0.5
    delta: float = 0.1
    seed: int = 0
    caps: Optional[CapsModel] = None


class SolveResponse(BaseModel):
    centers: list[list[float]]
    cost: float
    time_ms: float
    warnings: list[str]


class ExperimentRequest(BaseModel):
    points: list[list[float]]
    labels: Optional[list[int]] = None
    k: int = Field(default=10, ge=1)
    mode: Literal["kmedian", "kmeans"] = "kmedian"
    alpha_true: float = 0.2
    epsilon: float = 0.5
    delta: float = 0.1
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    sweep: bool = False
    timing: bool = True
    caps: Optional[CapsModel] = None


class RecordModel(BaseModel):
    method: str
    k: int
    alpha_true: float
    alpha_used: float
    seed: int
    cost: float
    time_ms: float
    ari: float
    nmi: float
    warnings: str


class ExperimentResponse(BaseModel):
    records: list[RecordModel]
    best_alpha: Optional[float] = None


class MetricsRequest(BaseModel):
    labels_a: list[int]
    labels_b: list[int]


class MetricsResponse(BaseModel):
    ari: float
    nmi: float


class BoundRequest(BaseModel):
    mode: Literal["kmedian", "kmeans"] = "kmedian"
    alpha: float
    epsilon: float


class BoundResponse(BaseModel):
    ratio: float


class HealthResponse(BaseModel):
    status: str
    version: str
