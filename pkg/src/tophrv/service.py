"""HTTP service exposing the per-computation primitives.

Endpoints wrap pure functions from the core package; each request is
self-contained JSON (FastAPI + pydantic models).  Batch file workflows stay
in the CLI -- this service is for interactive, single-computation use.

Infinite deaths cross the wire as the JSON string ``"inf"`` since JSON has no
infinity literal.
"""

from __future__ import annotations

import math
from typing import Literal, Union

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from .diagrams import INF, PersistenceDiagram
from .distance import bottleneck
from .pstats import PS_DIM, persistence_statistics
from .rips import vr_pd
from .sublevel import sublevel_pd0, sublevel_pd0_at
from .takens import lag_map

app = FastAPI(title="tophrv", version="0.1.0")

Death = Union[float, Literal["inf"]]


class PairModel(BaseModel):
    birth: float
    death: Death

    @classmethod
    def from_pair(cls, b: float, d: float) -> "PairModel":
        return cls(birth=b, death="inf" if d == INF else d)

    def as_tuple(self) -> tuple[float, float]:
        return (self.birth, INF if self.death == "inf" else float(self.death))


class DiagramModel(BaseModel):
    dim: int = Field(ge=0)
    pairs: list[PairModel]

    @classmethod
    def from_diagram(cls, pd: PersistenceDiagram) -> "DiagramModel":
        return cls(dim=pd.dim, pairs=[PairModel.from_pair(b, d) for b, d in pd])

    def as_diagram(self) -> PersistenceDiagram:
        return PersistenceDiagram(self.dim, [p.as_tuple() for p in self.pairs])


class SublevelRequest(BaseModel):
    series: list[float] = Field(min_length=1)
    thresholds: list[float] | None = None

    @field_validator("series")
    @classmethod
    def _finite(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError("series samples must be finite")
        return v


class VrRequest(BaseModel):
    points: list[list[float]] = Field(min_length=1)
    threshold: Death = "inf"
    max_dim: int = Field(default=1, ge=0, le=1)


class DistanceRequest(BaseModel):
    a: DiagramModel
    b: DiagramModel


class DistanceResponse(BaseModel):
    distance: Death


class StatisticsRequest(BaseModel):
    diagram: DiagramModel


class StatisticsResponse(BaseModel):
    values: list[float] = Field(min_length=PS_DIM, max_length=PS_DIM)
    empty: bool


class WindowFeaturesRequest(BaseModel):
    samples: list[float] = Field(min_length=1)
    embed_dim: int = Field(default=120, ge=1)
    lag: int = Field(default=1, ge=1)


class WindowFeaturesResponse(BaseModel):
    features: list[float]


class MetricsRequest(BaseModel):
    confusion: list[list[int]] = Field(min_length=1)


class MetricsResponse(BaseModel):
    se: list[float | None]
    ppv: list[float | None]
    f1: list[float | None]
    acc: float
    ea: float
    kappa: float | None


def _bad_request(exc: Exception):
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/pd/sublevel", response_model=DiagramModel)
def pd_sublevel(req: SublevelRequest) -> DiagramModel:
    try:
        if req.thresholds is not None:
            pd = sublevel_pd0_at(req.series, req.thresholds)
        else:
            pd = sublevel_pd0(req.series)
    except ValueError as exc:
        raise _bad_request(exc)
    return DiagramModel.from_diagram(pd)


@app.post("/pd/vr", response_model=list[DiagramModel])
def pd_vr(req: VrRequest) -> list[DiagramModel]:
    threshold = INF if req.threshold == "inf" else float(req.threshold)
    try:
        cloud = np.asarray(req.points, dtype=np.float64)
        diagrams = vr_pd(cloud, max_dim=req.max_dim, threshold=threshold)
    except ValueError as exc:
        raise _bad_request(exc)
    return [DiagramModel.from_diagram(pd) for pd in diagrams]


@app.post("/distance/bottleneck", response_model=DistanceResponse)
def distance_bottleneck(req: DistanceRequest) -> DistanceResponse:
    try:
        d = bottleneck(req.a.as_diagram(), req.b.as_diagram())
    except ValueError as exc:
        raise _bad_request(exc)
    return DistanceResponse(distance="inf" if d == INF else d)


@app.post("/statistics", response_model=StatisticsResponse)
def statistics(req: StatisticsRequest) -> StatisticsResponse:
    try:
        ps = persistence_statistics(req.diagram.as_diagram())
    except ValueError as exc:
        raise _bad_request(exc)
    return StatisticsResponse(values=[float(v) for v in ps.values], empty=ps.empty)


@app.post("/features/window", response_model=WindowFeaturesResponse)
def window_features(req: WindowFeaturesRequest) -> WindowFeaturesResponse:
    from .pipeline import EpochWindow, extract_features

    try:
        window = EpochWindow(
            recording_id="",
            epoch_index=0,
            samples=np.asarray(req.samples, dtype=np.float64),
            label=0,
        )
        row = extract_features(window, embed_dim=req.embed_dim, lag=req.lag)
    except ValueError as exc:
        raise _bad_request(exc)
    return WindowFeaturesResponse(features=[float(v) for v in row.features])


@app.post("/metrics", response_model=MetricsResponse)
def confusion_metrics(req: MetricsRequest) -> MetricsResponse:
    from .learn import metrics

    M = req.confusion
    if any(len(row) != len(M) for row in M):
        raise _bad_request(ValueError("confusion matrix must be square"))
    if any(v < 0 for row in M for v in row):
        raise _bad_request(ValueError("confusion counts must be >= 0"))
    try:
        out = metrics(M)
    except ValueError as exc:
        raise _bad_request(exc)

    def clean(arr):
        return [None if not math.isfinite(v) else float(v) for v in arr]

    kappa = out["kappa"]
    return MetricsResponse(
        se=clean(out["se"]),
        ppv=clean(out["ppv"]),
        f1=clean(out["f1"]),
        acc=out["acc"],
        ea=out["ea"],
        kappa=None if not math.isfinite(kappa) else kappa,
    )
