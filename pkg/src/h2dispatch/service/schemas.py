"""Request and response bodies for the dispatch service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ModelName = Literal["oos", "oo", "os"]
SegmentCount = Literal[1, 2, 4, 8, 12]
SweepAxis = Literal["wind_ratio", "demand", "hydrogen_price"]


class DemandWindowModel(BaseModel):
    hours: list[int]
    min_kg: float = Field(ge=0.0)


class ScenarioPayload(BaseModel):
    """Scenario in wire form: parsed config plus raw hourly series.

    Wind is either capacity factors (scaled by the configured wind capacity)
    or direct MW values. Without an explicit demand list, the config's daily
    minimum is applied to 24-hour blocks.
    """

    config: dict
    prices: list[float]
    capacity_factors: Optional[list[float]] = None
    wind_mw: Optional[list[float]] = None
    timestamps: list[str] = []
    demand: Optional[list[DemandWindowModel]] = None


class RunSpecModel(BaseModel):
    model: ModelName = "oos"
    segments: SegmentCount = 2
    gap: float = Field(default=1e-4, gt=0.0)
    node_limit: int = Field(default=50_000, ge=1)
    horizon_start: int = Field(default=0, ge=0)
    horizon_hours: Optional[int] = Field(default=None, ge=1)
    deterministic: bool = True
    threads: int = Field(default=1, ge=1)


class SolveRequest(BaseModel):
    scenario: ScenarioPayload
    spec: RunSpecModel = RunSpecModel()


class CompareRequest(BaseModel):
    scenario: ScenarioPayload
    specs: list[RunSpecModel] = Field(min_length=2)


class SweepRequest(BaseModel):
    scenario: ScenarioPayload
    axis: SweepAxis
    values: list[float] = Field(min_length=1)
    spec: RunSpecModel = RunSpecModel()
    segment_pair: tuple[SegmentCount, SegmentCount] = (1, 12)


class BoundsRequest(BaseModel):
    scenario: ScenarioPayload
    histogram_bin_eur: float = Field(default=2.0, gt=0.0)


class SegmentsRequest(BaseModel):
    scenario: ScenarioPayload
    segments: SegmentCount = 2


class HealthResponse(BaseModel):
    status: str
    version: str


class SolveResponse(BaseModel):
    status: str
    report: dict
    bounds: dict
    schedule: list[dict]
    histogram: list[tuple[float, float, int]]


class CompareResponse(BaseModel):
    benchmark: Optional[str]
    rows: list[dict]
    errors: list[dict]


class SweepResponse(BaseModel):
    axis: str
    points: list[dict]


class BoundsResponse(BaseModel):
    price_range: dict
    hours_below: int
    hours_inside: int
    hours_above: int
    histogram: list[tuple[float, float, int]]


class SegmentsResponse(BaseModel):
    segments: dict
