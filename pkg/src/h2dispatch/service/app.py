"""FastAPI application exposing the dispatch study endpoints.

Solves can take minutes on long horizons, so the service is the natural
long-running home for the solver; the CLI is a thin client posting scenario
payloads here. A solve that proves the model infeasible is a successful
computation: it comes back 200 with ``status: infeasible``. Malformed
scenarios are a 400.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bounds import classification_counts, classify_hours, compute_price_range, \
    price_histogram
from ..runner import RunSpec, run_compare, run_single, run_sweep
from ..scenario import PlantScenario, ScenarioError, scenario_from_dict
from ..segmentation import build_segments
from . import schemas


def _to_scenario(payload: schemas.ScenarioPayload) -> PlantScenario:
    try:
        return scenario_from_dict(payload.model_dump())
    except ScenarioError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"bad scenario: {exc}") from exc


def _to_spec(model: schemas.RunSpecModel) -> RunSpec:
    return RunSpec(**model.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(title="h2dispatch", version=__version__,
                  description="Day-ahead dispatch optimization of a "
                              "wind-electrolyzer-storage hybrid plant")

    @app.get("/api/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/api/solve", response_model=schemas.SolveResponse)
    def solve(request: schemas.SolveRequest) -> schemas.SolveResponse:
        from ..runner import bounds_payload, report_payload, schedule_rows
        scn = _to_scenario(request.scenario)
        try:
            result = run_single(_to_spec(request.spec), scn)
        except (ScenarioError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.SolveResponse(
            status=result.status,
            report=report_payload(result),
            bounds=bounds_payload(result),
            schedule=schedule_rows(result),
            histogram=price_histogram(result.scenario.prices),
        )

    @app.post("/api/compare", response_model=schemas.CompareResponse)
    def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
        scn = _to_scenario(request.scenario)
        try:
            table = run_compare([_to_spec(s) for s in request.specs], scn)
        except (ScenarioError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.CompareResponse(**table)

    @app.post("/api/sweep", response_model=schemas.SweepResponse)
    def sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
        scn = _to_scenario(request.scenario)
        try:
            report = run_sweep(request.axis, request.values, scn,
                               base_spec=_to_spec(request.spec),
                               segment_pair=request.segment_pair)
        except (ScenarioError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.SweepResponse(**report)

    @app.post("/api/bounds", response_model=schemas.BoundsResponse)
    def bounds(request: schemas.BoundsRequest) -> schemas.BoundsResponse:
        scn = _to_scenario(request.scenario)
        price_range = compute_price_range(scn.physics, scn)
        counts = classification_counts(classify_hours(price_range, scn.prices))
        return schemas.BoundsResponse(
            price_range=price_range.to_json_dict(),
            hours_below=counts["below"],
            hours_inside=counts["inside"],
            hours_above=counts["above"],
            histogram=price_histogram(scn.prices, request.histogram_bin_eur),
        )

    @app.post("/api/segments", response_model=schemas.SegmentsResponse)
    def segments(request: schemas.SegmentsRequest) -> schemas.SegmentsResponse:
        scn = _to_scenario(request.scenario)
        seg = build_segments(scn.physics, request.segments, scn.p_min)
        return schemas.SegmentsResponse(segments=seg.to_json_dict())

    return app


app = create_app()
