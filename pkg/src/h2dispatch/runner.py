"""Study orchestration: single runs, variant comparisons, sensitivity sweeps.

This is the layer the HTTP service and the CLI both sit on. A single run
slices the horizon, linearizes the production curve, builds and solves the
chosen MILP variant, decodes and verifies the schedule, re-evaluates the
true curve ex post, and computes the price-range screening. Compare runs a
list of specs on one scenario and ranks them against the best realized
profit; sweep re-derives the scenario along one input axis and reports how
much curve detail matters at each point.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, replace

from . import bounds as bounds_mod
from .expost import ExPostReport, evaluate
from .milp.branch_bound import solve_milp
from .models import MODEL_VARIANTS, BuiltModel, DispatchSchedule, build_model, \
    decode_solution
from .scenario import DemandWindow, PlantScenario, slice_horizon
from .segmentation import SUPPORTED_SEGMENT_COUNTS, SegmentSet, build_segments

SWEEP_AXES = ("wind_ratio", "demand", "hydrogen_price")


@dataclass(frozen=True)
class RunSpec:
    """One solver run: model variant, curve detail, horizon window, limits."""

    model: str = "oos"
    segments: int = 2
    gap: float = 1e-4
    node_limit: int = 50_000
    horizon_start: int = 0
    horizon_hours: int | None = None
    deterministic: bool = True
    threads: int = 1

    def __post_init__(self) -> None:
        if self.model not in MODEL_VARIANTS:
            raise ValueError(f"model must be one of {MODEL_VARIANTS}, got {self.model!r}")
        if self.segments not in SUPPORTED_SEGMENT_COUNTS:
            raise ValueError(
                f"segments must be one of {SUPPORTED_SEGMENT_COUNTS}, got {self.segments}")
        if self.gap <= 0.0:
            raise ValueError("gap must be positive")

    @property
    def label(self) -> str:
        return f"{self.model.upper()}-{self.segments}"


@dataclass(frozen=True)
class RunResult:
    """Everything a single run produces, pre-serialization."""

    status: str                    # ok | infeasible | node-limit
    spec: RunSpec
    scenario: PlantScenario
    segments: SegmentSet
    price_range: bounds_mod.PriceRange
    price_tags: list[str]
    schedule: DispatchSchedule | None
    expost: ExPostReport | None
    solver: dict


def run_single(spec: RunSpec, scenario: PlantScenario) -> RunResult:
    scn = scenario
    if spec.horizon_hours is not None or spec.horizon_start:
        hours = spec.horizon_hours if spec.horizon_hours is not None \
            else scenario.horizon - spec.horizon_start
        scn = slice_horizon(scenario, spec.horizon_start, hours)
    seg = build_segments(scn.physics, spec.segments, scn.p_min)
    built = build_model(spec.model, scn, seg)
    sol = solve_milp(built.instance, gap=spec.gap, node_limit=spec.node_limit,
                     threads=spec.threads, deterministic=spec.deterministic)
    price_range = bounds_mod.compute_price_range(scn.physics, scn)
    tags = bounds_mod.classify_hours(price_range, scn.prices)
    solver_stats = {
        "status": sol.status,
        "objective_eur": None if sol.values is None else sol.objective,
        "best_bound_eur": None if not math.isfinite(sol.bound) else sol.bound,
        "relative_gap": None if not math.isfinite(sol.relative_gap) else sol.relative_gap,
        "gap_target": sol.gap_target,
        "nodes": sol.nodes,
        "lp_iterations": sol.lp_iterations,
        "wall_time_s": sol.wall_time_s,
    }
    if sol.status == "infeasible":
        return RunResult(status="infeasible", spec=spec, scenario=scn, segments=seg,
                         price_range=price_range, price_tags=tags, schedule=None,
                         expost=None, solver=solver_stats)
    status = "node-limit" if sol.status == "node-limit" else "ok"
    schedule = expost_report = None
    if sol.values is not None:
        schedule = decode_solution(built, sol)
        expost_report = evaluate(schedule, scn.physics, scn)
    return RunResult(status=status, spec=spec, scenario=scn, segments=seg,
                     price_range=price_range, price_tags=tags, schedule=schedule,
                     expost=expost_report, solver=solver_stats)


# -- serialization ----------------------------------------------------------

def schedule_rows(result: RunResult) -> list[dict]:
    if result.schedule is None:
        return []
    deltas = result.expost.delta_h_kg if result.expost else ()
    rows = []
    for h in result.schedule.hours:
        rows.append({
            "hour": h.hour,
            "state": h.state,
            "segment": -1 if h.segment is None else h.segment,
            "power_mw": h.power_mw,
            "hydrogen_kg": h.hydrogen_kg,
            "hydrogen_realized_kg": h.hydrogen_kg + (deltas[h.hour] if deltas else 0.0),
            "delta_h_kg": deltas[h.hour] if deltas else 0.0,
            "hydrogen_direct_kg": h.hydrogen_direct_kg,
            "sold_kg": h.sold_kg,
            "storage_in_kg": h.storage_in_kg,
            "storage_out_kg": h.storage_out_kg,
            "storage_kg": h.storage_kg,
            "grid_sale_mw": h.grid_sale_mw,
            "grid_buy_mw": h.grid_buy_mw,
            "compressor_mw": h.compressor_mw,
            "startup": int(h.startup),
        })
    return rows


def report_payload(result: RunResult) -> dict:
    counts = result.schedule.state_counts() if result.schedule else None
    payload = {
        "status": result.status,
        "run": {
            "model": result.spec.model,
            "segments": result.spec.segments,
            "gap": result.spec.gap,
            "node_limit": result.spec.node_limit,
            "horizon_start": result.spec.horizon_start,
            "horizon_hours": result.scenario.horizon,
            "deterministic": result.spec.deterministic,
            "threads": result.spec.threads,
            "label": result.spec.label,
        },
        "solver": result.solver,
        "segments": result.segments.to_json_dict(),
        "profit_eur": None,
        "hydrogen_kg": None,
        "schedule_summary": None,
    }
    if result.schedule and result.expost:
        payload["profit_eur"] = {
            "estimated": result.expost.estimated_profit_eur,
            "realized_surplus": result.expost.surplus_profit_eur,
            "realized_total": result.expost.realized_profit_eur,
        }
        payload["hydrogen_kg"] = {
            "estimated": result.expost.estimated_hydrogen_kg,
            "realized_surplus": result.expost.surplus_hydrogen_kg,
            "realized_total": result.expost.realized_hydrogen_kg,
            "extra_compressor_mwh": result.expost.extra_compressor_mwh,
        }
        payload["schedule_summary"] = {
            "hours": result.schedule.horizon,
            "on_hours": counts["on"],
            "standby_hours": counts["standby"],
            "off_hours": counts["off"],
            "startups": result.schedule.startup_count,
            "final_storage_kg": result.schedule.hours[-1].storage_kg,
        }
    return payload


def bounds_payload(result: RunResult) -> dict:
    counts = bounds_mod.classification_counts(result.price_tags)
    return {
        "price_range": result.price_range.to_json_dict(),
        "hours_below": counts["below"],
        "hours_inside": counts["inside"],
        "hours_above": counts["above"],
    }


def write_run_files(out_dir, report: dict, bounds: dict, schedule: list[dict],
                    histogram: list) -> list[str]:
    """Write the single-run artifact set; shared by the library path and the
    CLI writing from service responses."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=1)
    written.append(report_path)

    bounds_path = os.path.join(out_dir, "bounds.json")
    with open(bounds_path, "w", encoding="utf-8") as fh:
        json.dump(bounds, fh, indent=1)
    written.append(bounds_path)

    if schedule:
        sched_path = os.path.join(out_dir, "schedule.csv")
        with open(sched_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(schedule[0].keys()))
            writer.writeheader()
            writer.writerows(schedule)
        written.append(sched_path)

    hist_path = os.path.join(out_dir, "price_histogram.csv")
    with open(hist_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo_eur_mwh", "bin_hi_eur_mwh", "count"])
        writer.writerows(histogram)
    written.append(hist_path)
    return written


def write_outputs(result: RunResult, out_dir) -> list[str]:
    """Write schedule.csv, report.json, bounds.json and price_histogram.csv."""
    return write_run_files(out_dir, report_payload(result), bounds_payload(result),
                           schedule_rows(result),
                           bounds_mod.price_histogram(result.scenario.prices))


# -- comparisons ------------------------------------------------------------

def run_compare(specs: list[RunSpec], scenario: PlantScenario) -> dict:
    """Run several specs on the same scenario and rank by realized profit."""
    if len(specs) < 2:
        raise ValueError("compare needs at least two run specs")
    rows = []
    errors = []
    for spec in specs:
        try:
            result = run_single(spec, scenario)
        except Exception as exc:  # record and keep comparing
            errors.append({"label": spec.label, "error": str(exc)})
            continue
        if result.expost is None:
            errors.append({"label": spec.label, "error": f"status {result.status}"})
            continue
        rows.append({
            "label": spec.label,
            "model": spec.model,
            "segments": spec.segments,
            "status": result.status,
            "estimated_profit_eur": result.expost.estimated_profit_eur,
            "surplus_profit_eur": result.expost.surplus_profit_eur,
            "realized_profit_eur": result.expost.realized_profit_eur,
            "estimated_hydrogen_kg": result.expost.estimated_hydrogen_kg,
            "surplus_hydrogen_kg": result.expost.surplus_hydrogen_kg,
            "realized_hydrogen_kg": result.expost.realized_hydrogen_kg,
            "startups": result.schedule.startup_count,
        })
    benchmark = max(rows, key=lambda r: r["realized_profit_eur"], default=None)
    for row in rows:
        row["pct_of_best_realized"] = (
            100.0 * row["realized_profit_eur"] / benchmark["realized_profit_eur"]
            if benchmark and benchmark["realized_profit_eur"] != 0.0 else None)
    return {
        "benchmark": benchmark["label"] if benchmark else None,
        "rows": rows,
        "errors": errors,
    }


# -- sensitivity sweeps ------------------------------------------------------

def derive_scenario(scenario: PlantScenario, axis: str, value: float) -> PlantScenario:
    """Re-derive a scenario along one sensitivity axis.

    wind_ratio scales the wind farm to value * c_e keeping the hourly
    capacity factors; demand multiplies every minimum; hydrogen_price sets
    the hydrogen price directly.
    """
    if axis == "wind_ratio":
        new_cw = value * scenario.c_e
        factor = new_cw / scenario.c_w
        return replace(scenario, c_w=new_cw,
                       wind=tuple(min(w * factor, new_cw) for w in scenario.wind))
    if axis == "demand":
        return replace(scenario, demand=tuple(
            DemandWindow(hours=w.hours, min_kg=w.min_kg * value)
            for w in scenario.demand))
    if axis == "hydrogen_price":
        return replace(scenario, lambda_h=value)
    raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def run_sweep(axis: str, values: list[float], scenario: PlantScenario,
              base_spec: RunSpec | None = None,
              segment_pair: tuple[int, int] = (1, 12)) -> dict:
    """Compare coarse vs fine production curves along one input axis."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    base_spec = base_spec or RunSpec(model="oos")
    coarse_n, fine_n = segment_pair
    points = []
    for value in values:
        point = {"axis": axis, "value": value}
        try:
            scn = derive_scenario(scenario, axis, value)
            coarse = run_single(replace(base_spec, segments=coarse_n), scn)
            fine = run_single(replace(base_spec, segments=fine_n), scn)
            for tag, res in (("coarse", coarse), ("fine", fine)):
                if res.expost is None:
                    raise RuntimeError(f"{tag} run ended with status {res.status}")
            point.update({
                "price_range": coarse.price_range.to_json_dict(),
                "coarse": {"label": coarse.spec.label,
                           "estimated_profit_eur": coarse.expost.estimated_profit_eur,
                           "realized_profit_eur": coarse.expost.realized_profit_eur,
                           "realized_hydrogen_kg": coarse.expost.realized_hydrogen_kg,
                           "surplus_hydrogen_kg": coarse.expost.surplus_hydrogen_kg},
                "fine": {"label": fine.spec.label,
                         "estimated_profit_eur": fine.expost.estimated_profit_eur,
                         "realized_profit_eur": fine.expost.realized_profit_eur,
                         "realized_hydrogen_kg": fine.expost.realized_hydrogen_kg,
                         "surplus_hydrogen_kg": fine.expost.surplus_hydrogen_kg},
                "realized_profit_delta_eur":
                    fine.expost.realized_profit_eur - coarse.expost.realized_profit_eur,
                "realized_hydrogen_delta_kg":
                    fine.expost.realized_hydrogen_kg - coarse.expost.realized_hydrogen_kg,
            })
        except Exception as exc:  # per-point failures do not stop the sweep
            point["error"] = str(exc)
        points.append(point)
    return {"axis": axis, "points": points}
