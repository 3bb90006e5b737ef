"""Scenario ingestion: plant parameters, price and wind series, demand schedule.

A scenario is assembled from three files:

* a JSON config whose keys mirror the case-study parameter table
  (wind/electrolyzer/storage/compressor/hydrogen blocks),
* ``prices.csv`` with header ``timestamp,price_eur_mwh``,
* ``wind.csv`` with header ``timestamp,capacity_factor``.

Timestamps are informative; ordering is positional. Wind power in MW is
capacity factor times wind farm capacity. The hydrogen demand schedule
defaults to a constant daily minimum applied to consecutive 24-hour blocks,
with partial blocks scaled pro rata.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from datetime import datetime
from importlib import resources
from typing import Iterable, Sequence

from .physics import ElectrolyzerPhysics


class ScenarioError(ValueError):
    """Raised for malformed scenario inputs; message carries file/line context."""


@dataclass(frozen=True)
class DemandWindow:
    """Minimum hydrogen delivery over a set of hours (0-based indices)."""

    hours: tuple[int, ...]
    min_kg: float


@dataclass(frozen=True)
class PlantScenario:
    """All plant parameters plus the hourly price/wind series."""

    c_w: float            # wind farm capacity, MW
    c_e: float            # electrolyzer capacity, MW
    p_min: float          # minimum electrolyzer load when on, MW
    p_sb: float           # standby consumption, MW
    lambda_su: float      # cold start-up cost, EUR per start
    lambda_tso: float     # grid consumption tariff, EUR/MWh
    lambda_h: float       # hydrogen price, EUR/kg
    c_s: float            # storage mass capacity, kg
    s_out_max: float      # storage output flow cap, kg/h
    s_ini: float          # initial stored hydrogen, kg
    k_c: float            # compressor consumption, MWh/kg
    prices: tuple[float, ...]       # day-ahead price per hour, EUR/MWh
    wind: tuple[float, ...]         # wind production per hour, MW
    demand: tuple[DemandWindow, ...]
    physics: ElectrolyzerPhysics
    timestamps: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.prices) == 0:
            raise ScenarioError("scenario horizon is empty")
        if len(self.prices) != len(self.wind):
            raise ScenarioError(
                f"price series has {len(self.prices)} hours but wind has {len(self.wind)}")
        if not 0.0 < self.p_sb < self.p_min < self.c_e:
            raise ScenarioError(
                f"need 0 < p_sb < p_min < c_e, got {self.p_sb}, {self.p_min}, {self.c_e}")
        if self.c_w <= 0.0:
            raise ScenarioError("wind capacity must be positive")
        if min(self.c_s, self.s_out_max, self.k_c) < 0.0 or self.s_ini < 0.0:
            raise ScenarioError("storage/compressor parameters must be non-negative")
        for k, v in enumerate(self.prices):
            if not math.isfinite(v):
                raise ScenarioError(f"non-finite price at hour {k}")
        horizon = len(self.prices)
        for k, w in enumerate(self.wind):
            if not math.isfinite(w) or w < -1e-9 or w > self.c_w * (1.0 + 1e-9):
                raise ScenarioError(f"wind at hour {k} outside [0, c_w]: {w}")
        for win in self.demand:
            if win.min_kg < 0.0:
                raise ScenarioError("demand minimum must be non-negative")
            if any(t < 0 or t >= horizon for t in win.hours):
                raise ScenarioError("demand window references hours outside the horizon")

    @property
    def horizon(self) -> int:
        return len(self.prices)

    def lambda_in(self, t: int) -> float:
        """Purchase price for standby power in hour t (market price plus tariff)."""
        return self.prices[t] + self.lambda_tso


def daily_demand_windows(horizon: int, d_min_daily: float) -> tuple[DemandWindow, ...]:
    """Constant daily minimum over consecutive 24 h blocks, pro rata for a
    trailing partial block."""
    windows = []
    for start in range(0, horizon, 24):
        hours = tuple(range(start, min(start + 24, horizon)))
        windows.append(DemandWindow(hours=hours, min_kg=d_min_daily * len(hours) / 24.0))
    return tuple(windows)


def _require(mapping: dict, key: str, context: str) -> float:
    if key not in mapping:
        raise ScenarioError(f"missing key '{key}' in {context}")
    return mapping[key]


def physics_from_config(config: dict) -> ElectrolyzerPhysics:
    elec = _require(config, "electrolyzer", "config")
    curve = _require(elec, "physics", "config.electrolyzer")
    kwargs = {
        "u_rev": _require(curve, "u_rev", "physics"),
        "k1": _require(curve, "k1", "physics"),
        "k2": _require(curve, "k2", "physics"),
        "k3": _require(curve, "k3", "physics"),
        "faraday_f1": _require(curve, "faraday_f1", "physics"),
        "faraday_f2": _require(curve, "faraday_f2", "physics"),
        "i_max": float(_require(elec, "i_max", "config.electrolyzer")),
        "temperature_c": float(elec.get("temperature_c", 90.0)),
        "pressure_bar": float(elec.get("pressure_bar", 30.0)),
        "log_base": curve.get("log_base", "log10"),
    }
    if "m_h2" in curve:
        kwargs["m_h2"] = curve["m_h2"]
    if "f_const" in curve:
        kwargs["f_const"] = curve["f_const"]
    try:
        return ElectrolyzerPhysics.from_rated_power(
            float(_require(elec, "c_e", "config.electrolyzer")), **kwargs)
    except ValueError as exc:
        raise ScenarioError(f"invalid physics parameters: {exc}") from exc


def _read_hourly_csv(path, value_column: str, lo: float | None = None,
                     hi: float | None = None) -> tuple[list[str], list[float]]:
    """Read a two-column hourly CSV, validating header, values, and hourly
    timestamp continuity. Errors carry the offending line number."""
    stamps: list[str] = []
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        expected = f"timestamp,{value_column}"
        if header != expected:
            raise ScenarioError(f"{path}:1: expected header '{expected}', got '{header}'")
        prev_dt = None
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ScenarioError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
            stamp, text = parts
            try:
                value = float(text)
            except ValueError:
                raise ScenarioError(f"{path}:{lineno}: '{text}' is not a number") from None
            if not math.isfinite(value):
                raise ScenarioError(f"{path}:{lineno}: non-finite value")
            if lo is not None and (value < lo or value > hi):
                raise ScenarioError(
                    f"{path}:{lineno}: {value_column} {value} outside [{lo}, {hi}]")
            try:
                dt = datetime.fromisoformat(stamp.replace("Z", "+00:00"))
            except ValueError:
                dt = None
            if dt is not None and prev_dt is not None:
                if (dt - prev_dt).total_seconds() != 3600.0:
                    raise ScenarioError(
                        f"{path}:{lineno}: timestamp {stamp} is not one hour after the previous row")
            prev_dt = dt
            stamps.append(stamp)
            values.append(value)
    if not values:
        raise ScenarioError(f"{path}: no data rows")
    return stamps, values


def read_price_csv(path) -> tuple[list[str], list[float]]:
    return _read_hourly_csv(path, "price_eur_mwh")


def read_wind_csv(path) -> tuple[list[str], list[float]]:
    return _read_hourly_csv(path, "capacity_factor", lo=0.0, hi=1.0)


def scenario_from_parts(config: dict, prices: Sequence[float],
                        capacity_factors: Sequence[float] | None,
                        timestamps: Sequence[str] = (),
                        demand: Iterable[DemandWindow] | None = None,
                        wind_mw: Sequence[float] | None = None) -> PlantScenario:
    """Assemble a scenario from an already-parsed config and raw series.

    Wind can be given either as capacity factors (scaled by c_w) or
    directly in MW via ``wind_mw``.
    """
    wind_cfg = _require(config, "wind", "config")
    elec = _require(config, "electrolyzer", "config")
    storage = _require(config, "storage", "config")
    compressor = _require(config, "compressor", "config")
    hydrogen = _require(config, "hydrogen", "config")

    c_w = float(_require(wind_cfg, "c_w", "config.wind"))
    horizon = len(prices)
    if demand is None:
        demand = daily_demand_windows(horizon, float(_require(hydrogen, "d_min", "config.hydrogen")))
    if wind_mw is None:
        if capacity_factors is None:
            raise ScenarioError("either capacity_factors or wind_mw is required")
        for k, cf in enumerate(capacity_factors):
            if cf < 0.0 or cf > 1.0:
                raise ScenarioError(f"capacity factor at hour {k} outside [0, 1]: {cf}")
        wind_mw = [float(cf) * c_w for cf in capacity_factors]
    return PlantScenario(
        c_w=c_w,
        c_e=float(_require(elec, "c_e", "config.electrolyzer")),
        p_min=float(_require(elec, "p_min", "config.electrolyzer")),
        p_sb=float(_require(elec, "p_sb", "config.electrolyzer")),
        lambda_su=float(_require(elec, "lambda_su", "config.electrolyzer")),
        lambda_tso=float(_require(elec, "lambda_tso", "config.electrolyzer")),
        lambda_h=float(_require(hydrogen, "lambda_h", "config.hydrogen")),
        c_s=float(_require(storage, "c_s", "config.storage")),
        s_out_max=float(_require(storage, "s_out", "config.storage")),
        s_ini=float(storage.get("s_ini", 0.0)),
        k_c=float(_require(compressor, "k_c", "config.compressor")),
        prices=tuple(float(v) for v in prices),
        wind=tuple(float(w) for w in wind_mw),
        demand=tuple(demand),
        physics=physics_from_config(config),
        timestamps=tuple(timestamps),
    )


def load_scenario(config_path, prices_path, wind_path) -> PlantScenario:
    """Load and validate a scenario from its three input files."""
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{config_path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    stamps, prices = read_price_csv(prices_path)
    wind_stamps, cfs = read_wind_csv(wind_path)
    if len(prices) != len(cfs):
        raise ScenarioError(
            f"{prices_path} has {len(prices)} rows but {wind_path} has {len(cfs)}")
    return scenario_from_parts(config, prices, cfs, timestamps=stamps)


def default_paths() -> tuple[str, str, str]:
    """Paths of the bundled synthetic scenario (config, prices, wind)."""
    base = resources.files("h2dispatch.data")
    return (str(base / "default_config.json"), str(base / "prices.csv"),
            str(base / "wind.csv"))


def load_default_scenario() -> PlantScenario:
    return load_scenario(*default_paths())


def slice_horizon(scn: PlantScenario, start: int, length: int) -> PlantScenario:
    """Restrict a scenario to hours [start, start+length).

    Demand windows are clipped to the slice; a window keeping only part of
    its hours keeps the same fraction of its minimum.
    """
    if start < 0 or length <= 0 or start + length > scn.horizon:
        raise ScenarioError(
            f"slice [{start}, {start + length}) outside horizon of {scn.horizon} hours")
    new_demand = []
    for win in scn.demand:
        kept = tuple(t - start for t in win.hours if start <= t < start + length)
        if kept:
            new_demand.append(DemandWindow(
                hours=kept, min_kg=win.min_kg * len(kept) / len(win.hours)))
    return replace(
        scn,
        prices=scn.prices[start:start + length],
        wind=scn.wind[start:start + length],
        demand=tuple(new_demand),
        timestamps=scn.timestamps[start:start + length] if scn.timestamps else (),
    )


def scenario_to_dict(scn: PlantScenario) -> dict:
    """JSON-serializable dump, loadable by :func:`scenario_from_dict`."""
    phys = scn.physics
    return {
        "config": {
            "wind": {"c_w": scn.c_w},
            "electrolyzer": {
                "c_e": scn.c_e, "p_sb": scn.p_sb, "p_min": scn.p_min,
                "pressure_bar": phys.pressure_bar, "temperature_c": phys.temperature_c,
                "i_max": phys.i_max, "lambda_su": scn.lambda_su,
                "lambda_tso": scn.lambda_tso,
                "physics": {
                    "u_rev": phys.u_rev, "k1": phys.k1, "k2": phys.k2, "k3": phys.k3,
                    "faraday_f1": phys.faraday_f1, "faraday_f2": phys.faraday_f2,
                    "m_h2": phys.m_h2, "f_const": phys.f_const,
                    "log_base": phys.log_base,
                },
            },
            "storage": {"c_s": scn.c_s, "s_out": scn.s_out_max, "s_ini": scn.s_ini},
            "compressor": {"k_c": scn.k_c},
            "hydrogen": {"lambda_h": scn.lambda_h, "d_min": 0.0},
        },
        "prices": list(scn.prices),
        "wind_mw": list(scn.wind),
        "timestamps": list(scn.timestamps),
        "demand": [{"hours": list(w.hours), "min_kg": w.min_kg} for w in scn.demand],
    }


def scenario_from_dict(payload: dict) -> PlantScenario:
    demand = tuple(DemandWindow(hours=tuple(w["hours"]), min_kg=float(w["min_kg"]))
                   for w in payload.get("demand") or [])
    return scenario_from_parts(
        payload["config"], payload["prices"], payload.get("capacity_factors"),
        timestamps=payload.get("timestamps") or (),
        demand=demand if payload.get("demand") is not None else None,
        wind_mw=payload.get("wind_mw"))


def save_scenario(scn: PlantScenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scn), fh, indent=1)


def load_saved_scenario(path) -> PlantScenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
