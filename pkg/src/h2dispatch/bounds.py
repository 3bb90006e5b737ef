"""Electricity-price range in which production-curve detail changes dispatch.

Assuming wind and demand never bind, two thresholds bracket the day-ahead
prices where the choice of linearization segments matters:

* above the upper bound, running even at the efficiency-peak point earns
  less than selling that power, so every model idles the electrolyzer;
* below the lower bound, the marginal value of the last MW at full load
  beats the market price, so every model runs flat out.

The upper bound compares peak-point operation against standby consumption;
the lower bound is the full-load marginal hydrogen value, taken from the
efficiency level and slope at rated power (slope estimated by a backward
finite difference, since the efficiency curve has no closed form). Both
scale linearly with the hydrogen price. Compressor consumption is neglected
here, which is one reason dispatch tests keep a small guard band around the
bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .physics import (ElectrolyzerPhysics, PhysicsDomainError, efficiency_at_power,
                      find_peak_efficiency)
from .scenario import PlantScenario

FD_STEP_FRACTION = 1e-3  # backward-difference step as a share of rated power


@dataclass(frozen=True)
class PriceRange:
    """Day-ahead price band [lower, upper] where segment choice matters."""

    lower_eur_mwh: float
    upper_eur_mwh: float
    eta_max_kg_mwh: float
    eta_fl_kg_mwh: float
    p_eta_max_mw: float
    derivative_at_full_load: float  # d(efficiency)/d(power) at rated, (kg/MWh)/MW

    def to_json_dict(self) -> dict:
        return {
            "lower_eur_mwh": self.lower_eur_mwh,
            "upper_eur_mwh": self.upper_eur_mwh,
            "eta_max_kg_mwh": self.eta_max_kg_mwh,
            "eta_fl_kg_mwh": self.eta_fl_kg_mwh,
            "p_eta_max_mw": self.p_eta_max_mw,
            "derivative_at_full_load": self.derivative_at_full_load,
        }


def upper_bound_from_point(lambda_h: float, eta_max: float, p_peak: float,
                           p_sb: float) -> float:
    if p_peak <= p_sb:
        raise PhysicsDomainError(
            f"efficiency-peak load {p_peak} MW must exceed standby draw {p_sb} MW")
    return lambda_h * eta_max * p_peak / (p_peak - p_sb)


def lower_bound_from_curve(eta_fn: Callable[[float], float], c_e: float,
                           lambda_h: float,
                           step_fraction: float = FD_STEP_FRACTION) -> float:
    step = step_fraction * c_e
    eta_fl = eta_fn(c_e)
    slope = (eta_fl - eta_fn(c_e - step)) / step
    return lambda_h * (eta_fl + c_e * slope)


def upper_bound(phys: ElectrolyzerPhysics, scn: PlantScenario) -> float:
    """Price above which hydrogen production stops for any segment choice."""
    peak = find_peak_efficiency(phys)
    return upper_bound_from_point(scn.lambda_h, peak.efficiency_kg_mwh,
                                  peak.power_mw, scn.p_sb)


def lower_bound(phys: ElectrolyzerPhysics, scn: PlantScenario,
                step_fraction: float = FD_STEP_FRACTION) -> float:
    """Price below which full-load operation is optimal for any segment choice."""
    return lower_bound_from_curve(lambda p: efficiency_at_power(phys, p),
                                  scn.c_e, scn.lambda_h, step_fraction)


def compute_price_range(phys: ElectrolyzerPhysics, scn: PlantScenario,
                        step_fraction: float = FD_STEP_FRACTION) -> PriceRange:
    peak = find_peak_efficiency(phys)
    step = step_fraction * scn.c_e
    eta_fl = efficiency_at_power(phys, scn.c_e)
    slope = (eta_fl - efficiency_at_power(phys, scn.c_e - step)) / step
    return PriceRange(
        lower_eur_mwh=scn.lambda_h * (eta_fl + scn.c_e * slope),
        upper_eur_mwh=upper_bound_from_point(scn.lambda_h, peak.efficiency_kg_mwh,
                                             peak.power_mw, scn.p_sb),
        eta_max_kg_mwh=peak.efficiency_kg_mwh,
        eta_fl_kg_mwh=eta_fl,
        p_eta_max_mw=peak.power_mw,
        derivative_at_full_load=slope,
    )


def classify_hours(price_range: PriceRange,
                   prices: Sequence[float]) -> list[str]:
    """Tag each hourly price below / inside / above the range.

    Prices equal to a bound count as inside (closed interval).
    """
    tags = []
    for p in prices:
        if p < price_range.lower_eur_mwh:
            tags.append("below")
        elif p > price_range.upper_eur_mwh:
            tags.append("above")
        else:
            tags.append("inside")
    return tags


def classification_counts(tags: Sequence[str]) -> dict[str, int]:
    return {key: sum(1 for t in tags if t == key) for key in ("below", "inside", "above")}


def price_histogram(prices: Sequence[float],
                    bin_width_eur: float = 2.0) -> list[tuple[float, float, int]]:
    """(bin_lo, bin_hi, count) triples covering the observed price span."""
    if len(prices) == 0:
        return []
    arr = np.asarray(prices, dtype=float)
    lo = np.floor(arr.min() / bin_width_eur) * bin_width_eur
    hi = np.ceil(arr.max() / bin_width_eur) * bin_width_eur
    if hi <= lo:
        hi = lo + bin_width_eur
    edges = np.arange(lo, hi + 0.5 * bin_width_eur, bin_width_eur)
    counts, _ = np.histogram(arr, bins=edges)
    return [(float(edges[k]), float(edges[k + 1]), int(counts[k]))
            for k in range(len(counts))]
