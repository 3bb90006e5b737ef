"""Ex-post performance analysis of an optimized dispatch.

The MILP schedules against the piecewise-linear production curve, which
underestimates the true nonlinear curve between breakpoints. Re-evaluating
the true curve at the optimized set-points therefore yields extra
("surplus") hydrogen beyond the model's estimate. The surplus is valued at
the constant hydrogen price and sold directly: there is no re-optimization,
no storage routing, and the added compressor energy is reported only as an
informational figure, not charged against the surplus.

Standby and off hours produce nothing and contribute zero surplus.
"""

from __future__ import annotations

from dataclasses import dataclass

from .milp.instance import IntegrityError
from .models import STATE_ON, DispatchSchedule
from .physics import ElectrolyzerPhysics, hydrogen_at_power
from .scenario import PlantScenario


@dataclass(frozen=True)
class ExPostReport:
    """Estimated vs realized production and profit for one schedule."""

    estimated_profit_eur: float
    surplus_profit_eur: float
    realized_profit_eur: float
    estimated_hydrogen_kg: float
    surplus_hydrogen_kg: float
    realized_hydrogen_kg: float
    delta_h_kg: tuple[float, ...]       # per-hour true minus modeled production
    extra_compressor_mwh: float         # informational, not priced in


def evaluate(schedule: DispatchSchedule, phys: ElectrolyzerPhysics,
             scn: PlantScenario, tol: float = 1e-6) -> ExPostReport:
    """Recompute true hydrogen at each on-hour set-point and price the surplus."""
    deltas: list[float] = []
    for hour in schedule.hours:
        if hour.state != STATE_ON:
            deltas.append(0.0)
            continue
        p = hour.seg_power_mw
        if p < scn.p_min - tol or p > scn.c_e + tol:
            raise IntegrityError(
                f"hour {hour.hour}: on-state power {p} MW outside "
                f"[{scn.p_min}, {scn.c_e}]")
        p = min(max(p, scn.p_min), scn.c_e)
        deltas.append(hydrogen_at_power(phys, p) - hour.hydrogen_kg)

    surplus_kg = sum(deltas)
    surplus_eur = scn.lambda_h * surplus_kg
    return ExPostReport(
        estimated_profit_eur=schedule.estimated_profit_eur,
        surplus_profit_eur=surplus_eur,
        realized_profit_eur=schedule.estimated_profit_eur + surplus_eur,
        estimated_hydrogen_kg=schedule.estimated_hydrogen_kg,
        surplus_hydrogen_kg=surplus_kg,
        realized_hydrogen_kg=schedule.estimated_hydrogen_kg + surplus_kg,
        delta_h_kg=tuple(deltas),
        extra_compressor_mwh=scn.k_c * max(surplus_kg, 0.0),
    )
