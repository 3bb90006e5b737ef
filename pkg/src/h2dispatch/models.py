"""MILP dispatch models of the hybrid plant.

Three variants differ only in how the electrolyzer's commitment state is
encoded:

* ``oos`` - on / off / standby with a cold start-up cost and a ban on
  resuming from off directly into standby;
* ``oo``  - on / off with the start-up cost but no standby option;
* ``os``  - on / standby only, no start-up cost.

Hourly continuous variables cover market sales, hydrogen production and
delivery, storage flows and level, compressor power, and (where standby
exists) grid purchases capped at standby consumption. Electrolyzer power is
not a separate variable: it is the active segment power plus the standby
draw, substituted into the power balance and the load-window rows. Per hour
the on/off/standby variant carries 4+S binaries and 9+S continuous
variables, the on/off variant 2+S binaries, the on/standby variant 1+S.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .milp.instance import IntegrityError, MilpInstance, MilpSolution
from .scenario import PlantScenario
from .segmentation import SegmentSet

MODEL_VARIANTS = ("oos", "oo", "os")

STATE_ON = "on"
STATE_OFF = "off"
STATE_STANDBY = "standby"


@dataclass(frozen=True)
class BuiltModel:
    """A dispatch MILP plus everything needed to interpret its solution."""

    variant: str
    instance: MilpInstance
    scenario: PlantScenario
    segments: SegmentSet

    @property
    def horizon(self) -> int:
        return self.scenario.horizon


@dataclass(frozen=True)
class HourDispatch:
    """Decoded plant operation for one hour."""

    hour: int
    state: str
    segment: int | None        # 0-based active segment when on
    power_mw: float            # electrolyzer consumption (incl. standby draw)
    seg_power_mw: float        # production share of the consumption
    hydrogen_kg: float
    hydrogen_direct_kg: float
    sold_kg: float
    storage_in_kg: float
    storage_out_kg: float
    storage_kg: float
    grid_sale_mw: float
    grid_buy_mw: float
    compressor_mw: float
    startup: bool


@dataclass(frozen=True)
class DispatchSchedule:
    """Constraint-checked hourly schedule decoded from a MILP solution."""

    variant: str
    hours: tuple[HourDispatch, ...]
    estimated_profit_eur: float
    estimated_hydrogen_kg: float

    @property
    def horizon(self) -> int:
        return len(self.hours)

    def state_counts(self) -> dict[str, int]:
        counts = {STATE_ON: 0, STATE_OFF: 0, STATE_STANDBY: 0}
        for h in self.hours:
            counts[h.state] += 1
        return counts

    @property
    def startup_count(self) -> int:
        return sum(1 for h in self.hours if h.startup)


def _max_hydrogen_rate(seg: SegmentSet) -> float:
    return max(s.value(s.p_hi) for s in seg.segments)


def build_model(variant: str, scn: PlantScenario, seg: SegmentSet) -> BuiltModel:
    if variant not in MODEL_VARIANTS:
        raise ValueError(f"variant must be one of {MODEL_VARIANTS}, got {variant!r}")
    has_off = variant in ("oos", "oo")
    has_standby = variant in ("oos", "os")

    T = scn.horizon
    S = seg.n_segments
    h_max = _max_hydrogen_rate(seg)
    inst = MilpInstance(name=f"{variant}-{S}x{T}")

    sale, sold, prod, direct = [], [], [], []
    comp, buy, level, sin, sout = [], [], [], [], []
    segp = []   # segp[t][s]
    on, off, standby, startup, segz = [], [], [], [], []

    for t in range(T):
        sale.append(inst.add_var(f"grid_sale[{t}]", 0.0, scn.c_w + scn.p_sb,
                                 obj=scn.prices[t]))
        sold.append(inst.add_var(f"h2_sold[{t}]", 0.0, h_max + scn.s_out_max,
                                 obj=scn.lambda_h))
        prod.append(inst.add_var(f"h2_prod[{t}]", 0.0, h_max))
        direct.append(inst.add_var(f"h2_direct[{t}]", 0.0, h_max))
        comp.append(inst.add_var(f"compressor_power[{t}]", 0.0, scn.k_c * h_max))
        if has_standby:
            buy.append(inst.add_var(f"grid_buy[{t}]", 0.0, scn.p_sb,
                                    obj=-scn.lambda_in(t)))
        level.append(inst.add_var(f"storage_level[{t}]", 0.0, scn.c_s))
        sin.append(inst.add_var(f"storage_in[{t}]", 0.0, h_max))
        sout.append(inst.add_var(f"storage_out[{t}]", 0.0, scn.s_out_max))
        segp.append([inst.add_var(f"seg_power[{t},{s}]", 0.0, seg.segments[s].p_hi)
                     for s in range(S)])

        on.append(inst.add_var(f"on[{t}]", binary=True))
        if has_off:
            off.append(inst.add_var(f"off[{t}]", binary=True))
            su_ub = 0.0 if t == 0 else 1.0  # hour-1 start is free of charge
            startup.append(inst.add_var(f"startup[{t}]", 0.0, su_ub, binary=True,
                                        obj=-scn.lambda_su))
        if has_off and has_standby:
            standby.append(inst.add_var(f"standby[{t}]", binary=True))
        segz.append([inst.add_var(f"seg_active[{t},{s}]", binary=True)
                     for s in range(S)])

    def sb_terms(t: int, coef: float):
        """Terms for the standby draw: a standby binary for oos, (1 - on) for os."""
        if variant == "oos":
            return [(standby[t], coef)], 0.0
        if variant == "os":
            return [(on[t], -coef)], coef  # coef * (1 - on) -> move constant to rhs
        return [], 0.0

    for t in range(T):
        terms = [(sale[t], 1.0), (comp[t], 1.0)]
        terms += [(segp[t][s], 1.0) for s in range(S)]
        shift = 0.0
        if has_standby:
            terms.append((buy[t], -1.0))
            sb, const = sb_terms(t, scn.p_sb)
            terms += sb
            shift = const
        inst.add_row(f"power_balance[{t}]", terms, "=", scn.wind[t] - shift)

        if has_standby:
            sb, const = sb_terms(t, scn.p_sb)
            inst.add_row(f"standby_buy_cap[{t}]", [(buy[t], 1.0)] +
                         [(v, -c) for v, c in sb], "<=", const)

        if variant == "oos":
            inst.add_row(f"one_state[{t}]",
                         [(on[t], 1.0), (off[t], 1.0), (standby[t], 1.0)], "=", 1.0)

        inst.add_row(f"load_max[{t}]",
                     [(segp[t][s], 1.0) for s in range(S)] + [(on[t], -scn.c_e)],
                     "<=", 0.0)
        inst.add_row(f"load_min[{t}]",
                     [(segp[t][s], 1.0) for s in range(S)] + [(on[t], -scn.p_min)],
                     ">=", 0.0)

        if has_off and t >= 1:
            terms = [(startup[t], 1.0), (on[t], -1.0), (on[t - 1], 1.0)]
            if variant == "oos":
                terms.append((standby[t - 1], 1.0))
            inst.add_row(f"startup_def[{t}]", terms, ">=", 0.0)
        if variant == "oos" and t >= 1:
            inst.add_row(f"no_off_to_standby[{t}]",
                         [(off[t - 1], 1.0), (standby[t], 1.0)], "<=", 1.0)

        inst.add_row(f"h2_curve[{t}]",
                     [(prod[t], 1.0)] +
                     [(segp[t][s], -seg.segments[s].slope) for s in range(S)] +
                     [(segz[t][s], -seg.segments[s].intercept) for s in range(S)],
                     "=", 0.0)
        for s in range(S):
            inst.add_row(f"seg_window_lo[{t},{s}]",
                         [(segp[t][s], 1.0), (segz[t][s], -seg.segments[s].p_lo)],
                         ">=", 0.0)
            inst.add_row(f"seg_window_hi[{t},{s}]",
                         [(segp[t][s], 1.0), (segz[t][s], -seg.segments[s].p_hi)],
                         "<=", 0.0)
        inst.add_row(f"one_segment[{t}]",
                     [(segz[t][s], 1.0) for s in range(S)] + [(on[t], -1.0)],
                     "=", 0.0)

        inst.add_row(f"h2_split[{t}]",
                     [(prod[t], 1.0), (direct[t], -1.0), (sin[t], -1.0)], "=", 0.0)
        inst.add_row(f"delivery_split[{t}]",
                     [(sold[t], 1.0), (direct[t], -1.0), (sout[t], -1.0)], "=", 0.0)
        inst.add_row(f"compressor_load[{t}]",
                     [(comp[t], 1.0), (sin[t], -scn.k_c)], "=", 0.0)
        if t == 0:
            inst.add_row("storage_balance[0]",
                         [(level[0], 1.0), (sin[0], -1.0), (sout[0], 1.0)],
                         "=", scn.s_ini)
        else:
            inst.add_row(f"storage_balance[{t}]",
                         [(level[t], 1.0), (level[t - 1], -1.0),
                          (sin[t], -1.0), (sout[t], 1.0)], "=", 0.0)

    for n, window in enumerate(scn.demand):
        if window.min_kg > 0.0:
            inst.add_row(f"daily_demand[{n}]",
                         [(sold[t], 1.0) for t in window.hours], ">=", window.min_kg)

    return BuiltModel(variant=variant, instance=inst, scenario=scn, segments=seg)


def build_oos(scn: PlantScenario, seg: SegmentSet) -> BuiltModel:
    """Three-state model: on / off / standby with start-up cost."""
    return build_model("oos", scn, seg)


def build_oo(scn: PlantScenario, seg: SegmentSet) -> BuiltModel:
    """Two-state model: on / off, start-up cost, no standby or grid purchase."""
    return build_model("oo", scn, seg)


def build_os(scn: PlantScenario, seg: SegmentSet) -> BuiltModel:
    """Two-state model: on / standby, no start-up cost."""
    return build_model("os", scn, seg)


def decode_solution(built: BuiltModel, sol: MilpSolution,
                    tol: float = 1e-6) -> DispatchSchedule:
    """Turn solver values into an hourly schedule, re-verifying every
    instance row at the given tolerance first."""
    if sol.values is None:
        raise IntegrityError(f"cannot decode a solution with status '{sol.status}'")
    inst = built.instance
    violations = inst.check_solution(sol.values, tol=tol)
    if violations:
        worst = max(violations, key=lambda nv: nv[1])
        raise IntegrityError(
            f"solution violates '{worst[0]}' by {worst[1]:.3g} "
            f"({len(violations)} violations at tol {tol})")

    scn = built.scenario
    seg = built.segments
    x = sol.values
    v = inst.var_index
    hours: list[HourDispatch] = []
    total_h2 = 0.0
    for t in range(built.horizon):
        is_on = x[v(f"on[{t}]")] > 0.5
        if built.variant == "oos":
            is_standby = x[v(f"standby[{t}]")] > 0.5
        elif built.variant == "os":
            is_standby = not is_on
        else:
            is_standby = False
        state = STATE_ON if is_on else (STATE_STANDBY if is_standby else STATE_OFF)
        seg_power = sum(x[v(f"seg_power[{t},{s}]")] for s in range(seg.n_segments))
        active = None
        if is_on:
            for s in range(seg.n_segments):
                if x[v(f"seg_active[{t},{s}]")] > 0.5:
                    active = s
                    break
        power = seg_power + (scn.p_sb if state == STATE_STANDBY else 0.0)
        h2 = x[v(f"h2_prod[{t}]")]
        total_h2 += h2
        hours.append(HourDispatch(
            hour=t, state=state, segment=active, power_mw=power,
            seg_power_mw=seg_power, hydrogen_kg=h2,
            hydrogen_direct_kg=x[v(f"h2_direct[{t}]")],
            sold_kg=x[v(f"h2_sold[{t}]")],
            storage_in_kg=x[v(f"storage_in[{t}]")],
            storage_out_kg=x[v(f"storage_out[{t}]")],
            storage_kg=x[v(f"storage_level[{t}]")],
            grid_sale_mw=x[v(f"grid_sale[{t}]")],
            grid_buy_mw=x[v(f"grid_buy[{t}]")] if built.variant in ("oos", "os") else 0.0,
            compressor_mw=x[v(f"compressor_power[{t}]")],
            startup=bool(built.variant in ("oos", "oo") and
                         x[v(f"startup[{t}]")] > 0.5),
        ))
    return DispatchSchedule(variant=built.variant, hours=tuple(hours),
                            estimated_profit_eur=sol.objective,
                            estimated_hydrogen_kg=total_h2)
