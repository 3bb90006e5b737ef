"""Piecewise linearization of the hydrogen production curve.

Breakpoints follow a fixed refinement ladder over the feasible load range
[p_min, rated]: one segment uses just the endpoints; two segments add the
efficiency-peak load; four and eight split every existing segment at its
midpoint; twelve splits only the segments right of the efficiency peak
(that side covers most of the operating range). Points are never removed
while refining, so coarser breakpoint sets nest inside finer ones.

Each segment carries the chord's slope [kg/MWh] and intercept [kg/h];
interpolation is exact at breakpoints and, where the true curve is concave,
underestimates it everywhere in between. Concavity is checked numerically,
not assumed: a segment spanning a non-concave stretch is logged and only
exactness at its endpoints is guaranteed there.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .physics import (ElectrolyzerPhysics, PhysicsDomainError, find_peak_efficiency,
                      hydrogen_at_power)

log = logging.getLogger(__name__)

SUPPORTED_SEGMENT_COUNTS = (1, 2, 4, 8, 12)


@dataclass(frozen=True)
class Segment:
    """One linear piece, valid for power in [p_lo, p_hi] MW."""

    slope: float       # kg/MWh
    intercept: float   # kg/h
    p_lo: float        # MW
    p_hi: float        # MW

    def value(self, p) -> float:
        return self.slope * p + self.intercept


@dataclass(frozen=True)
class SegmentSet:
    """Contiguous piecewise-linear approximation of the production curve."""

    breakpoints: tuple[float, ...]
    segments: tuple[Segment, ...]
    refinement_rule: str = "midpoint"

    def __post_init__(self) -> None:
        bp = self.breakpoints
        if len(bp) != len(self.segments) + 1:
            raise ValueError("breakpoints and segments are inconsistent")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        for k, seg in enumerate(self.segments):
            if seg.p_lo != bp[k] or seg.p_hi != bp[k + 1]:
                raise ValueError("segments must tile the breakpoint intervals")

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def p_min(self) -> float:
        return self.breakpoints[0]

    @property
    def p_max(self) -> float:
        return self.breakpoints[-1]

    def segment_index(self, p: float) -> int:
        if p < self.p_min - 1e-9 or p > self.p_max + 1e-9:
            raise PhysicsDomainError(
                f"power {p} outside piecewise range [{self.p_min}, {self.p_max}]")
        for k, seg in enumerate(self.segments):
            if p <= seg.p_hi or k == self.n_segments - 1:
                return k
        return self.n_segments - 1

    def value(self, p):
        """Piecewise-linear hydrogen rate [kg/h] at power p (scalar or array)."""
        p_arr = np.asarray(p, dtype=float)
        if np.any(p_arr < self.p_min - 1e-9) or np.any(p_arr > self.p_max + 1e-9):
            raise PhysicsDomainError(
                f"power outside piecewise range [{self.p_min}, {self.p_max}]")
        slopes = np.array([s.slope for s in self.segments])
        intercepts = np.array([s.intercept for s in self.segments])
        idx = np.clip(np.searchsorted(self.breakpoints, p_arr, side="right") - 1,
                      0, self.n_segments - 1)
        out = slopes[idx] * p_arr + intercepts[idx]
        return float(out) if out.ndim == 0 else out

    def to_json_dict(self) -> dict:
        return {
            "breakpoints_mw": list(self.breakpoints),
            "refinement_rule": self.refinement_rule,
            "segments": [
                {"slope_kg_per_mwh": s.slope, "intercept_kg_per_h": s.intercept,
                 "p_lo_mw": s.p_lo, "p_hi_mw": s.p_hi}
                for s in self.segments
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "SegmentSet":
        segments = tuple(
            Segment(slope=s["slope_kg_per_mwh"], intercept=s["intercept_kg_per_h"],
                    p_lo=s["p_lo_mw"], p_hi=s["p_hi_mw"])
            for s in payload["segments"])
        return cls(breakpoints=tuple(payload["breakpoints_mw"]), segments=segments,
                   refinement_rule=payload.get("refinement_rule", "midpoint"))


def _split_all(points: list[float]) -> list[float]:
    mids = [0.5 * (a + b) for a, b in zip(points, points[1:])]
    return sorted(points + mids)


def _breakpoints_with_rule(phys: ElectrolyzerPhysics, n_segments: int,
                           p_min: float) -> tuple[tuple[float, ...], str]:
    if n_segments not in SUPPORTED_SEGMENT_COUNTS:
        raise ValueError(
            f"n_segments must be one of {SUPPORTED_SEGMENT_COUNTS}, got {n_segments}")
    rated = phys.rated_power_mw
    if not 0.0 < p_min < rated:
        raise ValueError(f"p_min must be in (0, {rated}), got {p_min}")
    if n_segments == 1:
        return (p_min, rated), "endpoints"
    peak = find_peak_efficiency(phys).power_mw
    if not p_min < peak < rated:
        raise ValueError(
            f"efficiency peak {peak:.3f} MW must lie strictly inside ({p_min}, {rated})")
    points = sorted([p_min, peak, rated])
    rule = "midpoint"
    if n_segments == 2:
        return tuple(points), rule
    points = _split_all(points)
    if n_segments == 4:
        return tuple(points), rule
    points = _split_all(points)
    if n_segments == 8:
        return tuple(points), rule
    # 12 segments: split the segments right of the efficiency peak. If the
    # peak does not sit exactly mid-ladder that would not land on 12, so
    # fall back to splitting the widest (rightmost on ties) segments.
    right = [(a, b) for a, b in zip(points, points[1:]) if a >= peak - 1e-12]
    if len(points) - 1 + len(right) == 12:
        points = sorted(points + [0.5 * (a + b) for a, b in right])
        return tuple(points), "midpoint-right-of-peak"
    while len(points) - 1 < 12:
        _, _, a, b = max((b - a, b, a, b) for a, b in zip(points, points[1:]))
        points = sorted(points + [0.5 * (a + b)])
    return tuple(points), "midpoint-widest-rightmost"


def build_breakpoints(phys: ElectrolyzerPhysics, n_segments: int,
                      p_min: float) -> tuple[float, ...]:
    """Breakpoint ladder for the supported segment counts {1, 2, 4, 8, 12}.

    Every set spans [p_min, rated power]; counts of 2 and above include the
    efficiency-peak load; refinement splits segments at their power midpoint
    and never drops existing points.
    """
    return _breakpoints_with_rule(phys, n_segments, p_min)[0]


def linearize(phys: ElectrolyzerPhysics, breakpoints,
              refinement_rule: str = "explicit") -> SegmentSet:
    """Chord interpolation of the true production curve between breakpoints."""
    bp = tuple(float(b) for b in breakpoints)
    if len(bp) < 2:
        raise ValueError("need at least two breakpoints")
    values = [hydrogen_at_power(phys, p) for p in bp]
    segments = []
    for (p1, p2), (h1, h2) in zip(zip(bp, bp[1:]), zip(values, values[1:])):
        slope = (h2 - h1) / (p2 - p1)
        segments.append(Segment(slope=slope, intercept=h1 - slope * p1,
                                p_lo=p1, p_hi=p2))
    seg_set = SegmentSet(breakpoints=bp, segments=tuple(segments),
                         refinement_rule=refinement_rule)
    _warn_if_not_concave(phys, seg_set)
    return seg_set


def _warn_if_not_concave(phys: ElectrolyzerPhysics, seg_set: SegmentSet,
                         samples_per_segment: int = 33) -> None:
    for k, seg in enumerate(seg_set.segments):
        p = np.linspace(seg.p_lo, seg.p_hi, samples_per_segment)[1:-1]
        gap = hydrogen_at_power(phys, p) - seg.value(p)
        if np.min(gap) < -1e-6:
            log.warning(
                "segment %d [%.3f, %.3f] MW overestimates the curve by up to %.3g kg/h; "
                "the production curve is not concave there", k, seg.p_lo, seg.p_hi,
                float(-np.min(gap)))


def build_segments(phys: ElectrolyzerPhysics, n_segments: int,
                   p_min: float) -> SegmentSet:
    """Breakpoints plus chord coefficients in one call."""
    points, rule = _breakpoints_with_rule(phys, n_segments, p_min)
    return linearize(phys, points, refinement_rule=rule)


def approximation_gap(phys: ElectrolyzerPhysics, seg_set: SegmentSet, p):
    """True curve minus piecewise approximation [kg/h] at power p."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < seg_set.p_min - 1e-9) or np.any(p_arr > seg_set.p_max + 1e-9):
        raise PhysicsDomainError(
            f"power outside piecewise range [{seg_set.p_min}, {seg_set.p_max}]")
    out = hydrogen_at_power(phys, p_arr) - seg_set.value(p_arr)
    return float(out) if np.ndim(out) == 0 else out
