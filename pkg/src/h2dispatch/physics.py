"""Alkaline electrolyzer operating curves.

Cell voltage rises with current density through an ohmic term and a
logarithmic activation term on top of the open-circuit voltage. Stack power
is voltage times current density times total cell area. Hydrogen output
follows Faraday's law scaled by a current-dependent Faraday efficiency, so
the specific efficiency (kg of hydrogen per MWh consumed) is not constant:
it climbs steeply at low load, peaks around 30% of rated power for typical
coefficient sets, and slowly declines toward full load.

Everything here is evaluated at a fixed operating temperature and pressure;
those are recorded on the parameter set for traceability but are not decision
variables. All curve functions are pure and accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

H2_MOLAR_MASS_KG_MOL = 2.016e-3
FARADAY_CONSTANT_C_MOL = 96485.3321

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class PhysicsDomainError(ValueError):
    """Raised when a current density or power is outside the operating range."""


class PhysicsNumericError(RuntimeError):
    """Raised when an iterative inversion fails to converge."""


@dataclass(frozen=True)
class ElectrolyzerPhysics:
    """Electrochemical parameters of one electrolyzer stack.

    u_rev: open-circuit voltage per cell at operating temperature [V]
    k1: ohmic overvoltage coefficient [V*m^2/A]
    k2: activation overvoltage magnitude [V]
    k3: activation overvoltage argument coefficient [m^2/A]
    cell_area_total: summed cell area of the stack [m^2]
    i_max: maximum current density [A/m^2]
    faraday_f1: current-density-squared scale in the Faraday efficiency [A^2/m^4]
    faraday_f2: asymptotic Faraday efficiency at high current [-]
    log_base: "log10" (default) or "ln" for the activation term
    """

    u_rev: float
    k1: float
    k2: float
    k3: float
    cell_area_total: float
    i_max: float
    faraday_f1: float
    faraday_f2: float
    temperature_c: float = 90.0
    pressure_bar: float = 30.0
    m_h2: float = H2_MOLAR_MASS_KG_MOL
    f_const: float = FARADAY_CONSTANT_C_MOL
    log_base: str = "log10"

    def __post_init__(self) -> None:
        for name in ("u_rev", "k1", "k2", "k3", "cell_area_total", "i_max",
                     "faraday_f1", "m_h2", "f_const"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.faraday_f2 <= 1.0:
            raise ValueError(f"faraday_f2 must be in (0, 1], got {self.faraday_f2}")
        if self.log_base not in ("log10", "ln"):
            raise ValueError(f"log_base must be 'log10' or 'ln', got {self.log_base!r}")

    @classmethod
    def from_rated_power(cls, rated_power_mw: float, **kwargs) -> "ElectrolyzerPhysics":
        """Build a parameter set whose cell area is calibrated so that the
        stack consumes exactly ``rated_power_mw`` at maximum current density.
        """
        if rated_power_mw <= 0.0:
            raise ValueError("rated_power_mw must be positive")
        probe = cls(cell_area_total=1.0, **kwargs)
        watts_per_m2 = _cell_voltage(probe, probe.i_max) * probe.i_max
        return replace(probe, cell_area_total=rated_power_mw * 1e6 / watts_per_m2)

    @property
    def rated_power_mw(self) -> float:
        return electrical_power(self, self.i_max)


@dataclass(frozen=True)
class OperatingPoint:
    """One point on the operating curve."""

    current_density: float  # A/m^2
    power_mw: float
    hydrogen_kg_h: float
    efficiency_kg_mwh: float


def _check_current(phys: ElectrolyzerPhysics, i) -> np.ndarray:
    i = np.asarray(i, dtype=float)
    if np.any(i < 0.0) or np.any(i > phys.i_max * (1.0 + 1e-12)):
        raise PhysicsDomainError(
            f"current density outside [0, {phys.i_max}] A/m^2")
    return i


def _cell_voltage(phys: ElectrolyzerPhysics, i):
    log = np.log10 if phys.log_base == "log10" else np.log
    return phys.u_rev + phys.k1 * i + phys.k2 * log(phys.k3 * i + 1.0)


def cell_voltage(phys: ElectrolyzerPhysics, i):
    """Cell voltage [V] at current density ``i`` [A/m^2]."""
    i = _check_current(phys, i)
    out = _cell_voltage(phys, i)
    return float(out) if out.ndim == 0 else out


def electrical_power(phys: ElectrolyzerPhysics, i):
    """Stack power consumption [MW] at current density ``i`` [A/m^2]."""
    i = _check_current(phys, i)
    out = _cell_voltage(phys, i) * i * phys.cell_area_total * 1e-6
    return float(out) if out.ndim == 0 else out


def faraday_efficiency(phys: ElectrolyzerPhysics, i):
    """Fraction of the theoretical hydrogen yield actually produced [-]."""
    i = _check_current(phys, i)
    out = phys.faraday_f2 * i * i / (phys.faraday_f1 + i * i)
    return float(out) if out.ndim == 0 else out


def hydrogen_rate(phys: ElectrolyzerPhysics, i):
    """Hydrogen production rate [kg/h] at current density ``i`` [A/m^2]."""
    i = _check_current(phys, i)
    theoretical = 3600.0 * phys.m_h2 * i * phys.cell_area_total / (2.0 * phys.f_const)
    out = faraday_efficiency(phys, i) * theoretical
    return float(out) if np.ndim(out) == 0 else out


def current_from_power(phys: ElectrolyzerPhysics, p, tol: float = 1e-10,
                       max_iter: int = 200):
    """Invert the power curve: current density [A/m^2] drawing ``p`` MW.

    Power is strictly increasing in current density, so plain bisection is
    used down to ``tol`` A/m^2. Accepts scalars or arrays.
    """
    p = np.asarray(p, dtype=float)
    rated = electrical_power(phys, phys.i_max)
    if np.any(p < -1e-12) or np.any(p > rated * (1.0 + 1e-12)):
        raise PhysicsDomainError(f"power outside [0, {rated}] MW")
    lo = np.zeros_like(p)
    hi = np.full_like(p, phys.i_max)
    area = phys.cell_area_total
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        too_low = _cell_voltage(phys, mid) * mid * area * 1e-6 < p
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
        if np.max(hi - lo) <= tol:
            break
    else:
        raise PhysicsNumericError("power inversion did not converge")
    out = 0.5 * (lo + hi)
    return float(out) if out.ndim == 0 else out


def hydrogen_at_power(phys: ElectrolyzerPhysics, p):
    """Hydrogen production rate [kg/h] when consuming ``p`` MW."""
    return hydrogen_rate(phys, current_from_power(phys, p))


def efficiency_at_power(phys: ElectrolyzerPhysics, p):
    """Specific production [kg/MWh] when consuming ``p`` MW (p > 0)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0):
        raise PhysicsDomainError("efficiency is defined for strictly positive power")
    out = hydrogen_at_power(phys, p) / p
    return float(out) if np.ndim(out) == 0 else out


def find_peak_efficiency(phys: ElectrolyzerPhysics, p_lo: float | None = None,
                         p_hi: float | None = None,
                         grid_points: int = 10_000) -> OperatingPoint:
    """Locate the operating point of maximum specific production.

    Scans a uniform current-density grid to bracket the maximum, then
    refines the bracket with golden-section search. The search window
    defaults to the full curve above a tiny positive power.
    """
    rated = electrical_power(phys, phys.i_max)
    lo_p = p_lo if p_lo is not None else rated * 1e-4
    hi_p = p_hi if p_hi is not None else rated
    if not 0.0 < lo_p < hi_p <= rated * (1.0 + 1e-12):
        raise PhysicsDomainError("invalid search window for the efficiency peak")

    i_lo = current_from_power(phys, lo_p)
    i_hi = current_from_power(phys, min(hi_p, rated))
    grid = np.linspace(i_lo, i_hi, grid_points)
    eff = hydrogen_rate(phys, grid) / electrical_power(phys, grid)
    k = int(np.argmax(eff))

    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid_points - 1)]

    def eff_at(i: float) -> float:
        return hydrogen_rate(phys, i) / electrical_power(phys, i)

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = eff_at(x1), eff_at(x2)
    while b - a > 1e-9 * phys.i_max:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = eff_at(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = eff_at(x1)
    i_star = 0.5 * (a + b)
    p_star = electrical_power(phys, i_star)
    h_star = hydrogen_rate(phys, i_star)
    return OperatingPoint(current_density=i_star, power_mw=p_star,
                          hydrogen_kg_h=h_star, efficiency_kg_mwh=h_star / p_star)
