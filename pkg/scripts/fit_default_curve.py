#!/usr/bin/env python3
"""Fit the default electrolyzer curve coefficients.

The voltage constants below describe a large alkaline stack at 90 degC and
30 bar. The Faraday-efficiency scale ``faraday_f1`` is then fitted by
bisection so that the specific-production curve peaks at 30% of rated load,
and ``faraday_f2`` is set just below one so the high-current Faraday
efficiency stays in a realistic band. The result is written into the
checked-in default scenario config.

Run from the repo root:

    python scripts/fit_default_curve.py [--write]

Without --write the fitted values are only printed.
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from h2dispatch.physics import ElectrolyzerPhysics, electrical_power, hydrogen_rate

VOLTAGE_DEFAULTS = {
    "u_rev": 1.184,   # V
    "k1": 6.0e-5,     # V*m^2/A
    "k2": 0.185,      # V
    "k3": 0.024,      # m^2/A
}
I_MAX = 5000.0        # A/m^2
RATED_MW = 52.25
FARADAY_F2 = 0.985
PEAK_LOAD_FRACTION = 0.30

CONFIG_PATH = pathlib.Path(__file__).resolve().parents[1] / "src" / "h2dispatch" / "data" / "default_config.json"


def peak_fraction(f1: float) -> float:
    phys = ElectrolyzerPhysics.from_rated_power(
        RATED_MW, i_max=I_MAX, faraday_f1=f1, faraday_f2=FARADAY_F2,
        **VOLTAGE_DEFAULTS)
    grid = np.linspace(1.0, I_MAX, 20001)
    eff = hydrogen_rate(phys, grid) / electrical_power(phys, grid)
    k = int(np.argmax(eff))
    return electrical_power(phys, grid[k]) / RATED_MW


def fit_f1() -> float:
    lo, hi = 1e3, 5e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if peak_fraction(mid) < PEAK_LOAD_FRACTION:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--write", action="store_true",
                        help="update the physics block of the default config")
    args = parser.parse_args()

    f1 = fit_f1()
    physics = dict(VOLTAGE_DEFAULTS)
    physics.update({
        "faraday_f1": f1,
        "faraday_f2": FARADAY_F2,
        "log_base": "log10",
    })
    print(json.dumps(physics, indent=2))
    print(f"# efficiency peak at {peak_fraction(f1):.5f} of rated load")

    if args.write:
        config = json.loads(CONFIG_PATH.read_text())
        config["electrolyzer"]["physics"] = physics
        CONFIG_PATH.write_text(json.dumps(config, indent=2) + "\n")
        print(f"# wrote {CONFIG_PATH}")


if __name__ == "__main__":
    main()
