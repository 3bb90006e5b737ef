#!/usr/bin/env python3
"""Generate the bundled synthetic price and wind series (336 hours).

The bundled scenario is synthetic on purpose: real market data stays
external and user-supplied. Prices follow a daily shape around a Danish
2019-like mean with mild noise; wind capacity factors are an autocorrelated
process with a ~0.44 mean. Both series are deterministic (fixed seed).

Run from the repo root:

    python scripts/make_default_scenario.py
"""

import pathlib
import sys

import numpy as np

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "h2dispatch" / "data"
HOURS = 336
SEED = 20190101


def main() -> None:
    rng = np.random.default_rng(SEED)
    t = np.arange(HOURS)

    daily = 8.0 * np.sin(2.0 * np.pi * (t % 24 - 9.0) / 24.0)
    weekly = 3.0 * np.sin(2.0 * np.pi * t / 168.0)
    noise = rng.normal(0.0, 6.0, HOURS)
    prices = np.round(38.5 + daily + weekly + noise, 2)

    cf = np.empty(HOURS)
    level = 0.45
    for k in range(HOURS):
        level = 0.92 * level + 0.08 * rng.uniform(0.05, 0.95) + rng.normal(0.0, 0.02)
        cf[k] = min(max(level, 0.0), 1.0)
    cf = np.round(cf, 4)

    stamps = [f"2019-01-{1 + h // 24:02d}T{h % 24:02d}:00:00Z" for h in t]

    with open(DATA_DIR / "prices.csv", "w") as fh:
        fh.write("timestamp,price_eur_mwh\n")
        for s, p in zip(stamps, prices):
            fh.write(f"{s},{p}\n")
    with open(DATA_DIR / "wind.csv", "w") as fh:
        fh.write("timestamp,capacity_factor\n")
        for s, c in zip(stamps, cf):
            fh.write(f"{s},{c}\n")
    print(f"wrote {HOURS} hours to {DATA_DIR} "
          f"(mean price {prices.mean():.2f} EUR/MWh, mean cf {cf.mean():.3f})")


if __name__ == "__main__":
    main()
