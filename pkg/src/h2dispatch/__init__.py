"""Day-ahead dispatch optimization for wind-electrolyzer-storage hybrid plants.

The package couples an alkaline electrolyzer operating model (nonlinear
voltage/production curves, piecewise linearization) with unit-commitment
style MILP dispatch models, an embedded LP/branch-and-bound solver, ex-post
production analysis, and the electricity-price-range screening that tells
when curve detail actually changes the dispatch.
"""

__version__ = "0.1.0"
