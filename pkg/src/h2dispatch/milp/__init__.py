"""Embedded MILP solver: sparse instances, bounded-variable primal simplex,
and best-first branch and bound with a relative optimality-gap certificate."""

from .instance import (InstanceError, IntegrityError, MilpInstance, MilpSolution,
                       read_solution_file)
from .simplex import LpSolution, SimplexError, solve_lp
from .branch_bound import solve_milp

__all__ = [
    "MilpInstance", "MilpSolution", "InstanceError", "IntegrityError",
    "LpSolution", "SimplexError", "solve_lp", "solve_milp",
    "read_solution_file",
]
