"""Branch and bound over the binary variables of a MilpInstance.

The LP relaxation is solved at every node with the bounded-variable primal
simplex; children inherit the parent's final basis as a warm start.
Branching picks the most fractional binary (smallest index on ties). Node
selection is depth-first plunging until the first incumbent is found, then
best bound first. A node is pruned when its relaxation bound cannot beat
the incumbent by more than the requested relative gap, so the returned
incumbent carries a gap certificate:

    |bound - objective| / max(1, |objective|) <= gap

Every incumbent is rechecked against the original instance rows (not the
node LP) before it is accepted.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .instance import MilpInstance, MilpSolution
from .simplex import LpSolution, SimplexError, StandardForm, _Core

INTEGRALITY_TOL = 1e-6
RECHECK_TOL = 1e-6
BASIS_CACHE_OPEN_LIMIT = 5000  # beyond this many open nodes, drop warm bases


@dataclass(order=True)
class _Node:
    sort_bound: float
    seq: int
    fixes: tuple = field(compare=False)           # ((var, value), ...)
    bound: float = field(compare=False, default=math.inf)
    depth: int = field(compare=False, default=0)
    basis: tuple | None = field(compare=False, default=None)


def _node_bounds(base_lb: np.ndarray, base_ub: np.ndarray,
                 fixes: tuple) -> tuple[np.ndarray, np.ndarray]:
    lb = base_lb.copy()
    ub = base_ub.copy()
    for var, val in fixes:
        lb[var] = val
        ub[var] = val
    return lb, ub


def solve_milp(inst: MilpInstance, gap: float = 1e-4,
               node_limit: int = 50_000, threads: int = 1,
               deterministic: bool = True,
               warm_start: bool = True,
               lp_max_iter: int | None = None) -> MilpSolution:
    """Solve an instance to the requested relative optimality gap."""
    if gap <= 0.0:
        raise ValueError(f"gap must be positive, got {gap}")
    if node_limit < 1:
        raise ValueError("node_limit must be at least 1")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if deterministic:
        threads = 1

    t0 = time.perf_counter()
    arr = inst.arrays()
    form = StandardForm(arr.a_csr, arr.senses, arr.rhs, arr.obj)
    binary_idx = np.flatnonzero(arr.binary)
    max_iter = lp_max_iter if lp_max_iter is not None else 20_000 + 200 * form.m

    # single-threaded solves share one core so that a dive onto a child node
    # (same basis, one bound changed) reuses the current factorization
    shared_core = _Core(form, arr.lb.copy(), arr.ub.copy(), max_iter) \
        if threads == 1 else None

    def solve_node_lp(fixes: tuple, basis) -> LpSolution:
        lb, ub = _node_bounds(arr.lb, arr.ub, fixes)
        if shared_core is not None:
            core = shared_core
            core.set_bounds(lb, ub)
        else:
            core = _Core(form, lb, ub, max_iter)
        started = False
        if warm_start and basis is not None:
            started = core.warm_start(basis[0], basis[1],
                                      keep_factor=core is shared_core)
        if not started:
            core.cold_start()
        try:
            return core.solve()
        except SimplexError:
            if started:  # retry cold once before giving up
                core.cold_start()
                return core.solve()
            raise

    incumbent_x: np.ndarray | None = None
    incumbent_obj = -math.inf
    nodes = 0
    lp_iterations = 0
    seq = 0
    bound_trace: list[float] = []
    status = "optimal-within-gap"
    open_nodes: list[_Node] = [
        _Node(sort_bound=-math.inf, seq=seq, fixes=(), bound=math.inf, depth=0,
              basis=None)]
    pruned_bound = -math.inf

    def gap_abs() -> float:
        return gap * max(1.0, abs(incumbent_obj))

    def frontier_bound() -> float:
        best = max((n.bound for n in open_nodes), default=-math.inf)
        return max(best, pruned_bound, incumbent_obj)

    def select() -> _Node:
        if incumbent_x is None:
            return open_nodes.pop()  # depth-first plunge
        best = max(range(len(open_nodes)),
                   key=lambda k: (open_nodes[k].bound, -open_nodes[k].seq))
        return open_nodes.pop(best)

    def try_incumbent(x: np.ndarray, obj_est: float) -> bool:
        nonlocal incumbent_x, incumbent_obj
        snapped = x.copy()
        snapped[binary_idx] = np.round(snapped[binary_idx])
        if inst.check_solution(snapped, tol=RECHECK_TOL):
            return False
        obj = inst.objective_value(snapped)
        if obj > incumbent_obj:
            incumbent_x, incumbent_obj = snapped, obj
        return True

    def process(node: _Node, lp: LpSolution) -> None:
        nonlocal pruned_bound, seq
        if lp.status == "infeasible":
            return
        if lp.status != "optimal":
            raise SimplexError(f"node LP ended with status {lp.status}")
        node_bound = min(lp.objective, node.bound)
        if incumbent_x is not None and node_bound <= incumbent_obj + gap_abs():
            pruned_bound = max(pruned_bound, node_bound)
            return
        xb = lp.x[binary_idx]
        frac = np.abs(xb - np.round(xb))
        worst = int(np.argmax(frac)) if len(frac) else 0
        if len(frac) == 0 or frac[worst] <= INTEGRALITY_TOL:
            try_incumbent(lp.x, lp.objective)
            return
        # most fractional binary, ties resolved toward the smallest index
        best_score = frac[worst]
        cand = np.flatnonzero(frac >= best_score - 1e-12)
        branch_var = int(binary_idx[cand[0]])
        lp_val = lp.x[branch_var]
        basis = lp.basis if (warm_start and
                             len(open_nodes) < BASIS_CACHE_OPEN_LIMIT) else None
        first, second = (1.0, 0.0) if lp_val >= 0.5 else (0.0, 1.0)
        for val in (second, first):  # preferred child last: popped first when diving
            seq += 1
            open_nodes.append(_Node(
                sort_bound=-node_bound, seq=seq,
                fixes=node.fixes + ((branch_var, val),),
                bound=node_bound, depth=node.depth + 1, basis=basis))

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while open_nodes:
            if incumbent_x is not None and \
                    frontier_bound() <= incumbent_obj + gap_abs():
                break
            if nodes >= node_limit:
                status = "node-limit"
                break
            batch = []
            take = 1 if (threads == 1 or incumbent_x is None) else \
                min(threads, len(open_nodes), node_limit - nodes)
            for _ in range(take):
                if not open_nodes:
                    break
                node = select()
                if incumbent_x is not None and \
                        node.bound <= incumbent_obj + gap_abs():
                    pruned_bound = max(pruned_bound, min(node.bound, frontier_bound()))
                    continue
                batch.append(node)
            if not batch:
                continue
            nodes += len(batch)
            if pool is not None and len(batch) > 1:
                lps = list(pool.map(
                    lambda nd: solve_node_lp(nd.fixes, nd.basis), batch))
            else:
                lps = [solve_node_lp(nd.fixes, nd.basis) for nd in batch]
            for node, lp in zip(batch, lps):
                lp_iterations += lp.iterations
                process(node, lp)
            bound_trace.append(frontier_bound())
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    wall = time.perf_counter() - t0
    if incumbent_x is None:
        if status == "node-limit":
            return MilpSolution(status="node-limit", values=None,
                                objective=-math.inf, bound=frontier_bound(),
                                relative_gap=math.inf, nodes=nodes,
                                lp_iterations=lp_iterations, wall_time_s=wall,
                                gap_target=gap, bound_trace=bound_trace)
        return MilpSolution(status="infeasible", values=None, objective=-math.inf,
                            bound=-math.inf, relative_gap=math.inf, nodes=nodes,
                            lp_iterations=lp_iterations, wall_time_s=wall,
                            gap_target=gap, bound_trace=bound_trace)

    bound = frontier_bound()
    rel_gap = abs(bound - incumbent_obj) / max(1.0, abs(incumbent_obj))
    return MilpSolution(status=status, values=incumbent_x, objective=incumbent_obj,
                        bound=bound, relative_gap=rel_gap, nodes=nodes,
                        lp_iterations=lp_iterations, wall_time_s=wall,
                        gap_target=gap, bound_trace=bound_trace)
