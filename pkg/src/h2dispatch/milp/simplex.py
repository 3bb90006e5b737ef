"""Primal simplex for LPs with bounded variables.

Rows are normalized so every inequality reads <=; each row gets one slack
(fixed at zero for equalities), giving the computational form
``A x + s = b`` with two-sided bounds on every column. The basis is held as
a dense LU factorization with product-form eta updates, refactorized
periodically.

Feasibility is restored by a composite phase 1 that maximizes the negative
of the total bound violation of basic variables; it works from any starting
basis, which is what makes warm starts across branch-and-bound nodes cheap.
Phase 2 is the ordinary bounded-variable primal step on the true objective.
Pricing is Dantzig's rule, switching to Bland's rule after a stall of
degenerate pivots until progress resumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse

INFEAS_TOL = 1e-7
DUAL_TOL = 1e-7
PIVOT_TOL = 1e-9
DEGEN_STEP_TOL = 1e-9
STALL_LIMIT = 50          # degenerate pivots before Bland's rule kicks in
REFACTOR_EVERY = 100      # eta updates between refactorizations


class SimplexError(RuntimeError):
    """Numerical failure (singular basis after retries, iteration cap, ...)."""


@dataclass
class LpSolution:
    status: str                 # optimal | infeasible | unbounded
    x: np.ndarray | None        # structural variable values
    objective: float
    iterations: int
    basis: tuple[np.ndarray, np.ndarray] | None  # (basic columns, at-upper mask)


class StandardForm:
    """Normalized constraint data, shareable across solves with varying bounds."""

    def __init__(self, a_csr: sparse.csr_matrix, senses: np.ndarray,
                 rhs: np.ndarray, obj: np.ndarray):
        m, n = a_csr.shape
        flip = np.where(senses == ">", -1.0, 1.0)
        self.a_csc = (sparse.diags(flip) @ a_csr).tocsc() if m else sparse.csc_matrix((0, n))
        self.at_csr = self.a_csc.T.tocsr()
        self.rhs = rhs * flip
        self.is_eq = senses == "="
        self.obj = np.asarray(obj, dtype=float)
        self.m = m
        self.n = n
        # structural columns appearing in exactly one row, used by the crash start
        counts = np.diff(self.a_csc.indptr)
        self.singleton_cols = np.flatnonzero(counts == 1)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.a_csc.indptr[j], self.a_csc.indptr[j + 1]
        return self.a_csc.indices[lo:hi], self.a_csc.data[lo:hi]


class _Core:
    """One simplex solve over a StandardForm with given column bounds."""

    def __init__(self, form: StandardForm, lb: np.ndarray, ub: np.ndarray,
                 max_iter: int):
        self.form = form
        m, n = form.m, form.n
        self.m, self.n = m, n
        ncols = n + m
        self.lb = np.concatenate([lb, np.where(form.is_eq, 0.0, 0.0)])
        self.ub = np.concatenate([ub, np.where(form.is_eq, 0.0, math.inf)])
        self.obj = np.concatenate([form.obj, np.zeros(m)])
        self.x = np.zeros(ncols)
        self.at_upper = np.zeros(ncols, dtype=bool)
        self.in_basis = np.zeros(ncols, dtype=bool)
        self.basic = np.zeros(m, dtype=np.int64)
        self.max_iter = max_iter
        self.iterations = 0
        self.lu = None
        self.etas: list[tuple[int, np.ndarray]] = []
        self.dual_tol = DUAL_TOL * max(1.0, float(np.max(np.abs(self.obj)))
                                       if ncols else 1.0)

    # -- basis handling -------------------------------------------------

    def _dense_basis(self) -> np.ndarray:
        b = np.zeros((self.m, self.m))
        for pos, j in enumerate(self.basic):
            if j >= self.n:
                b[j - self.n, pos] = 1.0
            else:
                rows, vals = self.form.column(j)
                b[rows, pos] = vals
        return b

    def refactor(self) -> bool:
        """Rebuild the LU factors; returns False on a singular basis."""
        if self.m == 0:
            self.lu = None
            self.etas = []
            return True
        b = self._dense_basis()
        lu, piv = linalg.lu_factor(b, check_finite=False)
        if np.min(np.abs(np.diag(lu))) < 1e-12:
            return False
        self.lu = (lu, piv)
        self.etas = []
        return True

    def ftran(self, col: np.ndarray) -> np.ndarray:
        v = linalg.lu_solve(self.lu, col, check_finite=False)
        for p, g in self.etas:
            t = v[p]
            if t != 0.0:
                v = v - g * t
        return v

    def btran(self, cost: np.ndarray) -> np.ndarray:
        v = cost.copy()
        for p, g in reversed(self.etas):
            v[p] -= g @ v
        return linalg.lu_solve(self.lu, v, trans=1, check_finite=False)

    def column_dense(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        if j >= self.n:
            col[j - self.n] = 1.0
        else:
            rows, vals = self.form.column(j)
            col[rows] = vals
        return col

    def recompute_basics(self) -> None:
        if self.m == 0:
            return
        x_nb = self.x.copy()
        x_nb[self.basic] = 0.0
        resid = self.form.rhs - self.form.a_csc @ x_nb[:self.n] - x_nb[self.n:]
        self.x[self.basic] = self.ftran(resid)

    # -- starting points --------------------------------------------------

    def set_bounds(self, lb: np.ndarray, ub: np.ndarray) -> None:
        """Swap in new structural bounds (slack bounds are unchanged)."""
        self.lb[:self.n] = lb
        self.ub[:self.n] = ub

    def _set_nonbasic_to_bounds(self) -> None:
        nb = ~self.in_basis
        lb_ok = np.isfinite(self.lb)
        ub_ok = np.isfinite(self.ub)
        self.at_upper[nb & self.at_upper & ~ub_ok] = False
        self.at_upper[nb & ~self.at_upper & ~lb_ok & ub_ok] = True
        vals = np.where(self.at_upper, self.ub,
                        np.where(lb_ok, self.lb,
                                 np.where(ub_ok, self.ub, 0.0)))
        self.x[nb] = vals[nb]

    def cold_start(self) -> None:
        self.basic = self.n + np.arange(self.m, dtype=np.int64)
        self.in_basis[:] = False
        self.in_basis[self.basic] = True
        self.at_upper[:] = False
        self._set_nonbasic_to_bounds()
        if self.m == 0:
            return
        # crash: rows whose slack would start infeasible swap in a structural
        # singleton column when its implied value fits the column's bounds
        resid = np.asarray(self.form.rhs - self.form.a_csc @ self.x[:self.n])
        used: set[int] = set()
        by_row: dict[int, list[int]] = {}
        for j in self.form.singleton_cols:
            rows, _ = self.form.column(j)
            by_row.setdefault(int(rows[0]), []).append(j)
        for r in range(self.m):
            slack_bad = (self.form.is_eq[r] and abs(resid[r]) > INFEAS_TOL) or \
                        (not self.form.is_eq[r] and resid[r] < -INFEAS_TOL)
            if not slack_bad:
                continue
            for j in by_row.get(r, []):
                if j in used:
                    continue
                _, vals = self.form.column(j)
                v = self.x[j] + resid[r] / vals[0]
                if self.lb[j] - INFEAS_TOL <= v <= self.ub[j] + INFEAS_TOL:
                    slack = self.n + r
                    self.in_basis[slack] = False
                    self.x[slack] = 0.0
                    self.at_upper[slack] = False
                    self.basic[r] = j
                    self.in_basis[j] = True
                    self.x[j] = min(max(v, self.lb[j]), self.ub[j])
                    used.add(j)
                    break
        if not self.refactor():
            raise SimplexError("singular basis after crash start")
        self.recompute_basics()

    def warm_start(self, basic: np.ndarray, at_upper: np.ndarray,
                   keep_factor: bool = False) -> bool:
        """Adopt a basis from a previous solve; with ``keep_factor`` the
        current factorization is reused when the basis is unchanged (the
        plunging case in branch and bound, where only bounds differ)."""
        if len(basic) != self.m or len(at_upper) != self.n + self.m:
            return False
        if np.any(basic < 0) or np.any(basic >= self.n + self.m):
            return False
        reuse = (keep_factor and self.lu is not None and
                 np.array_equal(basic, self.basic))
        if not reuse and len(np.unique(basic)) != self.m:
            return False
        self.basic = basic.astype(np.int64).copy()
        self.in_basis[:] = False
        self.in_basis[self.basic] = True
        self.at_upper = at_upper.copy()
        self._set_nonbasic_to_bounds()
        if self.m and not reuse and not self.refactor():
            return False
        self.recompute_basics()
        if self.m and not np.all(np.isfinite(self.x[self.basic])):
            return False
        return True

    # -- main loop ---------------------------------------------------------

    def solve(self) -> LpSolution:
        self.iterations = 0
        if self.m == 0:
            take_upper = (self.obj[:self.n] > 0.0) & np.isfinite(self.ub[:self.n])
            x = np.where(take_upper, self.ub[:self.n], self.lb[:self.n])
            if np.any((self.obj[:self.n] > DUAL_TOL) & ~np.isfinite(self.ub[:self.n])):
                return LpSolution("unbounded", None, math.inf, 0, None)
            obj = float(self.obj[:self.n] @ x)
            return LpSolution("optimal", x, obj, 0,
                              (self.basic.copy(), take_upper.copy()))

        stall = 0
        bland = False

        while True:
            if self.iterations >= self.max_iter:
                raise SimplexError(f"simplex iteration cap {self.max_iter} reached")
            self.iterations += 1

            x_b = self.x[self.basic]
            lb_b = self.lb[self.basic]
            ub_b = self.ub[self.basic]
            below = x_b < lb_b - INFEAS_TOL
            above = x_b > ub_b + INFEAS_TOL
            phase1 = bool(np.any(below) or np.any(above))

            cost = np.zeros(self.n + self.m) if phase1 else self.obj
            if phase1:
                cost[self.basic[below]] = 1.0
                cost[self.basic[above]] = -1.0
            y = self.btran(cost[self.basic])
            d = np.empty(self.n + self.m)
            d[:self.n] = cost[:self.n] - (self.form.at_csr @ y)
            d[self.n:] = cost[self.n:] - y
            tol = DUAL_TOL if phase1 else self.dual_tol

            movable = ~self.in_basis & (self.ub - self.lb > 1e-12)
            up_ok = movable & ~self.at_upper & (d > tol)
            dn_ok = movable & self.at_upper & (d < -tol)
            eligible = up_ok | dn_ok
            if not np.any(eligible):
                if phase1:
                    return LpSolution("infeasible", None, -math.inf,
                                      self.iterations, None)
                self.recompute_basics()
                x = self.x[:self.n].copy()
                return LpSolution("optimal", x, float(self.obj[:self.n] @ x),
                                  self.iterations,
                                  (self.basic.copy(), self.at_upper.copy()))

            if bland:
                q = int(np.flatnonzero(eligible)[0])
            else:
                score = np.where(eligible, np.abs(d), -1.0)
                q = int(np.argmax(score))
            sigma = 1.0 if up_ok[q] else -1.0

            w = self.ftran(self.column_dense(q))
            delta = -sigma * w

            ratios = np.full(self.m, math.inf)
            pos = delta > PIVOT_TOL
            neg = delta < -PIVOT_TOL
            if phase1:
                inc = pos & ~above        # below rises to lb, feasible rises to ub
                dec = neg & ~below        # above falls to ub, feasible falls to lb
                target = np.empty(self.m)
                target[inc] = np.where(below[inc], lb_b[inc], ub_b[inc])
                target[dec] = np.where(above[dec], ub_b[dec], lb_b[dec])
            else:
                inc, dec = pos, neg
                target = np.empty(self.m)
                target[inc] = ub_b[inc]
                target[dec] = lb_b[dec]
            block = inc | dec
            with np.errstate(invalid="ignore"):
                ratios[block] = (target[block] - x_b[block]) / delta[block]
            ratios[block] = np.maximum(ratios[block], 0.0)
            ratios[block & ~np.isfinite(target)] = math.inf

            own = self.ub[q] - self.lb[q]
            t_basic = float(np.min(ratios)) if self.m else math.inf
            t_star = min(t_basic, own)

            if not math.isfinite(t_star):
                if phase1:
                    raise SimplexError("unblocked improving ray in phase 1")
                return LpSolution("unbounded", None, math.inf, self.iterations, None)

            if t_star <= DEGEN_STEP_TOL:
                stall += 1
                if stall >= STALL_LIMIT:
                    bland = True
            else:
                stall = 0
                bland = False

            if own <= t_basic:
                # bound flip: entering runs to its other bound, basis unchanged
                self.x[self.basic] = x_b - sigma * t_star * w
                self.at_upper[q] = ~self.at_upper[q]
                self.x[q] = self.ub[q] if self.at_upper[q] else self.lb[q]
                continue

            cand = np.flatnonzero(block & (ratios <= t_star + 1e-12))
            if bland:
                r = int(cand[np.argmin(self.basic[cand])])
            else:
                r = int(cand[np.argmax(np.abs(delta[cand]))])
            if abs(w[r]) < PIVOT_TOL:
                if not self.refactor():
                    raise SimplexError("singular basis during pivot recovery")
                self.recompute_basics()
                continue

            leaving = int(self.basic[r])
            self.x[self.basic] = x_b - sigma * t_star * w
            self.x[leaving] = target[r]  # the bound it blocked at (finite here)
            self.at_upper[leaving] = math.isfinite(ub_b[r]) and target[r] == ub_b[r]
            self.in_basis[leaving] = False

            self.x[q] = (self.ub[q] if self.at_upper[q] else self.lb[q]) + sigma * t_star
            self.basic[r] = q
            self.in_basis[q] = True

            g = w.copy()
            g[r] -= 1.0
            g /= w[r]
            self.etas.append((r, g))
            if len(self.etas) >= REFACTOR_EVERY:
                if not self.refactor():
                    raise SimplexError("singular basis at refactorization")
                self.recompute_basics()


def solve_lp(form_or_instance, lb: np.ndarray | None = None,
             ub: np.ndarray | None = None,
             warm_basis: tuple[np.ndarray, np.ndarray] | None = None,
             max_iter: int | None = None) -> LpSolution:
    """Solve the LP relaxation of an instance (or a prebuilt StandardForm).

    ``lb``/``ub`` override the structural bounds (used by branch and bound);
    ``warm_basis`` is a (basic, at_upper) pair from a previous solve on the
    same form.
    """
    if isinstance(form_or_instance, StandardForm):
        form = form_or_instance
        if lb is None or ub is None:
            raise ValueError("explicit bounds are required with a StandardForm")
    else:
        arr = form_or_instance.arrays()
        form = StandardForm(arr.a_csr, arr.senses, arr.rhs, arr.obj)
        lb = arr.lb if lb is None else lb
        ub = arr.ub if ub is None else ub
    if max_iter is None:
        max_iter = 20_000 + 200 * form.m
    core = _Core(form, np.asarray(lb, float), np.asarray(ub, float), max_iter)
    started = False
    if warm_basis is not None:
        started = core.warm_start(warm_basis[0], warm_basis[1])
    if not started:
        core.cold_start()
    return core.solve()
