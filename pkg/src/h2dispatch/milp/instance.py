"""Sparse MILP instance container and solution record.

An instance is a maximization over named variables (continuous with finite
bounds, or binary) subject to sparse rows with <=, >= or = sense. Instances
are built incrementally by the model builders, then frozen into numpy/scipy
arrays for the solver. The text export follows the LP file convention so
instances can be cross-checked against external solvers, and a matching
reader ingests "name = value" solution files produced by them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

SENSES = ("<=", ">=", "=")


class InstanceError(ValueError):
    """Raised for malformed instances (unknown variables, bad senses, ...)."""


class IntegrityError(RuntimeError):
    """Raised when a solution claimed feasible violates the instance."""


@dataclass(frozen=True)
class InstanceArrays:
    """Frozen numeric view of an instance."""

    a_csr: sparse.csr_matrix
    senses: np.ndarray      # '<' (<=), '>' (>=), '=' per row
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    obj: np.ndarray
    binary: np.ndarray      # bool mask


class MilpInstance:
    """Sparse maximization MILP built row by row."""

    def __init__(self, name: str = "milp"):
        self.name = name
        self.var_names: list[str] = []
        self._var_index: dict[str, int] = {}
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._obj: list[float] = []
        self._binary: list[bool] = []
        self.row_names: list[str] = []
        self._row_cols: list[np.ndarray] = []
        self._row_vals: list[np.ndarray] = []
        self._row_sense: list[str] = []
        self._row_rhs: list[float] = []
        self._arrays: InstanceArrays | None = None

    # -- construction -------------------------------------------------

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf,
                obj: float = 0.0, binary: bool = False) -> int:
        if name in self._var_index:
            raise InstanceError(f"duplicate variable name '{name}'")
        if binary:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        if lb > ub:
            raise InstanceError(f"variable '{name}' has empty bound range [{lb}, {ub}]")
        idx = len(self.var_names)
        self.var_names.append(name)
        self._var_index[name] = idx
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._obj.append(float(obj))
        self._binary.append(binary)
        self._arrays = None
        return idx

    def add_row(self, name: str, terms, sense: str, rhs: float) -> int:
        if sense not in SENSES:
            raise InstanceError(f"row '{name}': sense must be one of {SENSES}")
        cols: list[int] = []
        vals: list[float] = []
        seen: dict[int, int] = {}
        for ref, coef in terms:
            idx = self._var_index[ref] if isinstance(ref, str) else int(ref)
            if idx < 0 or idx >= len(self.var_names):
                raise InstanceError(f"row '{name}' references unknown variable {ref!r}")
            if coef == 0.0:
                continue
            if idx in seen:
                vals[seen[idx]] += float(coef)
            else:
                seen[idx] = len(cols)
                cols.append(idx)
                vals.append(float(coef))
        self.row_names.append(name)
        self._row_cols.append(np.asarray(cols, dtype=np.int64))
        self._row_vals.append(np.asarray(vals, dtype=float))
        self._row_sense.append(sense)
        self._row_rhs.append(float(rhs))
        self._arrays = None
        return len(self.row_names) - 1

    # -- views ---------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.row_names)

    @property
    def n_binary(self) -> int:
        return sum(self._binary)

    @property
    def n_continuous(self) -> int:
        return self.n_vars - self.n_binary

    def var_index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise InstanceError(f"unknown variable '{name}'") from None

    def arrays(self) -> InstanceArrays:
        if self._arrays is None:
            indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
            for r, cols in enumerate(self._row_cols):
                indptr[r + 1] = indptr[r] + len(cols)
            indices = (np.concatenate(self._row_cols) if self._row_cols
                       else np.zeros(0, dtype=np.int64))
            data = (np.concatenate(self._row_vals) if self._row_vals
                    else np.zeros(0, dtype=float))
            a_csr = sparse.csr_matrix((data, indices, indptr),
                                      shape=(self.n_rows, self.n_vars))
            sense_codes = np.array([{"<=": "<", ">=": ">", "=": "="}[s]
                                    for s in self._row_sense], dtype="U1")
            self._arrays = InstanceArrays(
                a_csr=a_csr,
                senses=sense_codes,
                rhs=np.asarray(self._row_rhs, dtype=float),
                lb=np.asarray(self._lb, dtype=float),
                ub=np.asarray(self._ub, dtype=float),
                obj=np.asarray(self._obj, dtype=float),
                binary=np.asarray(self._binary, dtype=bool),
            )
        return self._arrays

    # -- evaluation -----------------------------------------------------

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.arrays().obj @ np.asarray(x, dtype=float))

    def check_solution(self, x: np.ndarray, tol: float = 1e-6,
                       integrality_tol: float = 1e-6) -> list[tuple[str, float]]:
        """All bound/row/integrality violations above tolerance.

        Returns (name, amount) pairs; empty when the point is feasible.
        """
        arr = self.arrays()
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_vars,):
            raise InstanceError(f"solution has shape {x.shape}, expected ({self.n_vars},)")
        violations: list[tuple[str, float]] = []
        lo = arr.lb - x
        hi = x - arr.ub
        for idx in np.flatnonzero(lo > tol):
            violations.append((f"lb({self.var_names[idx]})", float(lo[idx])))
        for idx in np.flatnonzero(hi > tol):
            violations.append((f"ub({self.var_names[idx]})", float(hi[idx])))
        frac = np.abs(x - np.round(x))
        for idx in np.flatnonzero(arr.binary & (frac > integrality_tol)):
            violations.append((f"integrality({self.var_names[idx]})", float(frac[idx])))
        act = arr.a_csr @ x
        resid = act - arr.rhs
        for r in np.flatnonzero((arr.senses == "<") & (resid > tol)):
            violations.append((self.row_names[r], float(resid[r])))
        for r in np.flatnonzero((arr.senses == ">") & (resid < -tol)):
            violations.append((self.row_names[r], float(-resid[r])))
        for r in np.flatnonzero((arr.senses == "=") & (np.abs(resid) > tol)):
            violations.append((self.row_names[r], float(abs(resid[r]))))
        return violations

    # -- LP-format text ---------------------------------------------------

    def to_lp_format(self) -> str:
        """LP-format text with coefficients at 12 significant digits."""
        def fmt(v: float) -> str:
            return f"{v:.12g}"

        def safe(name: str) -> str:
            return name.replace("[", "(").replace("]", ")")

        out = [f"\\ {self.name}", "Maximize"]
        terms = [f"{'+' if c >= 0 else '-'} {fmt(abs(c))} {safe(n)}"
                 for n, c in zip(self.var_names, self._obj) if c != 0.0]
        out.append(" obj: " + (" ".join(terms) if terms else "0 " + safe(self.var_names[0])))
        out.append("Subject To")
        for r, name in enumerate(self.row_names):
            parts = []
            for idx, coef in zip(self._row_cols[r], self._row_vals[r]):
                parts.append(f"{'+' if coef >= 0 else '-'} {fmt(abs(coef))} "
                             f"{safe(self.var_names[idx])}")
            body = " ".join(parts) if parts else "0 " + safe(self.var_names[0])
            out.append(f" {safe(name)}: {body} {self._row_sense[r]} {fmt(self._row_rhs[r])}")
        out.append("Bounds")
        for n, lo, hi, is_bin in zip(self.var_names, self._lb, self._ub, self._binary):
            if is_bin:
                continue
            hi_text = fmt(hi) if math.isfinite(hi) else "+inf"
            out.append(f" {fmt(lo)} <= {safe(n)} <= {hi_text}")
        binaries = [safe(n) for n, b in zip(self.var_names, self._binary) if b]
        if binaries:
            out.append("Binaries")
            for k in range(0, len(binaries), 8):
                out.append(" " + " ".join(binaries[k:k + 8]))
        out.append("End")
        return "\n".join(out) + "\n"

    def write_lp(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_lp_format())


@dataclass
class MilpSolution:
    """Solver output with its optimality-gap certificate."""

    status: str                     # optimal-within-gap | infeasible | unbounded | node-limit
    values: np.ndarray | None
    objective: float
    bound: float
    relative_gap: float
    nodes: int
    lp_iterations: int
    wall_time_s: float
    gap_target: float
    bound_trace: list = field(default_factory=list, repr=False)

    def value_of(self, inst: MilpInstance, name: str) -> float:
        if self.values is None:
            raise IntegrityError(f"no solution values available (status {self.status})")
        return float(self.values[inst.var_index(name)])

    def values_by_name(self, inst: MilpInstance) -> dict[str, float]:
        if self.values is None:
            raise IntegrityError(f"no solution values available (status {self.status})")
        return {n: float(v) for n, v in zip(inst.var_names, self.values)}


def read_solution_file(inst: MilpInstance, path, tol: float = 1e-6) -> MilpSolution:
    """Read an external "name = value" solution file and verify it.

    Lines starting with '#' or '\\' are ignored; names may use either the
    internal bracket form or the exported parenthesis form. Unassigned
    variables default to their lower bound. The point is checked against
    every instance row before being accepted.
    """
    arr = inst.arrays()
    x = arr.lb.copy()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("\\"):
                continue
            if "=" in line:
                name, _, text = line.partition("=")
            else:
                parts = line.split()
                if len(parts) != 2:
                    raise InstanceError(f"{path}:{lineno}: expected 'name = value'")
                name, text = parts
            name = name.strip().replace("(", "[").replace(")", "]")
            try:
                x[inst.var_index(name)] = float(text)
            except ValueError:
                raise InstanceError(f"{path}:{lineno}: bad value {text!r}") from None
    violations = inst.check_solution(x, tol=tol)
    if violations:
        worst = max(violations, key=lambda nv: nv[1])
        raise IntegrityError(
            f"external solution violates '{worst[0]}' by {worst[1]:.3g} "
            f"({len(violations)} violations at tol {tol})")
    obj = inst.objective_value(x)
    return MilpSolution(status="optimal-within-gap", values=x, objective=obj,
                        bound=obj, relative_gap=0.0, nodes=0, lp_iterations=0,
                        wall_time_s=0.0, gap_target=0.0)
