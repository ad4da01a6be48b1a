"""Built-in exact solver for the routing BILPs, plus LP-format export.

The backend is a deterministic depth-first branch and bound over binary
variables.  Bounds come from the HiGHS linear relaxation of the current
subproblem (admissible: the relaxation never exceeds the subproblem
optimum).  Fixing a variable triggers constraint propagation over the
unit-coefficient rows.  Branching picks the most fractional relaxation
variable, ties broken by ordinal, and all solver modes share the same
search order so their incumbents are comparable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

MODES = ("optimal", "near_optimal", "feasible_first")

_OBJ_TOL = 1e-9
_INT_TOL = 1e-6


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "optimal"
    rel_gap: float = 0.08
    abs_gap: float = 0.08
    deadline: float | None = None  # wall-clock seconds for this solve call
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.rel_gap < 0 or self.abs_gap < 0:
            raise ValueError("rel_gap and abs_gap must be >= 0")


@dataclass(frozen=True)
class SolveResult:
    status: str  # optimal | feasible | infeasible | deadline_exceeded
    assignment: np.ndarray | None
    objective: float | None
    best_bound: float | None
    gap: float | None = None
    nodes: int = 0


class _Propagator:
    """Unit-coefficient bound propagation with a trail for backtracking."""

    def __init__(self, model):
        self.rows = model.rows
        n = model.var_count
        self.values = np.full(n, -1, dtype=np.int8)
        # per-row counters: plus fixed to 1, plus free, minus fixed to 1, minus free
        self.p1 = np.zeros(len(self.rows), dtype=np.int32)
        self.pf = np.array([len(r.plus) for r in self.rows], dtype=np.int32)
        self.m1 = np.zeros(len(self.rows), dtype=np.int32)
        self.mf = np.array([len(r.minus) for r in self.rows], dtype=np.int32)
        var_plus = [[] for _ in range(n)]
        var_minus = [[] for _ in range(n)]
        for ri, r in enumerate(self.rows):
            for v in r.plus:
                var_plus[v].append(ri)
            for v in r.minus:
                var_minus[v].append(ri)
        self.var_plus = [tuple(x) for x in var_plus]
        self.var_minus = [tuple(x) for x in var_minus]
        self.trail = []

    def mark(self):
        return len(self.trail)

    def undo_to(self, mark):
        while len(self.trail) > mark:
            v = self.trail.pop()
            val = self.values[v]
            self.values[v] = -1
            for ri in self.var_plus[v]:
                self.pf[ri] += 1
                if val == 1:
                    self.p1[ri] -= 1
            for ri in self.var_minus[v]:
                self.mf[ri] += 1
                if val == 1:
                    self.m1[ri] -= 1

    def _fix(self, v, val, queue):
        cur = self.values[v]
        if cur != -1:
            return cur == val
        self.values[v] = val
        self.trail.append(v)
        for ri in self.var_plus[v]:
            self.pf[ri] -= 1
            if val == 1:
                self.p1[ri] += 1
            queue.append(ri)
        for ri in self.var_minus[v]:
            self.mf[ri] -= 1
            if val == 1:
                self.m1[ri] += 1
            queue.append(ri)
        return True

    def assign(self, v, val):
        """Fix a variable and propagate to a fixpoint.  Returns False on conflict."""
        queue = []
        if not self._fix(v, val, queue):
            return False
        return self._propagate(queue)

    def propagate_all(self):
        """Examine every row once (used at the root).  Returns False on conflict."""
        return self._propagate(list(range(len(self.rows))))

    def _propagate(self, queue):
        values = self.values
        while queue:
            ri = queue.pop()
            r = self.rows[ri]
            lo = self.p1[ri] - self.m1[ri] - self.mf[ri]
            hi = self.p1[ri] + self.pf[ri] - self.m1[ri]
            if lo > r.rhs:
                return False
            if r.rel == "=" and hi < r.rhs:
                return False
            if lo == r.rhs and (self.pf[ri] or self.mf[ri]):
                # any free plus at 1 (or free minus at 0) would overshoot
                for v in r.plus:
                    if values[v] == -1 and not self._fix(v, 0, queue):
                        return False
                for v in r.minus:
                    if values[v] == -1 and not self._fix(v, 1, queue):
                        return False
            elif r.rel == "=" and hi == r.rhs and (self.pf[ri] or self.mf[ri]):
                for v in r.plus:
                    if values[v] == -1 and not self._fix(v, 1, queue):
                        return False
                for v in r.minus:
                    if values[v] == -1 and not self._fix(v, 0, queue):
                        return False
        return True


def _build_lp(model):
    eq_rows, ub_rows = [], []
    for r in model.rows:
        (eq_rows if r.rel == "=" else ub_rows).append(r)

    def matrix(rows):
        data, ri, ci = [], [], []
        for idx, r in enumerate(rows):
            for v in r.plus:
                data.append(1.0)
                ri.append(idx)
                ci.append(v)
            for v in r.minus:
                data.append(-1.0)
                ri.append(idx)
                ci.append(v)
        return sp.csr_matrix((data, (ri, ci)), shape=(len(rows), model.var_count))

    a_eq = matrix(eq_rows) if eq_rows else None
    b_eq = np.array([r.rhs for r in eq_rows], dtype=float) if eq_rows else None
    a_ub = matrix(ub_rows) if ub_rows else None
    b_ub = np.array([r.rhs for r in ub_rows], dtype=float) if ub_rows else None
    return a_eq, b_eq, a_ub, b_ub


def _check_assignment(model, x):
    for r in model.rows:
        val = sum(x[v] for v in r.plus) - sum(x[v] for v in r.minus)
        if r.rel == "=" and val != r.rhs:
            return False
        if r.rel == "<=" and val > r.rhs:
            return False
    return True


def solve(model, cfg: SolverConfig | None = None) -> SolveResult:
    """Solve a routing BILP with the built-in branch-and-bound backend."""
    cfg = cfg or SolverConfig()
    start = time.monotonic()
    deadline = None if cfg.deadline is None else start + cfg.deadline

    n = model.var_count
    c = model.objective
    if n == 0:
        return SolveResult(status="optimal", assignment=np.zeros(0, dtype=np.int8),
                           objective=0.0, best_bound=0.0, nodes=1)

    prop = _Propagator(model)
    a_eq, b_eq, a_ub, b_ub = _build_lp(model)

    incumbent = None
    inc_obj = np.inf
    nodes = 0
    # stack frames: [var, value_order, next_idx, trail_mark, node_bound]
    stack = []

    def relax_bound():
        """LP relaxation of the current subproblem.  Returns (bound, x) or None."""
        values = prop.values
        lb = np.where(values == 1, 1.0, 0.0)
        ub = np.where(values == 0, 0.0, 1.0)
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=np.column_stack([lb, ub]), method="highs")
        if res.status == 2:
            return None
        if res.status != 0:
            raise SolverError(f"LP relaxation failed with status {res.status}: {res.message}")
        return res.fun, res.x

    def global_bound():
        bounds = [f[4] for f in stack if f[2] < 2]
        return min(bounds) if bounds else inc_obj

    def result(status, gap=None):
        if status in ("optimal", "infeasible"):
            bb = inc_obj if incumbent is not None else None
        else:
            bb = global_bound()
        return SolveResult(
            status=status,
            assignment=None if incumbent is None else incumbent.copy(),
            objective=None if incumbent is None else float(inc_obj),
            best_bound=None if bb is None or not np.isfinite(bb) else float(bb),
            gap=gap, nodes=nodes)

    def gap_met():
        if incumbent is None:
            return None
        glb = global_bound()
        abs_gap = inc_obj - glb
        rel = abs_gap / max(inc_obj, 1e-12)
        if rel <= cfg.rel_gap or abs_gap <= cfg.abs_gap:
            return rel
        return None

    if not prop.propagate_all():
        return SolveResult(status="infeasible", assignment=None, objective=None,
                           best_bound=None, nodes=1)

    descend = True  # process the current node next (vs. backtrack)
    while True:
        if descend:
            nodes += 1
            if deadline is not None and time.monotonic() > deadline:
                return result("deadline_exceeded")
            # cheap prune on already-committed cost (all costs are >= 0)
            fixed_cost = float(c[prop.values == 1].sum())
            if fixed_cost >= inc_obj - _OBJ_TOL:
                descend = False
                continue
            lp = relax_bound()
            if lp is None:
                descend = False
                continue
            bound, x = lp
            if bound >= inc_obj - _OBJ_TOL:
                descend = False
                continue
            frac = np.abs(x - np.round(x))
            free = prop.values == -1
            if not free.any() or frac[free].max() <= _INT_TOL:
                cand = np.round(x).astype(np.int8)
                cand[prop.values == 1] = 1
                cand[prop.values == 0] = 0
                if not _check_assignment(model, cand):
                    raise SolverError("integral relaxation failed exact feasibility check")
                obj = float(c @ cand)
                if obj < inc_obj:
                    incumbent = cand
                    inc_obj = obj
                    if cfg.mode == "feasible_first":
                        glb = global_bound()
                        rel = (inc_obj - glb) / max(inc_obj, 1e-12)
                        return result("feasible", gap=max(rel, 0.0))
                    if cfg.mode == "near_optimal":
                        g = gap_met()
                        if g is not None:
                            return result("feasible", gap=max(g, 0.0))
                descend = False
                continue
            # branch on the most fractional free variable, ties by ordinal
            score = np.where(free, 0.5 - np.abs(x - 0.5), -1.0)
            v = int(np.argmax(score))
            preferred = 1 if x[v] >= 0.5 else 0
            stack.append([v, (preferred, 1 - preferred), 0, prop.mark(), bound])
            frame = stack[-1]
            frame[2] = 1
            if prop.assign(v, frame[1][0]):
                continue
            descend = False
        else:
            if cfg.mode == "near_optimal":
                g = gap_met()
                if g is not None:
                    return result("feasible", gap=max(g, 0.0))
            if not stack:
                break
            frame = stack[-1]
            prop.undo_to(frame[3])
            if frame[2] < 2:
                val = frame[1][frame[2]]
                frame[2] += 1
                if frame[4] >= inc_obj - _OBJ_TOL:
                    # sibling subtree cannot beat the incumbent
                    stack.pop()
                    continue
                if prop.assign(frame[0], val):
                    descend = True
                continue
            stack.pop()

    if incumbent is None:
        return SolveResult(status="infeasible", assignment=None, objective=None,
                           best_bound=None, nodes=nodes)
    return SolveResult(status="optimal", assignment=incumbent.copy(),
                       objective=float(inc_obj), best_bound=float(inc_obj),
                       nodes=nodes)


def export_lp(model) -> str:
    """Standard LP-format text for external solvers.  Byte-stable per model."""
    lines = ["Minimize", " obj:"]
    terms = []
    for v in range(model.var_count):
        terms.append(f" + {model.objective[v]:.17g} {model.var_name(v)}")
    if terms:
        lines[-1] += "".join(terms)
    else:
        lines[-1] += " 0"
    lines.append("Subject To")
    for r in model.rows:
        parts = []
        for v in r.plus:
            parts.append(f" + {model.var_name(v)}")
        for v in r.minus:
            parts.append(f" - {model.var_name(v)}")
        rel = "=" if r.rel == "=" else "<="
        lines.append(f" {r.name}:{''.join(parts)} {rel} {r.rhs}")
    lines.append("Binary")
    for v in range(model.var_count):
        lines.append(f" {model.var_name(v)}")
    lines.append("End")
    return "\n".join(lines) + "\n"
