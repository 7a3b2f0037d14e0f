"""Embedded optimization backend: two-phase primal simplex for LPs and
branch-and-bound over LP relaxations for integer, binary, and
semi-continuous variables.

The single seam is ``solve(model)``; an external engine can replace the
embedded one by providing the same signature.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .linmodel import BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, SEMI_CONTINUOUS, LinearModel

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITERATION_LIMIT = "IterationLimit"

FEAS_TOL = 1e-6
PIVOT_TOL = 1e-9
DEGENERATE_PIVOT_LIMIT = 1000


@dataclass
class SolveStats:
    iterations: int = 0
    nodes: int = 0
    wall_time: float = 0.0
    dual_objective: float | None = None
    max_dual_infeasibility: float | None = None
    best_bound: float | None = None


@dataclass
class Solution:
    status: str
    objective: float
    values: dict[str, float] = field(default_factory=dict)
    dual_values: dict[int, float] | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    def value(self, name: str) -> float:
        return self.values.get(name, 0.0)


class _Standardized:
    """min c.x + c0  s.t.  A x = b, x >= 0, with bookkeeping to map back."""

    def __init__(self, model: LinearModel, bounds: list[tuple[float, float]]):
        n_model = len(model.variables)
        cols: list[dict[int, float]] = []  # model var -> standardized column terms
        self.var_map: list[list[tuple[int, float]]] = []  # (std col, sign)
        self.shift = np.zeros(n_model)
        c_parts: list[float] = []

        def new_col() -> int:
            c_parts.append(0.0)
            return len(c_parts) - 1

        bound_rows: list[tuple[int, float]] = []  # (std col, upper value)
        for j, (lb, ub) in enumerate(bounds):
            if lb == -math.inf and ub == math.inf:
                cp, cm = new_col(), new_col()
                self.var_map.append([(cp, 1.0), (cm, -1.0)])
            elif lb == -math.inf:
                # x = ub - y
                col = new_col()
                self.var_map.append([(col, -1.0)])
                self.shift[j] = ub
            else:
                col = new_col()
                self.var_map.append([(col, 1.0)])
                self.shift[j] = lb
                if ub != math.inf:
                    bound_rows.append((col, ub - lb))

        self.n_struct = len(c_parts)
        c = np.zeros(self.n_struct)
        self.const = model.objective_constant
        for j, coef in model.objective.items():
            self.const += coef * self.shift[j]
            for col, sign in self.var_map[j]:
                c[col] += coef * sign

        rows: list[dict[int, float]] = []
        rhs: list[float] = []
        senses: list[str] = []
        self.row_origin: list[int] = []  # original constraint index, -1 for bound rows
        for k, con in enumerate(model.constraints):
            row: dict[int, float] = {}
            b = con.rhs
            for j, coef in con.coefs.items():
                b -= coef * self.shift[j]
                for col, sign in self.var_map[j]:
                    row[col] = row.get(col, 0.0) + coef * sign
            rows.append(row)
            rhs.append(b)
            senses.append(con.sense)
            self.row_origin.append(k)
        for col, u in bound_rows:
            rows.append({col: 1.0})
            rhs.append(u)
            senses.append(LE)
            self.row_origin.append(-1)

        m = len(rows)
        n_slack = sum(1 for s in senses if s != EQ)
        n = self.n_struct + n_slack
        A = np.zeros((m, n))
        bvec = np.array(rhs, dtype=float)
        slack_col = {}
        sc = self.n_struct
        for r, (row, sense) in enumerate(zip(rows, senses)):
            for col, coef in row.items():
                A[r, col] = coef
            if sense != EQ:
                A[r, sc] = 1.0 if sense == LE else -1.0
                slack_col[r] = sc
                sc += 1
        self.row_sign = np.ones(m)
        neg = bvec < 0
        A[neg] *= -1.0
        bvec[neg] *= -1.0
        self.row_sign[neg] = -1.0

        self.A = A
        self.b = bvec
        self.c = np.concatenate([c, np.zeros(n_slack)])
        self.slack_col = slack_col
        self.m = m
        self.n = n

    def initial_basis(self) -> tuple[np.ndarray, np.ndarray, list[int], list[int]]:
        """Extend with artificial columns; return (A, c_phase1, basis, artificials)."""
        basis = [-1] * self.m
        for r in range(self.m):
            sc = self.slack_col.get(r)
            if sc is not None and self.A[r, sc] > 0.5:
                basis[r] = sc
        artificials: list[int] = []
        extra = []
        for r in range(self.m):
            if basis[r] == -1:
                col = np.zeros((self.m, 1))
                col[r, 0] = 1.0
                extra.append(col)
                basis[r] = self.n + len(artificials)
                artificials.append(self.n + len(artificials))
        A = np.hstack([self.A] + extra) if extra else self.A.copy()
        return A, basis, artificials

    def unpack(self, x_std: np.ndarray, model: LinearModel) -> dict[str, float]:
        out = {}
        for j, v in enumerate(model.variables):
            val = self.shift[j]
            for col, sign in self.var_map[j]:
                val += sign * x_std[col]
            out[v.name] = float(val)
        return out


def _simplex(A, b, c, basis, allowed, max_iter):
    """Primal simplex on A x = b, x >= 0 with a starting feasible basis.

    Returns (status, x, basis, iterations). ``allowed`` marks columns
    eligible to enter the basis.
    """
    m, n = A.shape
    B = A[:, basis]
    try:
        binv = np.linalg.inv(B)
    except np.linalg.LinAlgError:
        return ITERATION_LIMIT, None, basis, 0
    xb = binv @ b
    degenerate_streak = 0
    for it in range(max_iter):
        cb = c[basis]
        y = cb @ binv
        reduced = c - y @ A
        cand = np.where(allowed & (reduced < -FEAS_TOL))[0]
        if cand.size == 0:
            x = np.zeros(n)
            x[basis] = xb
            return OPTIMAL, x, basis, it
        if degenerate_streak >= DEGENERATE_PIVOT_LIMIT:
            enter = int(cand[0])  # Bland's rule
        else:
            enter = int(cand[np.argmin(reduced[cand])])  # Dantzig
        d = binv @ A[:, enter]
        pos = np.where(d > PIVOT_TOL)[0]
        if pos.size == 0:
            return UNBOUNDED, None, basis, it
        ratios = xb[pos] / d[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + 1e-12]
        # deterministic tie-break: smallest leaving variable index
        leave = int(ties[np.argmin(np.array([basis[r] for r in ties]))])
        if rmin < 1e-12:
            degenerate_streak += 1
        else:
            degenerate_streak = 0
        basis[leave] = enter
        # refactorize each pivot: slower than an eta update but numerically
        # safe at the target problem sizes
        binv = np.linalg.inv(A[:, basis])
        xb = np.maximum(binv @ b, 0.0)
    return ITERATION_LIMIT, None, basis, max_iter


def _solve_relaxation(
    model: LinearModel, bounds: list[tuple[float, float]]
) -> tuple[str, float, dict[str, float] | None, dict[int, float] | None, SolveStats]:
    std = _Standardized(model, bounds)
    A, basis, artificials = std.initial_basis()
    n_total = A.shape[1]
    max_iter = 2000 + 200 * (std.m + n_total)
    stats = SolveStats()

    # phase 1: drive artificials to zero
    if artificials:
        c1 = np.zeros(n_total)
        c1[artificials] = 1.0
        allowed = np.ones(n_total, dtype=bool)
        status, x, basis, it1 = _simplex(A, std.b, c1, basis, allowed, max_iter)
        stats.iterations += it1
        if status != OPTIMAL:
            return ITERATION_LIMIT, math.inf, None, None, stats
        if c1[basis] @ np.linalg.inv(A[:, basis]) @ std.b > 1e-7:
            return INFEASIBLE, math.inf, None, None, stats
        # pivot basic artificials out where possible
        binv = np.linalg.inv(A[:, basis])
        tab = binv @ A
        drop_rows = []
        for r in range(std.m):
            if basis[r] in artificials:
                cols = np.where(np.abs(tab[r, : std.n]) > 1e-7)[0]
                if cols.size:
                    basis[r] = int(cols[0])
                    binv = np.linalg.inv(A[:, basis])
                    tab = binv @ A
                else:
                    drop_rows.append(r)
        if drop_rows:
            keep = [r for r in range(std.m) if r not in drop_rows]
            A = A[keep]
            std.b = std.b[keep]
            std.row_sign = std.row_sign[keep]
            std.row_origin = [std.row_origin[r] for r in keep]
            basis = [basis[r] for r in keep]
            std.m = len(keep)

    c2 = np.concatenate([std.c, np.zeros(n_total - std.n)])
    allowed = np.ones(n_total, dtype=bool)
    if artificials:
        allowed[std.n :] = False
    status, x, basis, it2 = _simplex(A, std.b, c2, basis, allowed, max_iter)
    stats.iterations += it2
    if status == UNBOUNDED:
        return UNBOUNDED, -math.inf, None, None, stats
    if status != OPTIMAL:
        return ITERATION_LIMIT, math.inf, None, None, stats

    obj = float(c2[basis] @ np.linalg.inv(A[:, basis]) @ std.b + std.const)
    values = std.unpack(x[: std.n], model)

    # duals and certificate quantities from the optimal basis
    binv = np.linalg.inv(A[:, basis])
    y = c2[basis] @ binv
    reduced = c2 - y @ A
    stats.max_dual_infeasibility = float(max(0.0, -reduced[allowed].min())) if std.n else 0.0
    stats.dual_objective = float(y @ std.b + std.const)
    duals: dict[int, float] = {}
    for r in range(std.m):
        k = std.row_origin[r]
        if k >= 0:
            duals[k] = float(y[r] * std.row_sign[r])
    return OPTIMAL, obj, values, duals, stats


def _model_bounds(model: LinearModel) -> list[tuple[float, float]]:
    return [(v.lb, v.ub) for v in model.variables]


def solve_lp(model: LinearModel) -> Solution:
    """Solve a pure LP with the embedded two-phase simplex.

    Raises ValueError if the model carries integrality marks.
    """
    if model.is_mixed_integer():
        raise ValueError("model has integer/binary/semi-continuous variables; use solve_mip")
    t0 = time.perf_counter()
    status, obj, values, duals, stats = _solve_relaxation(model, _model_bounds(model))
    stats.wall_time = time.perf_counter() - t0
    if status != OPTIMAL:
        return Solution(status=status, objective=obj, stats=stats)
    return Solution(status=OPTIMAL, objective=obj, values=values, dual_values=duals, stats=stats)


def _fractional_violations(model: LinearModel, values: dict[str, float], tol: float):
    """(var index, kind, violation magnitude) for every integrality breach."""
    out = []
    for j, v in enumerate(model.variables):
        x = values[v.name]
        if v.kind in (INTEGER, BINARY):
            frac = abs(x - round(x))
            if frac > tol:
                out.append((j, v.kind, frac))
        elif v.kind == SEMI_CONTINUOUS:
            if tol < x < v.semi_lb - tol:
                # distance to the nearer feasible piece
                out.append((j, SEMI_CONTINUOUS, min(x, v.semi_lb - x)))
    return out


def solve_mip(
    model: LinearModel,
    gap_tolerance: float = 1e-6,
    node_limit: int = 100000,
    int_tolerance: float = FEAS_TOL,
) -> Solution:
    """Branch-and-bound over LP relaxations.

    Integer/binary variables branch on floor/ceil; semi-continuous
    variables branch into the {0} and [S_min, S_max) pieces. Depth-first
    with a best-bound reorder of the open list every 1000 nodes.
    """
    t0 = time.perf_counter()
    root_bounds = _model_bounds(model)
    stats = SolveStats()

    status, obj, values, _, s = _solve_relaxation(model, root_bounds)
    stats.iterations += s.iterations
    stats.nodes = 1
    if status == INFEASIBLE:
        stats.wall_time = time.perf_counter() - t0
        return Solution(status=INFEASIBLE, objective=math.inf, stats=stats)
    if status == UNBOUNDED:
        stats.wall_time = time.perf_counter() - t0
        return Solution(status=UNBOUNDED, objective=-math.inf, stats=stats)
    if status != OPTIMAL:
        stats.wall_time = time.perf_counter() - t0
        return Solution(status=ITERATION_LIMIT, objective=math.inf, stats=stats)

    incumbent: dict[str, float] | None = None
    incumbent_obj = math.inf
    # open list of (lp bound, bounds); DFS pops from the end
    stack: list[tuple[float, list[tuple[float, float]], dict[str, float]]] = [
        (obj, root_bounds, values)
    ]
    best_bound = obj

    while stack:
        if stats.nodes >= node_limit:
            stats.wall_time = time.perf_counter() - t0
            stats.best_bound = min((nb for nb, _, _ in stack), default=incumbent_obj)
            if incumbent is not None:
                return Solution(ITERATION_LIMIT, incumbent_obj, incumbent, stats=stats)
            return Solution(ITERATION_LIMIT, math.inf, stats=stats)
        if stats.nodes % 1000 == 0 and len(stack) > 1:
            stack.sort(key=lambda item: -item[0])  # best bound next
        cutoff = (
            incumbent_obj - gap_tolerance * (1.0 + abs(incumbent_obj))
            if incumbent_obj < math.inf
            else math.inf
        )
        bound, bounds, node_values = stack.pop()
        if bound >= cutoff:
            continue
        violations = _fractional_violations(model, node_values, int_tolerance)
        if not violations:
            if bound < incumbent_obj:
                incumbent, incumbent_obj = node_values, bound
            continue
        j, kind, _ = max(violations, key=lambda v: v[2])
        v = model.variables[j]
        x = node_values[v.name]
        children: list[tuple[float, float]] = []
        if kind == SEMI_CONTINUOUS:
            lo = (bounds[j][0], 0.0)
            hi = (max(bounds[j][0], v.semi_lb), bounds[j][1])
            children = [hi, lo]
        else:
            children = [
                (math.ceil(x - int_tolerance), bounds[j][1]),  # up branch
                (bounds[j][0], math.floor(x + int_tolerance)),  # down branch
            ]
        for lb, ub in children:
            if lb > ub:
                continue
            child_bounds = list(bounds)
            child_bounds[j] = (lb, ub)
            cstatus, cobj, cvalues, _, cs = _solve_relaxation(model, child_bounds)
            stats.iterations += cs.iterations
            stats.nodes += 1
            cutoff = (
                incumbent_obj - gap_tolerance * (1.0 + abs(incumbent_obj))
                if incumbent_obj < math.inf
                else math.inf
            )
            if cstatus == OPTIMAL and cobj < cutoff:
                stack.append((cobj, child_bounds, cvalues))

    stats.wall_time = time.perf_counter() - t0
    stats.best_bound = incumbent_obj
    if incumbent is None:
        return Solution(INFEASIBLE, math.inf, stats=stats)
    return Solution(OPTIMAL, incumbent_obj, incumbent, stats=stats)


def solve(model: LinearModel, **kwargs) -> Solution:
    """Backend seam: dispatch to the LP or MIP engine by model marks."""
    if model.is_mixed_integer():
        return solve_mip(model, **kwargs)
    return solve_lp(model)
