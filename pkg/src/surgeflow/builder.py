"""Translate a ProblemInstance plus objective/option selections into a
canonical LinearModel: base and care-path-group demand redistribution,
operational constraints and penalties, resource redistribution, the
combined weighted model, and the budget-of-uncertainty robust variant."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ProblemInstance, group_topological_order, haversine_km, predecessors
from .linmodel import BINARY, EQ, INTEGER, LE, LinearModel, LinExpr
from .los import LosDistribution, remaining_fractions

MIN_OVERFLOW = "min-overflow"
LOAD_BALANCE = "load-balance"
COMBINED = "combined"


@dataclass(frozen=True)
class ObjectiveKind:
    kind: str = MIN_OVERFLOW
    c_patient: float = 1.0
    c_nurse: float = 1.0

    def __post_init__(self):
        if self.kind not in (MIN_OVERFLOW, LOAD_BALANCE, COMBINED):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.c_patient < 0 or self.c_nurse < 0:
            raise ValueError("objective weights must be non-negative")
        if self.kind == COMBINED and self.c_patient == 0 and self.c_nurse == 0:
            raise ValueError("combined objective needs at least one non-zero weight")


@dataclass(frozen=True)
class OperationalOptions:
    integer_transfers: bool = False
    forbid_new_overflow: bool = False
    sent_penalty: float = 0.0
    total_transfer_cap: float | None = None
    per_transfer_cap: float | None = None
    smoothing_penalty: float = 0.0
    setup_cost: float = 0.0
    switch_window: int | None = None
    distance_penalty: float = 0.0
    distance_matrix: np.ndarray | None = None
    min_transfer: float | None = None
    capacity_buffer: float = 0.0
    balance_threshold: float | None = None
    balance_weight: float = 0.0
    nurse_guards: bool = False

    def __post_init__(self):
        for name in (
            "sent_penalty",
            "smoothing_penalty",
            "setup_cost",
            "distance_penalty",
            "balance_weight",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.total_transfer_cap is not None and self.total_transfer_cap < 0:
            raise ValueError("total_transfer_cap must be non-negative")
        if self.per_transfer_cap is not None and self.per_transfer_cap < 0:
            raise ValueError("per_transfer_cap must be non-negative")
        if not (0.0 <= self.capacity_buffer < 1.0):
            raise ValueError("capacity_buffer must be in [0, 1)")
        if (
            self.min_transfer is not None
            and self.per_transfer_cap is not None
            and self.min_transfer > self.per_transfer_cap
        ):
            raise ValueError("min_transfer must not exceed per_transfer_cap")


def operational_preset() -> OperationalOptions:
    """Small transfer and smoothing penalties, no new overflow, 5% buffer."""
    return OperationalOptions(
        sent_penalty=0.01,
        smoothing_penalty=0.01,
        forbid_new_overflow=True,
        capacity_buffer=0.05,
    )


@dataclass(frozen=True)
class RobustConfig:
    gamma: float = 0.0
    enabled: bool = False

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")


@dataclass(frozen=True)
class SolveRequest:
    instance: ProblemInstance
    objective: ObjectiveKind = field(default_factory=ObjectiveKind)
    options: OperationalOptions = field(default_factory=OperationalOptions)
    robust: RobustConfig = field(default_factory=RobustConfig)
    include_resources: bool = False

    def __post_init__(self):
        if self.include_resources and (
            self.instance.system.nurse_supply is None or self.instance.nurse_ratio is None
        ):
            raise ValueError("include_resources requires nurse_supply and nurse_ratio")


# ---------------------------------------------------------------------------
# shared pieces


def _edges(instance: ProblemInstance) -> list[tuple[int, int]]:
    return instance.system.adjacency.edges()


def _in_out_exprs(s_index, n, horizon, edges, groups):
    """Per (group, node, day) incoming/outgoing transfer expressions."""
    out = {(g, i, t): LinExpr() for g in groups for i in range(n) for t in range(1, horizon + 1)}
    inc = {(g, i, t): LinExpr() for g in groups for i in range(n) for t in range(1, horizon + 1)}
    for g in groups:
        for (i, j) in edges:
            for t in range(1, horizon + 1):
                idx = s_index[(g, i, j, t)]
                out[(g, i, t)].add_term(idx, 1.0)
                inc[(g, j, t)].add_term(idx, 1.0)
    return inc, out


def _transfer_scale(instance: ProblemInstance) -> float:
    """Upper bound on any transfer sum; base for big-M / small-m linking."""
    return float(instance.admissions.sum() + instance.initial_census.sum() + 1.0)


def _base_census_constants(
    instance: ProblemInstance, admissions: np.ndarray
) -> np.ndarray:
    """No-variable part of the active-census expression, shape (N, T).

    ``admissions`` lets the robust builder substitute per-(i, t) worst
    cases without touching anything else.
    """
    n, T = instance.n_locations, instance.horizon
    los = instance.los[0]
    surv = remaining_fractions(los, T - 1)
    p0 = instance.initial_census[0]
    d = instance.initial_discharges[0]
    const = np.empty((n, T))
    for i in range(n):
        conv = np.convolve(admissions[i], surv)[:T]
        const[i] = p0[i] - np.cumsum(d[i]) + conv
    return const


def _require_single_group(instance: ProblemInstance, what: str) -> None:
    if instance.n_groups != 1:
        raise ValueError(f"{what} expects a single (pre-aggregated) patient group")


def _build_base_like(
    instance: ProblemInstance,
    objective: ObjectiveKind,
    options: OperationalOptions | None,
    census_const: np.ndarray,
    sent_rhs: np.ndarray,
    name: str,
) -> LinearModel:
    """Common structure of the nominal and robust base models."""
    n, T = instance.n_locations, instance.horizon
    b = instance.system.capacity.sum(axis=0)  # aggregate beds per node
    los = instance.los[0]
    surv = remaining_fractions(los, T - 1)
    edges = _edges(instance)

    model = LinearModel(name=name)
    s_index: dict[tuple, int] = {}
    for (i, j) in edges:
        for t in range(1, T + 1):
            s_index[(0, i, j, t)] = model.add_variable(f"s[{i},{j},{t}]")
    inc, out = _in_out_exprs(s_index, n, T, edges, groups=[0])

    census: dict[tuple, LinExpr] = {}
    for i in range(n):
        for t in range(1, T + 1):
            expr = LinExpr(float(census_const[i, t - 1]))
            expr.add(out[(0, i, t)])  # transferred patients active at both ends on day t
            for tp in range(1, t + 1):
                w = float(surv[t - tp])
                if w == 0.0:
                    continue
                expr.add(inc[(0, i, tp)], w)
                expr.add(out[(0, i, tp)], -w)
            census[(0, i, t)] = expr

    sent_rows = {}
    for i in range(n):
        for t in range(1, T + 1):
            sent_rows[(0, i, t)] = model.add_expr_constraint(
                out[(0, i, t)], LE, float(sent_rhs[i, t - 1]), name=f"sent[{i},{t}]"
            )

    meta = {
        "kind": "base",
        "instance": instance,
        "s_index": s_index,
        "edges": edges,
        "census": census,
        "out": out,
        "inc": inc,
        "capacity": {(0, i): float(b[i]) for i in range(n)},  # bed-type key, node
        "sent_rows": sent_rows,
        "overflow_rows": {},
        "omega_index": {},
        "objective": objective,
    }
    model.meta = meta

    if objective.kind == MIN_OVERFLOW:
        for i in range(n):
            for t in range(1, T + 1):
                w = model.add_variable(f"omega[{i},{t}]")
                meta["omega_index"][(0, i, t)] = w
                expr = census[(0, i, t)].copy().add_term(w, -1.0)
                row = model.add_expr_constraint(expr, LE, float(b[i]), name=f"overflow[{i},{t}]")
                meta["overflow_rows"][(0, i, t)] = (row, float(b[i]))
                model.add_objective_term(w, 1.0)
    elif objective.kind == LOAD_BALANCE:
        if np.any(b <= 0):
            raise ValueError("load balancing requires positive capacity at every node")
        for t in range(1, T + 1):
            mean_load = LinExpr()
            for j in range(n):
                mean_load.add(census[(0, j, t)], 1.0 / (n * float(b[j])))
            for i in range(n):
                lam = model.add_variable(f"lambda[{i},{t}]")
                dev = census[(0, i, t)].copy()
                dev_scaled = LinExpr()
                dev_scaled.add(dev, 1.0 / float(b[i]))
                dev_scaled.add(mean_load, -1.0)
                model.add_expr_constraint(
                    dev_scaled.copy().add_term(lam, -1.0), LE, 0.0, name=f"lb+[{i},{t}]"
                )
                neg = LinExpr()
                neg.add(dev_scaled, -1.0)
                model.add_expr_constraint(
                    neg.add_term(lam, -1.0), LE, 0.0, name=f"lb-[{i},{t}]"
                )
                model.add_objective_term(lam, 1.0)
    else:
        raise ValueError("base model supports min-overflow or load-balance objectives")

    if options is not None:
        apply_operational_options(model, instance, options)
    return model


def build_base(
    instance: ProblemInstance,
    objective: ObjectiveKind = ObjectiveKind(),
    options: OperationalOptions | None = None,
) -> LinearModel:
    """Base demand redistribution model over a single patient group."""
    _require_single_group(instance, "build_base")
    census_const = _base_census_constants(instance, instance.admissions[0])
    sent_rhs = instance.admissions[0].copy()
    return _build_base_like(instance, objective, options, census_const, sent_rhs, "base")


# ---------------------------------------------------------------------------
# group (care-path) model


def build_group(
    instance: ProblemInstance,
    objective: ObjectiveKind = ObjectiveKind(),
    options: OperationalOptions | None = None,
) -> LinearModel:
    """Care-path group model: per-group transfers, per-bed-type overflow,
    and the entering/leaving/active recursion unrolled over the in-forest."""
    n, T, G = instance.n_locations, instance.horizon, instance.n_groups
    topo = group_topological_order(instance.groups)  # raises on cycles
    preds = predecessors(instance.groups)
    edges = _edges(instance)
    bed_types = instance.system.bed_types
    B = len(bed_types)
    group_bed = [instance.bed_type_index(g.bed_type) for g in instance.groups]

    model = LinearModel(name="group")
    s_index: dict[tuple, int] = {}
    for g in range(G):
        for (i, j) in edges:
            for t in range(1, T + 1):
                s_index[(g, i, j, t)] = model.add_variable(f"s[{g},{i},{j},{t}]")
    inc, out = _in_out_exprs(s_index, n, T, edges, groups=list(range(G)))

    pmfs = [instance.los[g].pmf for g in range(G)]

    chi: dict[tuple, LinExpr] = {}
    gam: dict[tuple, LinExpr] = {}
    alpha: dict[tuple, LinExpr] = {}
    for i in range(n):
        running = {g: LinExpr(float(instance.initial_census[g, i])) for g in range(G)}
        for t in range(1, T + 1):
            for g in topo:
                e = LinExpr(float(instance.admissions[g, i, t - 1]))
                for gp in preds[g]:
                    e.add(gam[(gp, i, t)])
                e.add(inc[(g, i, t)])
                e.add(out[(g, i, t)], -1.0)
                chi[(g, i, t)] = e

                pmf = pmfs[g]
                ge = LinExpr(float(instance.initial_discharges[g, i, t - 1]))
                for tp in range(1, t + 1):
                    lag = t - tp
                    w = float(pmf[lag]) if lag < len(pmf) else 0.0
                    if w != 0.0:
                        ge.add(chi[(g, i, tp)], w)
                gam[(g, i, t)] = ge

                running[g] = running[g].copy().add(chi[(g, i, t)]).add(gam[(g, i, t)], -1.0)
                alpha[(g, i, t)] = running[g]

    sent_rows = {}
    for g in range(G):
        for i in range(n):
            for t in range(1, T + 1):
                sent_rows[(g, i, t)] = model.add_expr_constraint(
                    out[(g, i, t)],
                    LE,
                    float(instance.admissions[g, i, t - 1]),
                    name=f"sent[{g},{i},{t}]",
                )

    census: dict[tuple, LinExpr] = {}
    for beta in range(B):
        members = [g for g in range(G) if group_bed[g] == beta]
        for i in range(n):
            for t in range(1, T + 1):
                e = LinExpr()
                for g in members:
                    e.add(alpha[(g, i, t)])
                    e.add(out[(g, i, t)])
                census[(beta, i, t)] = e

    meta = {
        "kind": "group",
        "instance": instance,
        "s_index": s_index,
        "edges": edges,
        "census": census,
        "out": out,
        "inc": inc,
        "alpha": alpha,
        "chi": chi,
        "gamma": gam,
        "capacity": {
            (beta, i): float(instance.system.capacity[beta, i])
            for beta in range(B)
            for i in range(n)
        },
        "sent_rows": sent_rows,
        "overflow_rows": {},
        "omega_index": {},
        "objective": objective,
    }
    model.meta = meta

    if objective.kind == MIN_OVERFLOW:
        for beta in range(B):
            for i in range(n):
                for t in range(1, T + 1):
                    w = model.add_variable(f"omega[{beta},{i},{t}]")
                    meta["omega_index"][(beta, i, t)] = w
                    bcap = float(instance.system.capacity[beta, i])
                    expr = census[(beta, i, t)].copy().add_term(w, -1.0)
                    row = model.add_expr_constraint(
                        expr, LE, bcap, name=f"overflow[{beta},{i},{t}]"
                    )
                    meta["overflow_rows"][(beta, i, t)] = (row, bcap)
                    model.add_objective_term(w, 1.0)
    elif objective.kind == LOAD_BALANCE:
        cap = instance.system.capacity
        if np.any(cap <= 0):
            raise ValueError("load balancing requires positive capacity everywhere")
        for beta in range(B):
            for t in range(1, T + 1):
                mean_load = LinExpr()
                for j in range(n):
                    mean_load.add(census[(beta, j, t)], 1.0 / (n * float(cap[beta, j])))
                for i in range(n):
                    lam = model.add_variable(f"lambda[{beta},{i},{t}]")
                    dev = LinExpr()
                    dev.add(census[(beta, i, t)], 1.0 / float(cap[beta, i]))
                    dev.add(mean_load, -1.0)
                    model.add_expr_constraint(
                        dev.copy().add_term(lam, -1.0), LE, 0.0, name=f"lb+[{beta},{i},{t}]"
                    )
                    neg = LinExpr()
                    neg.add(dev, -1.0)
                    model.add_expr_constraint(
                        neg.add_term(lam, -1.0), LE, 0.0, name=f"lb-[{beta},{i},{t}]"
                    )
                    model.add_objective_term(lam, 1.0)
    else:
        raise ValueError("group model supports min-overflow or load-balance objectives")

    if options is not None:
        apply_operational_options(model, instance, options)
    return model


# ---------------------------------------------------------------------------
# no-transfer census (used by forbid_new_overflow and evaluation baselines)


def no_transfer_census_by_group(instance: ProblemInstance) -> np.ndarray:
    """Active patients per (group, node, day) with zero transfers."""
    n, T, G = instance.n_locations, instance.horizon, instance.n_groups
    topo = group_topological_order(instance.groups)
    preds = predecessors(instance.groups)

    chi = np.zeros((G, n, T + 1))
    gam = np.zeros((G, n, T + 1))
    alpha = np.zeros((G, n, T + 1))
    for i in range(n):
        for t in range(1, T + 1):
            for g in topo:
                chi[g, i, t] = instance.admissions[g, i, t - 1] + sum(
                    gam[gp, i, t] for gp in preds[g]
                )
                pmf = instance.los[g].pmf
                acc = instance.initial_discharges[g, i, t - 1]
                for tp in range(1, t + 1):
                    lag = t - tp
                    if lag < len(pmf):
                        acc += pmf[lag] * chi[g, i, tp]
                gam[g, i, t] = acc
                prev = alpha[g, i, t - 1] if t > 1 else instance.initial_census[g, i]
                alpha[g, i, t] = prev + chi[g, i, t] - gam[g, i, t]
    return alpha[:, :, 1:]


def no_transfer_census(instance: ProblemInstance) -> np.ndarray:
    """Active patients per (bed type, node, day) with zero transfers."""
    n, T = instance.n_locations, instance.horizon
    B = len(instance.system.bed_types)
    alpha = no_transfer_census_by_group(instance)
    out = np.zeros((B, n, T))
    for g in range(instance.n_groups):
        out[instance.bed_type_index(instance.groups[g].bed_type)] += alpha[g]
    return out


# ---------------------------------------------------------------------------
# operational options


def apply_operational_options(
    model: LinearModel, instance: ProblemInstance, options: OperationalOptions
) -> LinearModel:
    """Extend a base/group model in place with the enabled operational
    constraints and penalties."""
    meta = model.meta
    if "census" not in meta:
        raise ValueError("model was not produced by build_base or build_group")
    if options.total_transfer_cap is not None and options.total_transfer_cap < 0:
        raise ValueError("total_transfer_cap must be non-negative")

    instance = meta["instance"]
    n, T = instance.n_locations, instance.horizon
    edges = meta["edges"]
    s_index = meta["s_index"]
    groups = sorted({k[0] for k in s_index})
    scale = _transfer_scale(instance)
    m_small = 1.0 / scale
    m_big = scale

    if options.capacity_buffer > 0.0:
        for key, (row, bcap) in meta["overflow_rows"].items():
            model.constraints[row].rhs -= options.capacity_buffer * bcap
            meta["overflow_rows"][key] = (row, bcap * (1.0 - options.capacity_buffer))

    if options.integer_transfers:
        for idx in s_index.values():
            model.variables[idx].kind = INTEGER

    if options.per_transfer_cap is not None:
        for idx in s_index.values():
            model.variables[idx].ub = min(model.variables[idx].ub, options.per_transfer_cap)

    if options.total_transfer_cap is not None:
        coefs = {idx: 1.0 for idx in s_index.values()}
        model.add_constraint(coefs, LE, float(options.total_transfer_cap), name="total_cap")

    if options.forbid_new_overflow:
        baseline = no_transfer_census(instance)
        for (beta, i, t), expr in meta["census"].items():
            _, bcap = meta["overflow_rows"].get((beta, i, t), (None, None))
            if bcap is None:
                bcap = meta["capacity"][(beta, i)]
            bound = max(bcap, float(baseline[beta, i, t - 1]))
            model.add_expr_constraint(expr.copy(), LE, bound, name=f"nonew[{beta},{i},{t}]")

    if options.sent_penalty > 0.0:
        for idx in s_index.values():
            model.add_objective_term(idx, options.sent_penalty)

    if options.smoothing_penalty > 0.0:
        for (i, j) in edges:
            for t in range(2, T + 1):
                delta = model.add_variable(f"delta[{i},{j},{t}]")
                diff = LinExpr()
                for g in groups:
                    diff.add_term(s_index[(g, i, j, t)], 1.0)
                    diff.add_term(s_index[(g, i, j, t - 1)], -1.0)
                model.add_expr_constraint(
                    diff.copy().add_term(delta, -1.0), LE, 0.0, name=f"sm+[{i},{j},{t}]"
                )
                neg = LinExpr()
                neg.add(diff, -1.0)
                model.add_expr_constraint(
                    neg.add_term(delta, -1.0), LE, 0.0, name=f"sm-[{i},{j},{t}]"
                )
                model.add_objective_term(delta, options.smoothing_penalty)

    if options.setup_cost > 0.0:
        pairs = sorted({(min(i, j), max(i, j)) for (i, j) in edges})
        for (i, j) in pairs:
            rho = model.add_variable(f"rho[{i},{j}]", lb=0.0, ub=1.0, kind=BINARY)
            both = LinExpr()
            for g in groups:
                for t in range(1, T + 1):
                    if (g, i, j, t) in s_index:
                        both.add_term(s_index[(g, i, j, t)], 1.0)
                    if (g, j, i, t) in s_index:
                        both.add_term(s_index[(g, j, i, t)], 1.0)
            # rho = 1 whenever the pair transfers at all
            up = LinExpr()
            up.add(both, m_small)
            model.add_expr_constraint(up.add_term(rho, -1.0), LE, 0.0, name=f"setup_lo[{i},{j}]")
            down = LinExpr(0.0, {rho: 1.0})
            down.add(both, -m_big)
            model.add_expr_constraint(down, LE, 0.0, name=f"setup_hi[{i},{j}]")
            model.add_objective_term(rho, options.setup_cost)

    if options.switch_window is not None:
        tsw = int(options.switch_window)
        sent_day = {}
        recv_day = {}
        for i in range(n):
            for t in range(1, T + 1):
                se = LinExpr()
                re = LinExpr()
                for g in groups:
                    for j in range(n):
                        if (g, i, j, t) in s_index:
                            se.add_term(s_index[(g, i, j, t)], 1.0)
                        if (g, j, i, t) in s_index:
                            re.add_term(s_index[(g, j, i, t)], 1.0)
                sent_day[(i, t)] = se
                recv_day[(i, t)] = re
        for i in range(n):
            for t in range(1, T + 1):
                nu1 = model.add_variable(f"nu[1,{i},{t}]", 0.0, 1.0, kind=BINARY)
                nu2 = model.add_variable(f"nu[2,{i},{t}]", 0.0, 1.0, kind=BINARY)
                for nu, activity in ((nu1, sent_day[(i, t)]), (nu2, recv_day[(i, t)])):
                    lo = LinExpr()
                    lo.add(activity, m_small)
                    model.add_expr_constraint(lo.add_term(nu, -1.0), LE, 0.0)
                    hi = LinExpr(0.0, {nu: 1.0})
                    hi.add(activity, -m_big)
                    model.add_expr_constraint(hi, LE, 0.0)
                window = range(t, min(t + tsw, T) + 1)
                excl1 = LinExpr(0.0, {nu1: 1.0})
                excl2 = LinExpr(0.0, {nu2: 1.0})
                for tp in window:
                    excl1.add(recv_day[(i, tp)], m_small)
                    excl2.add(sent_day[(i, tp)], m_small)
                model.add_expr_constraint(excl1, LE, 1.0, name=f"switch_s[{i},{t}]")
                model.add_expr_constraint(excl2, LE, 1.0, name=f"switch_r[{i},{t}]")

    if options.distance_penalty > 0.0:
        dmat = options.distance_matrix
        if dmat is None:
            locs = instance.system.locations
            dmat = np.zeros((n, n))
            for i in range(n):
                for j in range(n):
                    if i != j:
                        dmat[i, j] = haversine_km(
                            (locs[i].latitude, locs[i].longitude),
                            (locs[j].latitude, locs[j].longitude),
                        )
        for (g, i, j, t), idx in s_index.items():
            model.add_objective_term(idx, options.distance_penalty * float(dmat[i, j]))

    if options.min_transfer is not None:
        s_max = options.per_transfer_cap if options.per_transfer_cap is not None else math.inf
        if len(groups) == 1:
            for idx in s_index.values():
                model.mark_semi_continuous(idx, options.min_transfer, s_max)
        else:
            # semi-continuity applies to the per-(i, j, t) group total
            for (i, j) in edges:
                for t in range(1, T + 1):
                    w = model.add_variable(f"w[{i},{j},{t}]")
                    coefs = {s_index[(g, i, j, t)]: 1.0 for g in groups}
                    coefs[w] = -1.0
                    model.add_constraint(coefs, EQ, 0.0, name=f"wdef[{i},{j},{t}]")
                    model.mark_semi_continuous(w, options.min_transfer, s_max)

    if options.balance_threshold is not None and options.balance_weight > 0.0:
        for (beta, i, t), expr in meta["census"].items():
            bcap = meta["capacity"][(beta, i)]
            if bcap <= 0:
                raise ValueError("threshold-load penalty requires positive capacity")
            phi = model.add_variable(f"phi[{beta},{i},{t}]")
            load = LinExpr()
            load.add(expr, 1.0 / bcap)
            model.add_expr_constraint(
                load.add_term(phi, -1.0), LE, float(options.balance_threshold),
                name=f"thresh[{beta},{i},{t}]",
            )
            model.add_objective_term(phi, options.balance_weight)

    meta["options"] = options
    return model


# ---------------------------------------------------------------------------
# resource redistribution


def _resource_structure(
    model: LinearModel,
    instance: ProblemInstance,
    demand: dict[tuple[int, int], LinExpr],
    options: OperationalOptions,
) -> dict:
    """Add resource transfer variables, supply balance, and shortage
    constraints; demand q may be constant or depend on patient transfers."""
    n, T = instance.n_locations, instance.horizon
    edges = _edges(instance)
    supply0 = instance.system.nurse_supply
    ext = instance.external_resource_supply

    sigma_index: dict[tuple, int] = {}
    for (i, j) in edges:
        for t in range(1, T + 1):
            sigma_index[(i, j, t)] = model.add_variable(f"sigma[{i},{j},{t}]")
    theta_index: dict[tuple, int] = {}

    eta: dict[tuple, LinExpr] = {}
    for i in range(n):
        for t in range(1, T + 1):
            e = LinExpr(float(supply0[i]))
            if ext is not None:
                e.const += float(ext[i, : t].sum())
            for (a, bnode) in edges:
                for tp in range(1, t + 1):
                    if bnode == i:
                        e.add_term(sigma_index[(a, bnode, tp)], 1.0)
                    if a == i:
                        e.add_term(sigma_index[(a, bnode, tp)], -1.0)
            eta[(i, t)] = e

    for i in range(n):
        for t in range(1, T + 1):
            sent = LinExpr()
            for j in range(n):
                if (i, j, t) in sigma_index:
                    sent.add_term(sigma_index[(i, j, t)], 1.0)
            sent.add(eta[(i, t)], -1.0)
            model.add_expr_constraint(sent, LE, 0.0, name=f"rsent[{i},{t}]")

            theta = model.add_variable(f"theta[{i},{t}]")
            theta_index[(i, t)] = theta
            short = demand[(i, t)].copy()
            short.add(eta[(i, t)], -1.0)
            short.add_term(theta, -1.0)
            model.add_expr_constraint(short, LE, 0.0, name=f"shortage[{i},{t}]")

    if options.nurse_guards:
        ratio_max = float(np.max(instance.nurse_ratio)) if instance.nurse_ratio is not None else 1.0
        q_bound = ratio_max * float(instance.admissions.sum() + instance.initial_census.sum())
        supply_bound = float(supply0.sum() + (ext.sum() if ext is not None else 0.0))
        big = q_bound + supply_bound + 1.0
        msm = 1.0 / big
        for i in range(n):
            for t in range(1, T + 1):
                kappa = model.add_variable(f"kappa[{i},{t}]", 0.0, 1.0, kind=BINARY)
                gap = demand[(i, t)].copy()
                gap.add(eta[(i, t)], -1.0)  # q - eta
                lo = LinExpr()
                lo.add(gap, msm)
                model.add_expr_constraint(lo.add_term(kappa, -1.0), LE, 0.0)
                hi = LinExpr(0.0, {kappa: 1.0})
                hi.add(gap, -msm)
                model.add_expr_constraint(hi, LE, 1.0)
                # a node short on staff keeps at least its initial supply:
                # eta >= n_i - big * (1 - kappa)
                keep = LinExpr(0.0, {kappa: big})
                keep.add(eta[(i, t)], -1.0)
                model.add_expr_constraint(
                    keep, LE, big - float(supply0[i]), name=f"keep[{i},{t}]"
                )
    return {"sigma_index": sigma_index, "theta_index": theta_index, "eta": eta}


def build_resource(
    instance: ProblemInstance, options: OperationalOptions = OperationalOptions()
) -> LinearModel:
    """Resource-only redistribution: demand follows the no-transfer
    patient census, supply follows the transfer balance."""
    if instance.system.nurse_supply is None or instance.nurse_ratio is None:
        raise ValueError("resource model requires nurse_supply and nurse_ratio")
    n, T = instance.n_locations, instance.horizon
    baseline = no_transfer_census_by_group(instance)
    demand = {}
    for i in range(n):
        for t in range(1, T + 1):
            q = 0.0
            for g in range(instance.n_groups):
                beta = instance.bed_type_index(instance.groups[g].bed_type)
                q += float(instance.nurse_ratio[beta]) * float(baseline[g, i, t - 1])
            demand[(i, t)] = LinExpr(q)

    model = LinearModel(name="resource")
    model.meta = {"kind": "resource", "instance": instance}
    parts = _resource_structure(model, instance, demand, options)
    model.meta.update(parts)
    for idx in parts["theta_index"].values():
        model.add_objective_term(idx, 1.0)
    return model


def build_combined(
    instance: ProblemInstance,
    objective_weights: tuple[float, float] = (1.0, 1.0),
    options: OperationalOptions = OperationalOptions(),
) -> LinearModel:
    """Joint patient + resource model; resource demand tracks the
    transfer-dependent patient census; objective is the weighted sum."""
    c_patient, c_nurse = objective_weights
    if c_patient < 0 or c_nurse < 0 or (c_patient == 0 and c_nurse == 0):
        raise ValueError("weights must be non-negative and not both zero")
    if instance.system.nurse_supply is None or instance.nurse_ratio is None:
        raise ValueError("combined model requires nurse_supply and nurse_ratio")

    model = build_group(instance, ObjectiveKind(MIN_OVERFLOW), options)
    # reweight the patient overflow objective
    if c_patient != 1.0:
        for key, idx in model.meta["omega_index"].items():
            model.objective[idx] = model.objective.get(idx, 0.0) * c_patient

    n, T = instance.n_locations, instance.horizon
    alpha = model.meta["alpha"]
    demand = {}
    for i in range(n):
        for t in range(1, T + 1):
            q = LinExpr()
            for g in range(instance.n_groups):
                beta = instance.bed_type_index(instance.groups[g].bed_type)
                q.add(alpha[(g, i, t)], float(instance.nurse_ratio[beta]))
            demand[(i, t)] = q
    parts = _resource_structure(model, instance, demand, options)
    model.meta.update(parts)
    model.meta["kind"] = "combined"
    for idx in parts["theta_index"].values():
        model.add_objective_term(idx, c_nurse)
    return model


# ---------------------------------------------------------------------------
# robust model


def worst_case_admissions(
    instance: ProblemInstance, i: int, t: int, los: LosDistribution, gamma: float
) -> np.ndarray:
    """Admissions p(1..t) at node i maximizing the active census at day t
    under the deviation budget: the min(gamma, t) days with the largest
    still-active upward deviation move to their upper bound."""
    if not instance.has_deviations():
        raise ValueError("instance has no admission deviation bounds")
    nominal = instance.admissions[0, i, :t].astype(float).copy()
    if gamma <= 0:
        return nominal
    up = instance.admission_dev_upper[0, i, :t].astype(float)
    surv = remaining_fractions(los, t - 1)
    weights = surv[::-1][:t] * up  # (1 - L(t - t')) * dev_up, t' = 1..t
    # ties break toward smaller t'
    order = sorted(range(t), key=lambda d: (-weights[d], d))
    budget = min(gamma, float(t))
    k = int(math.floor(budget))
    out = nominal
    for d in order[:k]:
        out[d] += up[d]
    frac = budget - k
    if frac > 0.0 and k < t:
        out[order[k]] += frac * up[order[k]]
    return out


def build_robust(
    instance: ProblemInstance,
    objective: ObjectiveKind = ObjectiveKind(),
    options: OperationalOptions | None = None,
    robust: RobustConfig = RobustConfig(enabled=True),
) -> LinearModel:
    """Per-constraint worst-case reformulation of the base model: sent
    caps use the lower admission bound, overflow constants use the
    budget-limited worst-case census. Same variables and constraints as
    the nominal build."""
    _require_single_group(instance, "build_robust")
    if not instance.has_deviations():
        raise ValueError("robust model requires admission deviation bounds")
    if robust.gamma > instance.horizon:
        raise ValueError("gamma must not exceed the horizon")
    n, T = instance.n_locations, instance.horizon
    los = instance.los[0]

    sent_rhs = instance.admissions[0] - instance.admission_dev_lower[0]
    worst_const = np.empty((n, T))
    surv = remaining_fractions(los, T - 1)
    p0 = instance.initial_census[0]
    d = instance.initial_discharges[0]
    for i in range(n):
        for t in range(1, T + 1):
            wc = worst_case_admissions(instance, i, t, los, robust.gamma)
            active = float(np.dot(surv[:t][::-1], wc))
            worst_const[i, t - 1] = p0[i] - d[i, :t].sum() + active
    return _build_base_like(instance, objective, options, worst_const, sent_rhs, "robust")
