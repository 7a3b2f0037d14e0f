"""Re-evaluate a transfer plan outside the optimizer: exact census
recursion with transfers, overflow/load/transfer metrics, and the
no-transfer baseline every plan is compared against."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ProblemInstance, group_topological_order, predecessors
from .linmodel import LinearModel
from .solver import Solution

# overflow below half a patient-day is float dust, not a real breach
OVERFLOW_EPS = 0.5
TRANSFER_EPS = 1e-9


@dataclass(frozen=True)
class TransferPlan:
    """Patient transfers s[(g, i, j, t)] and optional resource transfers
    sigma[(i, j, t)], day t 1-based, all amounts non-negative."""

    transfers: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    resource_transfers: dict[tuple[int, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for v in self.transfers.values():
            if v < -TRANSFER_EPS:
                raise ValueError("negative patient transfer")
        for v in self.resource_transfers.values():
            if v < -TRANSFER_EPS:
                raise ValueError("negative resource transfer")

    def patient_array(self, instance: ProblemInstance) -> np.ndarray:
        """Dense (G, N, N, T) array; raises on out-of-range or
        off-adjacency entries."""
        G, n, T = instance.n_groups, instance.n_locations, instance.horizon
        allowed = instance.system.adjacency.allowed
        out = np.zeros((G, n, n, T))
        for (g, i, j, t), v in self.transfers.items():
            if not (0 <= g < G and 0 <= i < n and 0 <= j < n and 1 <= t <= T):
                raise ValueError(f"transfer key {(g, i, j, t)} out of range")
            if not allowed[i, j]:
                raise ValueError(f"transfer {i}->{j} not on an adjacency edge")
            out[g, i, j, t - 1] = v
        return out

    def resource_array(self, instance: ProblemInstance) -> np.ndarray:
        n, T = instance.n_locations, instance.horizon
        allowed = instance.system.adjacency.allowed
        out = np.zeros((n, n, T))
        for (i, j, t), v in self.resource_transfers.items():
            if not (0 <= i < n and 0 <= j < n and 1 <= t <= T):
                raise ValueError(f"resource transfer key {(i, j, t)} out of range")
            if not allowed[i, j]:
                raise ValueError(f"resource transfer {i}->{j} not on an adjacency edge")
            out[i, j, t - 1] = v
        return out


def empty_plan() -> TransferPlan:
    return TransferPlan()


def plan_from_solution(model: LinearModel, solution: Solution) -> TransferPlan:
    """Read the transfer variables back out of a solved model."""
    if "s_index" not in model.meta and "sigma_index" not in model.meta:
        raise ValueError("model carries no transfer variables")
    transfers = {}
    for key, idx in model.meta.get("s_index", {}).items():
        v = solution.values.get(model.variables[idx].name, 0.0)
        if v > TRANSFER_EPS:
            transfers[key] = v
    resources = {}
    for key, idx in model.meta.get("sigma_index", {}).items():
        v = solution.values.get(model.variables[idx].name, 0.0)
        if v > TRANSFER_EPS:
            resources[key] = v
    return TransferPlan(transfers=transfers, resource_transfers=resources)


def compute_census(instance: ProblemInstance, plan: TransferPlan) -> np.ndarray:
    """Active patients per (group, node, day) under the plan, shape
    (G, N, T).

    Transferred patients count at both ends on the transfer day and at
    the receiver only afterwards. With an empty plan this reduces to the
    no-transfer census recursion.
    """
    G, n, T = instance.n_groups, instance.n_locations, instance.horizon
    s = plan.patient_array(instance)
    topo = group_topological_order(instance.groups)
    preds = predecessors(instance.groups)

    chi = np.zeros((G, n, T + 1))
    gam = np.zeros((G, n, T + 1))
    alpha = np.zeros((G, n, T + 1))
    for t in range(1, T + 1):
        for g in topo:
            for i in range(n):
                inc = s[g, :, i, t - 1].sum()
                out = s[g, i, :, t - 1].sum()
                chi[g, i, t] = (
                    instance.admissions[g, i, t - 1]
                    + sum(gam[gp, i, t] for gp in preds[g])
                    + inc
                    - out
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

    census = alpha[:, :, 1:].copy()
    # day-of-transfer double count: senders still occupy a bed that day
    census += s.sum(axis=2)
    return census


def census_by_bed_type(instance: ProblemInstance, plan: TransferPlan) -> np.ndarray:
    """Aggregate compute_census by bed type, shape (B, N, T)."""
    B = len(instance.system.bed_types)
    per_group = compute_census(instance, plan)
    out = np.zeros((B, instance.n_locations, instance.horizon))
    for g in range(instance.n_groups):
        out[instance.bed_type_index(instance.groups[g].bed_type)] += per_group[g]
    return out


def system_wide_overflow(instance: ProblemInstance) -> float:
    """Overflow with all patients and capacity pooled into one node.

    This is a lower bound on the total overflow of any transfer plan.
    """
    census = census_by_bed_type(instance, empty_plan())
    total = census.sum(axis=(0, 1))  # per day
    cap = float(instance.system.capacity.sum())
    return float(np.maximum(0.0, total - cap).sum())


@dataclass(frozen=True)
class MetricsReport:
    total_overflow: float
    baseline_overflow: float
    overflow_reduction: float  # fraction of the baseline removed
    median_nonzero_overflow: float
    mean_nonzero_overflow: float
    max_nonzero_overflow: float
    median_load: float
    mean_load: float
    max_load: float
    percent_node_days_with_overflow: float  # 0..100
    total_transferred: float
    percent_of_patients_transferred: float  # fraction, 0..1
    median_nonzero_transfer: float
    mean_nonzero_transfer: float
    max_nonzero_transfer: float
    percent_node_days_with_transfer: float  # 0..100
    system_wide_overflow: float

    def to_dict(self) -> dict:
        return {
            "total_overflow": self.total_overflow,
            "baseline_overflow": self.baseline_overflow,
            "overflow_reduction": self.overflow_reduction,
            "median_nonzero_overflow": self.median_nonzero_overflow,
            "mean_nonzero_overflow": self.mean_nonzero_overflow,
            "max_nonzero_overflow": self.max_nonzero_overflow,
            "median_load": self.median_load,
            "mean_load": self.mean_load,
            "max_load": self.max_load,
            "percent_node_days_with_overflow": self.percent_node_days_with_overflow,
            "total_transferred": self.total_transferred,
            "percent_of_patients_transferred": self.percent_of_patients_transferred,
            "median_nonzero_transfer": self.median_nonzero_transfer,
            "mean_nonzero_transfer": self.mean_nonzero_transfer,
            "max_nonzero_transfer": self.max_nonzero_transfer,
            "percent_node_days_with_transfer": self.percent_node_days_with_transfer,
            "system_wide_overflow": self.system_wide_overflow,
        }


def _overflow_cells(instance: ProblemInstance, census_bt: np.ndarray) -> np.ndarray:
    cap = instance.system.capacity[:, :, None]
    return np.maximum(0.0, census_bt - cap)


def _load_cells(instance: ProblemInstance, census_bt: np.ndarray) -> np.ndarray:
    """Loads per (bed type, node, day) in group mode, per (node, day)
    aggregated across bed types otherwise; zero-capacity cells are
    excluded."""
    if instance.n_groups == 1:
        census = census_bt.sum(axis=0)
        cap = instance.system.capacity.sum(axis=0)[:, None]
    else:
        census = census_bt
        cap = instance.system.capacity[:, :, None]
    cap = np.broadcast_to(cap, census.shape)
    mask = cap > 0
    return (census[mask] / cap[mask]).ravel()


def overflow_reduction(baseline: float, total: float) -> float:
    """Fraction of the no-transfer overflow removed by a plan."""
    return (baseline - total) / baseline if baseline > 0 else 0.0


def compute_metrics(instance: ProblemInstance, plan: TransferPlan) -> MetricsReport:
    """Every report metric for the plan, against the empty-plan baseline."""
    census_bt = census_by_bed_type(instance, plan)
    baseline_bt = census_by_bed_type(instance, empty_plan())

    overflow = _overflow_cells(instance, census_bt)
    baseline_overflow_cells = _overflow_cells(instance, baseline_bt)
    total_overflow = float(overflow.sum())
    baseline_overflow = float(baseline_overflow_cells.sum())
    reduction = overflow_reduction(baseline_overflow, total_overflow)

    # node-day overflow pools bed types at a node
    node_day_overflow = overflow.sum(axis=0)
    hot = node_day_overflow[node_day_overflow > OVERFLOW_EPS]
    n_node_days = node_day_overflow.size

    loads = _load_cells(instance, census_bt)

    s = plan.patient_array(instance)
    amounts = s[s > TRANSFER_EPS]
    total_transferred = float(s.sum())
    moved = s.sum(axis=(0, 2)) + s.sum(axis=(0, 1))  # sent + received per (node, day)
    denom = float(instance.admissions.sum() + instance.initial_census.sum())
    percent_transferred = total_transferred / denom if denom > 0 else 0.0

    def stat(f, values):
        return float(f(values)) if values.size else 0.0

    return MetricsReport(
        total_overflow=total_overflow,
        baseline_overflow=baseline_overflow,
        overflow_reduction=float(reduction),
        median_nonzero_overflow=stat(np.median, hot),
        mean_nonzero_overflow=stat(np.mean, hot),
        max_nonzero_overflow=stat(np.max, hot),
        median_load=stat(np.median, loads),
        mean_load=stat(np.mean, loads),
        max_load=stat(np.max, loads),
        percent_node_days_with_overflow=100.0 * hot.size / n_node_days,
        total_transferred=total_transferred,
        percent_of_patients_transferred=float(percent_transferred),
        median_nonzero_transfer=stat(np.median, amounts),
        mean_nonzero_transfer=stat(np.mean, amounts),
        max_nonzero_transfer=stat(np.max, amounts),
        percent_node_days_with_transfer=100.0
        * float((moved > TRANSFER_EPS).sum())
        / moved.size,
        system_wide_overflow=system_wide_overflow(instance),
    )
