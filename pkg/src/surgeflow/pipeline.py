"""One entry point from scenario configuration to solved results, shared
by the CLI and the HTTP service so both produce identical artifacts."""

from __future__ import annotations

from dataclasses import dataclass

from .builder import (
    COMBINED,
    ObjectiveKind,
    build_base,
    build_combined,
    build_group,
    build_robust,
)
from .core import ProblemInstance
from .dataio import ScenarioConfig, load_dataset
from .evaluation import MetricsReport, TransferPlan, compute_metrics, plan_from_solution
from .linmodel import LinearModel
from .solver import OPTIMAL, Solution, solve


@dataclass(frozen=True)
class ScenarioResult:
    instance: ProblemInstance
    model: LinearModel
    solution: Solution
    plan: TransferPlan
    metrics: MetricsReport


def build_model(config: ScenarioConfig, instance: ProblemInstance) -> LinearModel:
    """Pick the formulation a scenario asks for."""
    if config.robust.enabled:
        if config.group_mode:
            raise ValueError("robust mode requires a single patient group")
        return build_robust(instance, config.objective, config.options, config.robust)
    if config.objective.kind == COMBINED or config.include_resources:
        weights = (config.objective.c_patient, config.objective.c_nurse)
        return build_combined(instance, weights, config.options)
    if config.group_mode:
        return build_group(instance, config.objective, config.options)
    return build_base(instance, config.objective, config.options)


def run_scenario(
    config: ScenarioConfig, instance: ProblemInstance | None = None
) -> ScenarioResult:
    """Load (unless given), build, solve, and evaluate a scenario."""
    if instance is None:
        instance = load_dataset(config)
    model = build_model(config, instance)
    if model.is_mixed_integer():
        solution = solve(model, gap_tolerance=config.gap_tolerance, node_limit=config.node_limit)
    else:
        solution = solve(model)
    if solution.status != OPTIMAL:
        raise RuntimeError(f"solve failed with status {solution.status}")
    plan = plan_from_solution(model, solution)
    metrics = compute_metrics(instance, plan)
    return ScenarioResult(instance, model, solution, plan, metrics)
