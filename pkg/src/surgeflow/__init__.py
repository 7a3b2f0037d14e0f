"""Multi-period demand and resource redistribution for capacitated
facility networks under surge load."""

from .builder import (
    ObjectiveKind,
    OperationalOptions,
    RobustConfig,
    SolveRequest,
    build_base,
    build_combined,
    build_group,
    build_resource,
    build_robust,
    operational_preset,
)
from .core import (
    AdjacencyGraph,
    BedType,
    HealthSystem,
    Location,
    PatientGroup,
    ProblemInstance,
    build_adjacency,
    complete_adjacency,
    haversine_km,
    validate_instance,
)
from .dataio import ScenarioConfig, load_dataset, load_scenario, save_results
from .evaluation import (
    MetricsReport,
    TransferPlan,
    compute_census,
    compute_metrics,
    plan_from_solution,
    system_wide_overflow,
)
from .los import LosDistribution, discretize_weibull, point_mass
from .pipeline import run_scenario
from .solver import Solution, solve, solve_lp, solve_mip

__version__ = "0.1.0"

__all__ = [
    "AdjacencyGraph",
    "BedType",
    "HealthSystem",
    "Location",
    "LosDistribution",
    "MetricsReport",
    "ObjectiveKind",
    "OperationalOptions",
    "PatientGroup",
    "ProblemInstance",
    "RobustConfig",
    "ScenarioConfig",
    "Solution",
    "SolveRequest",
    "TransferPlan",
    "build_adjacency",
    "build_base",
    "build_combined",
    "build_group",
    "build_resource",
    "build_robust",
    "complete_adjacency",
    "compute_census",
    "compute_metrics",
    "discretize_weibull",
    "haversine_km",
    "load_dataset",
    "load_scenario",
    "operational_preset",
    "plan_from_solution",
    "point_mass",
    "run_scenario",
    "save_results",
    "solve",
    "solve_lp",
    "solve_mip",
    "system_wide_overflow",
    "validate_instance",
]
