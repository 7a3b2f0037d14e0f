"""Command-line front end: estimate admissions, solve scenarios, evaluate
plans, export LP files, and launch the HTTP service.

Exit codes: 0 success, 1 validation/data error, 2 solver failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .builder import ObjectiveKind, OperationalOptions, RobustConfig, operational_preset
from .census import CensusSeries, correct_outliers, estimate_admissions
from .dataio import (
    DataError,
    ScenarioConfig,
    load_dataset,
    load_scenario,
    load_transfers,
    metrics_json,
    save_results,
)
from .evaluation import compute_metrics
from .pipeline import build_model, run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_USAGE = 64

log = logging.getLogger("surgeflow")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _setup_logging() -> None:
    level = {
        "error": logging.ERROR,
        "warn": logging.WARNING,
        "info": logging.INFO,
        "debug": logging.DEBUG,
    }.get(os.environ.get("SURGEFLOW_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> _Parser:
    parser = _Parser(prog="surgeflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--objective", choices=["min-overflow", "load-balance", "combined"])
        p.add_argument("--preset", choices=["base", "operational"])
        p.add_argument("--gamma", type=float, help="deviation budget; enables the robust model")
        p.add_argument("--integer", action="store_true", help="whole-patient transfers")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--seed", type=int, help="estimation random seed")

    scenario_args(sub.add_parser("solve", help="build, solve, and write the result bundle"))
    scenario_args(sub.add_parser("export-lp", help="write the model as an LP text file"))

    p_est = sub.add_parser("estimate", help="reconstruct admissions from census series")
    p_est.add_argument("--scenario", required=True)
    p_est.add_argument("--out", default="results")
    p_est.add_argument("--seed", type=int)

    p_eval = sub.add_parser("evaluate", help="metrics for an existing transfer plan")
    p_eval.add_argument("--scenario", required=True)
    p_eval.add_argument("--plan", required=True, help="transfers.csv path")
    p_eval.add_argument("--out", default="results")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--scenario", help="dataset to register at startup")
    p_serve.add_argument("--port", type=int, default=None)
    return parser


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    """Command-line flags win over scenario-file settings."""
    changes = {}
    if getattr(args, "objective", None):
        changes["objective"] = dataclasses.replace(config.objective, kind=args.objective)
    if getattr(args, "preset", None) == "operational":
        changes["options"] = operational_preset()
    elif getattr(args, "preset", None) == "base":
        changes["options"] = OperationalOptions()
    if getattr(args, "gamma", None) is not None:
        changes["robust"] = RobustConfig(gamma=args.gamma, enabled=True)
    if getattr(args, "integer", False):
        base = changes.get("options", config.options)
        changes["options"] = dataclasses.replace(base, integer_transfers=True)
    if getattr(args, "seed", None) is not None:
        changes["estimation_seed"] = args.seed
    return dataclasses.replace(config, **changes) if changes else config


METRIC_ROWS = [
    ("Total Overflow (patient-days)", "total_overflow"),
    ("Overflow Without Transfers", "baseline_overflow"),
    ("Overflow Reduction", "overflow_reduction"),
    ("Median Nonzero Overflow", "median_nonzero_overflow"),
    ("Mean Nonzero Overflow", "mean_nonzero_overflow"),
    ("Max Nonzero Overflow", "max_nonzero_overflow"),
    ("Median Load", "median_load"),
    ("Mean Load", "mean_load"),
    ("Max Load", "max_load"),
    ("Percent Node-Days With Overflow", "percent_node_days_with_overflow"),
    ("Total Patients Transferred", "total_transferred"),
    ("Percent of Patients Transferred", "percent_of_patients_transferred"),
    ("Median Nonzero Transfer", "median_nonzero_transfer"),
    ("Mean Nonzero Transfer", "mean_nonzero_transfer"),
    ("Max Nonzero Transfer", "max_nonzero_transfer"),
    ("Percent Node-Days With a Transfer", "percent_node_days_with_transfer"),
    ("System-Wide Overflow (lower bound)", "system_wide_overflow"),
]


def _print_metrics(metrics) -> None:
    doc = metrics.to_dict()
    width = max(len(label) for label, _ in METRIC_ROWS)
    for label, key in METRIC_ROWS:
        print(f"{label:<{width}}  {doc[key]:.4f}")


def _cmd_solve(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    result = run_scenario(config)
    save_results(
        result.instance, result.solution, result.metrics, result.plan,
        args.out, config.start_date,
    )
    _print_metrics(result.metrics)
    log.info("result bundle written to %s", args.out)
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    instance = load_dataset(config)
    model = build_model(config, instance)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "model.lp"
    path.write_text(model.to_lp_string())
    print(path)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config = dataclasses.replace(config, estimation_seed=args.seed)
    census_path = Path(config.data_dir) / "census.csv"
    if not census_path.exists():
        raise DataError(f"{census_path}: estimation requires census.csv")
    df = pd.read_csv(census_path)
    for col in ("location_id", "date", "group", "active"):
        if col not in df.columns:
            raise DataError(f"{census_path}: missing required column {col!r} (line 1)")
    import datetime as dt

    T = config.horizon
    group_los = {g.id: g.los_distribution() for g in config.groups}
    rows = []
    for (lid, gid), sub in df.groupby(["location_id", "group"]):
        if str(gid) not in group_los:
            raise DataError(f"{census_path}: unknown group {gid!r}")
        series = np.zeros(T)
        seen = False
        for _, r in sub.iterrows():
            day = (dt.date.fromisoformat(str(r["date"])) - config.start_date).days
            if 0 <= day < T:
                series[day] = float(r["active"])
                seen = True
        if not seen:
            continue
        cs = CensusSeries(location=str(lid), values=series)
        if config.outlier_correction:
            cs = correct_outliers(cs)
        est = estimate_admissions(
            cs, group_los[str(gid)],
            iterations=config.estimation_iterations, seed=config.estimation_seed,
        )
        for t in range(T):
            date = (config.start_date + dt.timedelta(days=t)).isoformat()
            rows.append((str(lid), date, str(gid), est.admissions[t]))
        log.info("estimated %s/%s residual %.3f", lid, gid, est.residual)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "estimated_admissions.csv"
    pd.DataFrame(rows, columns=["location_id", "date", "group", "admissions"]).to_csv(
        path, index=False
    )
    print(path)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    config = load_scenario(args.scenario)
    instance = load_dataset(config)
    plan = load_transfers(args.plan, instance, config.start_date)
    metrics = compute_metrics(instance, plan)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(metrics_json(metrics))
    _print_metrics(metrics)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    port = args.port or int(os.environ.get("SURGEFLOW_PORT", "8000"))
    app = create_app(scenario_path=args.scenario)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return EXIT_OK


def run_cli(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    handlers = {
        "solve": _cmd_solve,
        "export-lp": _cmd_export_lp,
        "estimate": _cmd_estimate,
        "evaluate": _cmd_evaluate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (DataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
