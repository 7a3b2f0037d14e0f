"""CSV dataset ingestion, scenario configuration, and result bundles.

Schemas (UTF-8, header row required, ISO-8601 dates):
  locations.csv   id,name,lat,lon
  capacity.csv    location_id,bed_type,beds[,covid_fraction]
  admissions.csv  location_id,date,group,admissions[,dev_lower,dev_upper]
  census.csv      location_id,date,group,active
  nurses.csv      location_id,nurses
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import los as los_mod
from .builder import ObjectiveKind, OperationalOptions, RobustConfig
from .census import CensusSeries, correct_outliers, estimate_admissions
from .core import (
    BedType,
    HealthSystem,
    Location,
    PatientGroup,
    ProblemInstance,
    build_adjacency,
    complete_adjacency,
    validate_instance,
)
from .evaluation import MetricsReport, TransferPlan, census_by_bed_type, empty_plan
from .solver import Solution

SCHEMA_VERSION = 1

# surge share of licensed beds when capacity.csv lacks covid_fraction
DEFAULT_COVID_FRACTION = {"ward": 0.35, "icu": 0.50}
FALLBACK_COVID_FRACTION = 0.35


class DataError(ValueError):
    """Raised for malformed input files; message names file and location."""


@dataclass(frozen=True)
class GroupSpec:
    id: str
    bed_type: str
    successor: str | None = None
    los: dict = field(default_factory=lambda: {"family": "weibull", "scale": 12.88, "shape": 1.38})

    def los_distribution(self) -> los_mod.LosDistribution:
        fam = self.los.get("family", "weibull")
        if fam == "weibull":
            return los_mod.discretize_weibull(
                float(self.los["scale"]),
                float(self.los["shape"]),
                int(self.los.get("horizon", los_mod.DEFAULT_LOS_HORIZON)),
            )
        if fam == "point":
            return los_mod.point_mass(int(self.los["days"]))
        raise DataError(f"unknown LOS family {fam!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    data_dir: str
    start_date: dt.date
    end_date: dt.date
    objective: ObjectiveKind = field(default_factory=ObjectiveKind)
    options: OperationalOptions = field(default_factory=OperationalOptions)
    robust: RobustConfig = field(default_factory=RobustConfig)
    deviation_fraction: float | None = None  # symmetric box as fraction of nominal
    group_mode: bool = False
    groups: list[GroupSpec] = field(
        default_factory=lambda: [GroupSpec(id="all", bed_type="ward")]
    )
    adjacency_max_km: float | None = None  # None -> complete graph
    nurse_ratios: dict[str, float] = field(default_factory=dict)  # bed type -> nurses/patient
    estimation_iterations: int = 20000
    estimation_seed: int = 0
    outlier_correction: bool = True
    gap_tolerance: float = 1e-6
    node_limit: int = 100000
    include_resources: bool = False

    def __post_init__(self):
        if self.start_date > self.end_date:
            raise DataError("start_date must not be after end_date")
        if self.deviation_fraction is not None and self.deviation_fraction < 0:
            raise DataError("deviation_fraction must be non-negative")

    @property
    def horizon(self) -> int:
        return (self.end_date - self.start_date).days + 1


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: scenario file not found")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    return scenario_from_dict(raw, base_dir=path.parent, source=str(path))


def scenario_from_dict(raw: dict, base_dir: str | Path, source: str = "scenario") -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed JSON document; relative
    data_dir entries resolve against ``base_dir``."""

    def date(key):
        try:
            return dt.date.fromisoformat(raw[key])
        except KeyError:
            raise DataError(f"{source}: missing required field {key!r}")
        except (TypeError, ValueError):
            raise DataError(f"{source}: {key} must be an ISO-8601 date")

    data_dir = raw.get("data_dir", ".")
    if not Path(data_dir).is_absolute():
        data_dir = str((Path(base_dir) / data_dir).resolve())

    obj_raw = raw.get("objective", {})
    if isinstance(obj_raw, str):
        obj_raw = {"kind": obj_raw}
    options_raw = dict(raw.get("options", {}))
    if "distance_matrix" in options_raw:
        options_raw["distance_matrix"] = np.asarray(options_raw["distance_matrix"], dtype=float)
    robust_raw = raw.get("robust", {})
    groups = [
        GroupSpec(
            id=g["id"],
            bed_type=g["bed_type"],
            successor=g.get("successor"),
            los=g.get("los", {"family": "weibull", "scale": 12.88, "shape": 1.38}),
        )
        for g in raw.get("groups", [{"id": "all", "bed_type": "ward"}])
    ]
    try:
        return ScenarioConfig(
            data_dir=data_dir,
            start_date=date("start_date"),
            end_date=date("end_date"),
            objective=ObjectiveKind(**obj_raw),
            options=OperationalOptions(**options_raw),
            robust=RobustConfig(**robust_raw),
            deviation_fraction=raw.get("deviation_fraction"),
            group_mode=bool(raw.get("group_mode", False)),
            groups=groups,
            adjacency_max_km=raw.get("adjacency_max_km"),
            nurse_ratios=dict(raw.get("nurse_ratios", {})),
            estimation_iterations=int(raw.get("estimation_iterations", 20000)),
            estimation_seed=int(raw.get("estimation_seed", 0)),
            outlier_correction=bool(raw.get("outlier_correction", True)),
            gap_tolerance=float(raw.get("gap_tolerance", 1e-6)),
            node_limit=int(raw.get("node_limit", 100000)),
            include_resources=bool(raw.get("include_resources", False)),
        )
    except TypeError as e:
        raise DataError(f"{source}: {e}") from e
    except ValueError as e:
        raise DataError(f"{source}: {e}") from e


def _read_csv(path: Path, required: list[str]) -> pd.DataFrame:
    if not path.exists():
        raise DataError(f"{path}: file not found")
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except Exception as e:
        raise DataError(f"{path}: {e}") from e
    for col in required:
        if col not in df.columns:
            raise DataError(f"{path}: missing required column {col!r} (line 1)")
    return df


def _date_index(df: pd.DataFrame, path: Path, config: ScenarioConfig) -> pd.Series:
    try:
        dates = pd.to_datetime(df["date"], format="%Y-%m-%d").dt.date
    except Exception as e:
        raise DataError(f"{path}: bad date value ({e})") from e
    return dates.map(lambda d: (d - config.start_date).days)


def load_dataset(config: ScenarioConfig) -> ProblemInstance:
    """Assemble a validated ProblemInstance from the CSV files in
    ``config.data_dir``.

    When admissions.csv is absent but census.csv is present, admissions
    and initial-patient discharges are reconstructed per location/group
    from the census series.
    """
    d = Path(config.data_dir)
    T = config.horizon

    loc_df = _read_csv(d / "locations.csv", ["id", "name", "lat", "lon"])
    locations = []
    for row_no, row in enumerate(loc_df.itertuples(index=False), start=2):
        try:
            locations.append(Location(str(row.id), str(row.name), float(row.lat), float(row.lon)))
        except (TypeError, ValueError) as e:
            raise DataError(f"{d / 'locations.csv'}: line {row_no}: {e}") from e
    loc_index = {loc.id: k for k, loc in enumerate(locations)}
    n = len(locations)

    group_specs = config.groups
    groups = [PatientGroup(g.id, g.bed_type, g.successor) for g in group_specs]
    group_index = {g.id: k for k, g in enumerate(groups)}
    bed_type_ids = sorted({g.bed_type for g in groups})
    bed_types = [BedType(b) for b in bed_type_ids]
    bt_index = {b: k for k, b in enumerate(bed_type_ids)}

    cap_df = _read_csv(d / "capacity.csv", ["location_id", "bed_type", "beds"])
    capacity = np.zeros((len(bed_types), n))
    for row_no, row in enumerate(cap_df.itertuples(index=False), start=2):
        lid, bt = str(row.location_id), str(row.bed_type)
        if lid not in loc_index:
            raise DataError(f"{d / 'capacity.csv'}: line {row_no}: unknown location {lid!r}")
        if bt not in bt_index:
            continue  # capacity for a bed type no group uses
        beds = float(row.beds)
        if beds < 0:
            raise DataError(f"{d / 'capacity.csv'}: line {row_no}: negative beds")
        frac = getattr(row, "covid_fraction", None)
        if frac is None or (isinstance(frac, float) and math.isnan(frac)):
            frac = DEFAULT_COVID_FRACTION.get(bt, FALLBACK_COVID_FRACTION)
        capacity[bt_index[bt], loc_index[lid]] = beds * float(frac)

    nurse_supply = None
    nurses_path = d / "nurses.csv"
    if nurses_path.exists():
        nurse_df = _read_csv(nurses_path, ["location_id", "nurses"])
        nurse_supply = np.zeros(n)
        for row_no, row in enumerate(nurse_df.itertuples(index=False), start=2):
            lid = str(row.location_id)
            if lid not in loc_index:
                raise DataError(f"{nurses_path}: line {row_no}: unknown location {lid!r}")
            nurse_supply[loc_index[lid]] = float(row.nurses)

    if config.adjacency_max_km is None:
        adjacency = complete_adjacency(n)
    else:
        adjacency = build_adjacency(locations, config.adjacency_max_km)

    system = HealthSystem(locations, bed_types, capacity, adjacency, nurse_supply)

    G = len(groups)
    admissions = np.zeros((G, n, T))
    initial_census = np.zeros((G, n))
    initial_discharges = np.zeros((G, n, T))
    dev_lower = dev_upper = None

    adm_path = d / "admissions.csv"
    census_path = d / "census.csv"
    if adm_path.exists():
        adm_df = _read_csv(adm_path, ["location_id", "date", "group", "admissions"])
        days = _date_index(adm_df, adm_path, config)
        has_dev = "dev_lower" in adm_df.columns and "dev_upper" in adm_df.columns
        if has_dev:
            dev_lower = np.zeros((G, n, T))
            dev_upper = np.zeros((G, n, T))
        for row_no, (row, day) in enumerate(
            zip(adm_df.itertuples(index=False), days), start=2
        ):
            if not (0 <= day < T):
                continue
            lid, gid = str(row.location_id), str(row.group)
            if lid not in loc_index:
                raise DataError(f"{adm_path}: line {row_no}: unknown location {lid!r}")
            if gid not in group_index:
                raise DataError(f"{adm_path}: line {row_no}: unknown group {gid!r}")
            g, i = group_index[gid], loc_index[lid]
            admissions[g, i, day] = float(row.admissions)
            if has_dev:
                dev_lower[g, i, day] = float(row.dev_lower)
                dev_upper[g, i, day] = float(row.dev_upper)
        if census_path.exists():
            cen_df = _read_csv(census_path, ["location_id", "date", "group", "active"])
            days = _date_index(cen_df, census_path, config)
            for row, day in zip(cen_df.itertuples(index=False), days):
                if day == -1:  # day before the window: initial census
                    g = group_index.get(str(row.group))
                    i = loc_index.get(str(row.location_id))
                    if g is not None and i is not None:
                        initial_census[g, i] = float(row.active)
    elif census_path.exists():
        cen_df = _read_csv(census_path, ["location_id", "date", "group", "active"])
        days = _date_index(cen_df, census_path, config)
        los_by_group = [spec.los_distribution() for spec in group_specs]
        for gid, g in group_index.items():
            for lid, i in loc_index.items():
                sel = (cen_df["location_id"].astype(str) == lid) & (
                    cen_df["group"].astype(str) == gid
                )
                sub = cen_df[sel]
                if sub.empty:
                    continue
                sub_days = days[sel]
                series = np.zeros(T)
                for v, day in zip(sub["active"], sub_days):
                    if 0 <= day < T:
                        series[day] = float(v)
                cs = CensusSeries(location=lid, values=series)
                if config.outlier_correction:
                    cs = correct_outliers(cs)
                est = estimate_admissions(
                    cs,
                    los_by_group[g],
                    iterations=config.estimation_iterations,
                    seed=config.estimation_seed,
                )
                admissions[g, i] = est.admissions
                initial_census[g, i] = est.initial_census
                initial_discharges[g, i] = est.initial_discharges
    else:
        raise DataError(f"{adm_path}: neither admissions.csv nor census.csv found")

    if dev_lower is None and config.deviation_fraction is not None:
        dev_lower = config.deviation_fraction * admissions
        dev_upper = config.deviation_fraction * admissions

    nurse_ratio = None
    if config.nurse_ratios:
        nurse_ratio = np.array(
            [float(config.nurse_ratios.get(b, 0.0)) for b in bed_type_ids]
        )

    instance = ProblemInstance(
        system=system,
        horizon=T,
        groups=groups,
        admissions=admissions,
        initial_census=initial_census,
        initial_discharges=initial_discharges,
        los=[spec.los_distribution() for spec in group_specs],
        admission_dev_lower=dev_lower,
        admission_dev_upper=dev_upper,
        nurse_ratio=nurse_ratio,
    )
    report = validate_instance(instance)
    if not report.ok:
        msgs = "; ".join(f"{i.path}: {i.message}" for i in report.errors())
        raise DataError(f"invalid dataset in {d}: {msgs}")
    return instance


def save_dataset(instance: ProblemInstance, config: ScenarioConfig, out_dir: str | Path) -> None:
    """Write the instance back out in the dataset CSV schemas."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    locs = instance.system.locations
    pd.DataFrame(
        [(l.id, l.name, l.latitude, l.longitude) for l in locs],
        columns=["id", "name", "lat", "lon"],
    ).to_csv(out / "locations.csv", index=False)

    cap_rows = []
    for bk, bt in enumerate(instance.system.bed_types):
        for i, loc in enumerate(locs):
            cap_rows.append((loc.id, bt.id, instance.system.capacity[bk, i], 1.0))
    pd.DataFrame(
        cap_rows, columns=["location_id", "bed_type", "beds", "covid_fraction"]
    ).to_csv(out / "capacity.csv", index=False)

    adm_rows = []
    has_dev = instance.has_deviations()
    for g, grp in enumerate(instance.groups):
        for i, loc in enumerate(locs):
            for t in range(instance.horizon):
                date = (config.start_date + dt.timedelta(days=t)).isoformat()
                row = [loc.id, date, grp.id, instance.admissions[g, i, t]]
                if has_dev:
                    row += [
                        instance.admission_dev_lower[g, i, t],
                        instance.admission_dev_upper[g, i, t],
                    ]
                adm_rows.append(row)
    cols = ["location_id", "date", "group", "admissions"]
    if has_dev:
        cols += ["dev_lower", "dev_upper"]
    pd.DataFrame(adm_rows, columns=cols).to_csv(out / "admissions.csv", index=False)

    if instance.system.nurse_supply is not None:
        pd.DataFrame(
            [(loc.id, instance.system.nurse_supply[i]) for i, loc in enumerate(locs)],
            columns=["location_id", "nurses"],
        ).to_csv(out / "nurses.csv", index=False)

    cen_rows = []
    day0 = (config.start_date - dt.timedelta(days=1)).isoformat()
    for g, grp in enumerate(instance.groups):
        for i, loc in enumerate(locs):
            if instance.initial_census[g, i] != 0.0:
                cen_rows.append([loc.id, day0, grp.id, instance.initial_census[g, i]])
    pd.DataFrame(cen_rows, columns=["location_id", "date", "group", "active"]).to_csv(
        out / "census.csv", index=False
    )


# ---------------------------------------------------------------------------
# result bundles


def _transfer_frame(instance: ProblemInstance, plan: TransferPlan, start_date: dt.date):
    rows = []
    for (g, i, j, t), v in sorted(plan.transfers.items()):
        date = (start_date + dt.timedelta(days=t - 1)).isoformat()
        rows.append(
            (
                instance.groups[g].id,
                instance.system.locations[i].id,
                instance.system.locations[j].id,
                date,
                repr(float(v)),  # shortest round-trip decimal, parses back exactly
            )
        )
    return pd.DataFrame(rows, columns=["group", "from", "to", "date", "amount"])


def save_results(
    instance: ProblemInstance,
    solution: Solution,
    metrics: MetricsReport,
    plan: TransferPlan,
    out_dir: str | Path,
    start_date: dt.date | None = None,
) -> dict[str, Path]:
    """Write transfers.csv, census.csv, metrics.json, solution.json.

    Output is deterministic for deterministic solves: stable row and key
    order, fixed float formatting via the default JSON encoder.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"{out}: cannot create output directory ({e})") from e
    start = start_date or dt.date(2020, 1, 1)
    files = {}

    tf = _transfer_frame(instance, plan, start)
    files["transfers"] = out / "transfers.csv"
    tf.to_csv(files["transfers"], index=False)

    census = census_by_bed_type(instance, plan)
    baseline = census_by_bed_type(instance, empty_plan())
    rows = []
    for bk, bt in enumerate(instance.system.bed_types):
        for i, loc in enumerate(instance.system.locations):
            for t in range(instance.horizon):
                rows.append(
                    (
                        loc.id,
                        bt.id,
                        (start + dt.timedelta(days=t)).isoformat(),
                        census[bk, i, t],
                        baseline[bk, i, t],
                        instance.system.capacity[bk, i],
                    )
                )
    files["census"] = out / "census.csv"
    pd.DataFrame(
        rows,
        columns=["location_id", "bed_type", "date", "active", "active_no_transfers", "capacity"],
    ).to_csv(files["census"], index=False)

    files["metrics"] = out / "metrics.json"
    files["metrics"].write_text(metrics_json(metrics))

    files["solution"] = out / "solution.json"
    sol_doc = {
        "schema_version": SCHEMA_VERSION,
        "status": solution.status,
        "objective": solution.objective,
        "values": {k: v for k, v in sorted(solution.values.items()) if abs(v) > 1e-12},
        "stats": {
            "iterations": solution.stats.iterations,
            "nodes": solution.stats.nodes,
            "best_bound": solution.stats.best_bound,
        },
    }
    files["solution"].write_text(json.dumps(sol_doc, indent=2, sort_keys=True) + "\n")
    return files


def metrics_json(metrics: MetricsReport) -> str:
    """The single serialization used by CLI and service so both emit
    byte-identical metrics documents."""
    doc = {"schema_version": SCHEMA_VERSION, **metrics.to_dict()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_transfers(
    path: str | Path, instance: ProblemInstance, start_date: dt.date
) -> TransferPlan:
    """Read transfers.csv back into a TransferPlan (round-trips
    save_results exactly)."""
    path = Path(path)
    df = _read_csv(path, ["group", "from", "to", "date", "amount"])
    loc_index = {loc.id: k for k, loc in enumerate(instance.system.locations)}
    group_index = {g.id: k for k, g in enumerate(instance.groups)}
    transfers = {}
    rows = df[["group", "from", "to", "date", "amount"]].itertuples(index=False, name=None)
    for row_no, (gid, src, dst, date, amount) in enumerate(rows, start=2):
        gid, src, dst = str(gid), str(src), str(dst)
        if gid not in group_index:
            raise DataError(f"{path}: line {row_no}: unknown group {gid!r}")
        if src not in loc_index or dst not in loc_index:
            raise DataError(f"{path}: line {row_no}: unknown location")
        day = (dt.date.fromisoformat(str(date)) - start_date).days + 1
        if not (1 <= day <= instance.horizon):
            raise DataError(f"{path}: line {row_no}: date outside the scenario window")
        transfers[(group_index[gid], loc_index[src], loc_index[dst], day)] = float(amount)
    return TransferPlan(transfers=transfers)
