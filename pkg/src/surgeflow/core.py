"""Domain types shared across the package, instance validation, and
distance-threshold adjacency construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class Location:
    id: str
    name: str
    latitude: float
    longitude: float


@dataclass(frozen=True)
class BedType:
    id: str
    description: str = ""


@dataclass(frozen=True)
class PatientGroup:
    """One stage of a care path, tied to a single bed type.

    ``successor`` points to the group a patient enters after leaving this
    one; the successor relation over all groups must form an in-forest.
    """

    id: str
    bed_type: str
    successor: str | None = None


@dataclass(frozen=True)
class AdjacencyGraph:
    n: int
    allowed: np.ndarray  # bool, shape (n, n)
    directed: bool = False

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.allowed[i, j]]


@dataclass(frozen=True)
class HealthSystem:
    locations: list[Location]
    bed_types: list[BedType]
    capacity: np.ndarray  # shape (B, N), beds available for surge patients
    adjacency: AdjacencyGraph
    nurse_supply: np.ndarray | None = None  # shape (N,)

    @property
    def n_locations(self) -> int:
        return len(self.locations)


@dataclass(frozen=True)
class ProblemInstance:
    """Input to all model builders.

    Arrays are indexed ``[group, location, day]`` with day 0 in the array
    meaning modeling day 1 (day 0 only appears in the initial census).
    """

    system: HealthSystem
    horizon: int
    groups: list[PatientGroup]
    admissions: np.ndarray  # (G, N, T)
    initial_census: np.ndarray  # (G, N)
    initial_discharges: np.ndarray  # (G, N, T)
    los: list  # per group, LosDistribution
    admission_dev_lower: np.ndarray | None = None  # (G, N, T)
    admission_dev_upper: np.ndarray | None = None  # (G, N, T)
    nurse_ratio: np.ndarray | None = None  # (B,) nurse-days per patient-day
    external_resource_supply: np.ndarray | None = None  # (N, T)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_locations(self) -> int:
        return self.system.n_locations

    def group_index(self, group_id: str) -> int:
        for k, g in enumerate(self.groups):
            if g.id == group_id:
                return k
        raise KeyError(group_id)

    def bed_type_index(self, bed_type_id: str) -> int:
        for k, b in enumerate(self.system.bed_types):
            if b.id == bed_type_id:
                return k
        raise KeyError(bed_type_id)

    def has_deviations(self) -> bool:
        return self.admission_dev_lower is not None and self.admission_dev_upper is not None


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str
    path: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: list[ValidationIssue] = field(default_factory=list)

    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]


def group_topological_order(groups: list[PatientGroup]) -> list[int]:
    """Indices of groups ordered so every group precedes its successor.

    Raises ValueError if the successor relation is not an in-forest
    (a cycle, a dangling successor id, or a duplicate group id).
    """
    ids = [g.id for g in groups]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate group ids")
    index = {g.id: k for k, g in enumerate(groups)}
    for g in groups:
        if g.successor is not None and g.successor not in index:
            raise ValueError(f"group {g.id!r} has unknown successor {g.successor!r}")

    order: list[int] = []
    state = [0] * len(groups)  # 0 unvisited, 1 in progress, 2 done

    def visit(k: int, chain: list[str]) -> None:
        if state[k] == 2:
            return
        if state[k] == 1:
            raise ValueError(f"group graph not an in-forest: cycle through {chain}")
        state[k] = 1
        succ = groups[k].successor
        if succ is not None:
            visit(index[succ], chain + [succ])
        state[k] = 2
        order.append(k)

    for k in range(len(groups)):
        visit(k, [groups[k].id])
    # visit appends roots first; reverse so predecessors come before successors
    return list(reversed(order))


def predecessors(groups: list[PatientGroup]) -> dict[int, list[int]]:
    """Map group index -> indices of groups whose successor it is."""
    index = {g.id: k for k, g in enumerate(groups)}
    preds: dict[int, list[int]] = {k: [] for k in range(len(groups))}
    for k, g in enumerate(groups):
        if g.successor is not None:
            preds[index[g.successor]].append(k)
    return preds


def validate_instance(instance: ProblemInstance) -> ValidationReport:
    """Check every ProblemInstance and HealthSystem invariant.

    Violations are reported, never raised.
    """
    issues: list[ValidationIssue] = []

    def err(message: str, path: str) -> None:
        issues.append(ValidationIssue("error", message, path))

    sys_ = instance.system
    n = sys_.n_locations
    ids = [loc.id for loc in sys_.locations]
    if len(set(ids)) != len(ids):
        err("location ids not unique", "system.locations")
    for k, loc in enumerate(sys_.locations):
        if not (-90.0 <= loc.latitude <= 90.0):
            err(f"latitude {loc.latitude} out of [-90, 90]", f"system.locations[{k}].latitude")
        if not (-180.0 <= loc.longitude <= 180.0):
            err(f"longitude {loc.longitude} out of [-180, 180]", f"system.locations[{k}].longitude")

    bt_ids = [b.id for b in sys_.bed_types]
    if len(set(bt_ids)) != len(bt_ids):
        err("bed type ids not unique", "system.bed_types")

    if sys_.capacity.shape != (len(sys_.bed_types), n):
        err(
            f"capacity shape {sys_.capacity.shape} != (bed_types, locations) = "
            f"({len(sys_.bed_types)}, {n})",
            "system.capacity",
        )
    elif np.any(sys_.capacity < 0):
        err("negative capacity", "system.capacity")

    adj = sys_.adjacency
    if adj.n != n or adj.allowed.shape != (n, n):
        err(f"adjacency dimension {adj.n} != location count {n}", "system.adjacency")
    else:
        if np.any(np.diag(adj.allowed)):
            err("adjacency diagonal must be false", "system.adjacency.allowed")
        if not adj.directed and not np.array_equal(adj.allowed, adj.allowed.T):
            err("undirected adjacency matrix not symmetric", "system.adjacency.allowed")

    if instance.horizon < 1:
        err(f"horizon {instance.horizon} < 1", "horizon")

    try:
        group_topological_order(instance.groups)
    except ValueError as e:
        err(str(e), "groups")
    for k, g in enumerate(instance.groups):
        if g.bed_type not in bt_ids:
            err(f"group {g.id!r} maps to unknown bed type {g.bed_type!r}", f"groups[{k}].bed_type")

    shape3 = (instance.n_groups, n, instance.horizon)
    for name, arr in [
        ("admissions", instance.admissions),
        ("initial_discharges", instance.initial_discharges),
    ]:
        if arr.shape != shape3:
            err(f"{name} shape {arr.shape} != {shape3}", name)
        elif np.any(arr < 0):
            err(f"negative entries in {name}", name)
    if instance.initial_census.shape != (instance.n_groups, n):
        err(f"initial_census shape {instance.initial_census.shape} != {(instance.n_groups, n)}", "initial_census")
    elif np.any(instance.initial_census < 0):
        err("negative initial census", "initial_census")

    if (
        instance.initial_discharges.shape == shape3
        and instance.initial_census.shape == (instance.n_groups, n)
    ):
        cum = instance.initial_discharges.cumsum(axis=2)
        over = cum[:, :, -1] > instance.initial_census + 1e-9
        for g, i in zip(*np.where(over)):
            err(
                f"cumulative initial discharges exceed initial census for group "
                f"{instance.groups[g].id!r} at location {ids[i] if i < len(ids) else i!r}",
                f"initial_discharges[{g},{i}]",
            )

    preds = predecessors(instance.groups) if len(set(g.id for g in instance.groups)) == len(instance.groups) else {}
    if instance.admissions.shape == shape3:
        for k, plist in preds.items():
            if plist and np.any(instance.admissions[k] > 0):
                err(
                    f"admissions must be zero for group {instance.groups[k].id!r} "
                    "(it has a predecessor in the care-path graph)",
                    f"admissions[{k}]",
                )

    if len(instance.los) != instance.n_groups:
        err(f"{len(instance.los)} LOS distributions for {instance.n_groups} groups", "los")

    if instance.has_deviations():
        for name, arr in [
            ("admission_dev_lower", instance.admission_dev_lower),
            ("admission_dev_upper", instance.admission_dev_upper),
        ]:
            if arr.shape != shape3:
                err(f"{name} shape {arr.shape} != {shape3}", name)
            elif np.any(arr < 0):
                err(f"negative entries in {name}", name)
        if (
            instance.admission_dev_lower.shape == shape3
            and instance.admissions.shape == shape3
            and np.any(instance.admission_dev_lower > instance.admissions + 1e-9)
        ):
            err("lower deviation exceeds nominal admissions", "admission_dev_lower")

    if instance.nurse_ratio is not None and np.any(instance.nurse_ratio < 0):
        err("negative nurse ratio", "nurse_ratio")
    if sys_.nurse_supply is not None and np.any(sys_.nurse_supply < 0):
        err("negative nurse supply", "system.nurse_supply")

    return ValidationReport(ok=not any(i.severity == "error" for i in issues), issues=issues)


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km between (lat, lon) points in degrees."""
    for lat, lon in (a, b):
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            raise ValueError(f"coordinates out of bounds: ({lat}, {lon})")
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def build_adjacency(locations: list[Location], max_distance_km: float) -> AdjacencyGraph:
    """Undirected graph with an edge wherever two locations are within
    ``max_distance_km`` of each other (self-edges excluded)."""
    if max_distance_km < 0:
        raise ValueError("max_distance_km must be non-negative")
    n = len(locations)
    allowed = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            d = haversine_km(
                (locations[i].latitude, locations[i].longitude),
                (locations[j].latitude, locations[j].longitude),
            )
            if d <= max_distance_km:
                allowed[i, j] = allowed[j, i] = True
    return AdjacencyGraph(n=n, allowed=allowed, directed=False)


def complete_adjacency(n: int) -> AdjacencyGraph:
    allowed = ~np.eye(n, dtype=bool)
    return AdjacencyGraph(n=n, allowed=allowed, directed=False)


def empty_adjacency(n: int) -> AdjacencyGraph:
    return AdjacencyGraph(n=n, allowed=np.zeros((n, n), dtype=bool), directed=False)
