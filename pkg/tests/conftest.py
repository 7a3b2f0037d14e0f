import numpy as np
import pytest

from surgeflow.core import (
    BedType,
    HealthSystem,
    Location,
    PatientGroup,
    ProblemInstance,
    complete_adjacency,
    validate_instance,
)
from surgeflow.los import from_pmf, point_mass


def make_locations(n):
    return [Location(f"h{i}", f"Hospital {i}", 40.0 + 0.2 * i, -74.0 + 0.15 * i) for i in range(n)]


def single_group_instance(n=2, T=3, seed=0, deviations=False, capacity=None, nurses=False):
    """Random single-group instance with integer data; always validates."""
    r = np.random.default_rng(seed)
    locs = make_locations(n)
    bts = [BedType("ward")]
    groups = [PatientGroup("all", "ward")]
    los = [from_pmf([0.0, 0.3, 0.3, 0.4])]
    cap = capacity if capacity is not None else r.integers(3, 8, size=(1, n)).astype(float)
    nurse_supply = r.integers(2, 8, size=n).astype(float) if nurses else None
    system = HealthSystem(locs, bts, cap, complete_adjacency(n), nurse_supply)
    adm = r.integers(0, 6, size=(1, n, T)).astype(float)
    p0 = r.integers(0, 5, size=(1, n)).astype(float)
    d = np.zeros((1, n, T))
    dl = du = None
    if deviations:
        dl = np.minimum(adm, r.integers(0, 2, size=adm.shape).astype(float))
        du = r.integers(0, 3, size=adm.shape).astype(float)
    ratio = np.array([0.5]) if nurses else None
    inst = ProblemInstance(
        system, T, groups, adm, p0, d, los,
        admission_dev_lower=dl, admission_dev_upper=du, nurse_ratio=ratio,
    )
    report = validate_instance(inst)
    assert report.ok, report.issues
    return inst


def care_path_instance(n=2, T=5, seed=0, icu_pmf=(0.0, 0.5, 0.5)):
    """Pre-ward(1d) -> ICU -> post-ward(2d) chain across n nodes."""
    r = np.random.default_rng(seed)
    locs = make_locations(n)
    bts = [BedType("ward"), BedType("icu")]
    groups = [
        PatientGroup("pre", "ward", successor="icu_stay"),
        PatientGroup("icu_stay", "icu", successor="post"),
        PatientGroup("post", "ward"),
    ]
    los = [point_mass(1), from_pmf(list(icu_pmf)), point_mass(2)]
    cap = r.integers(3, 8, size=(2, n)).astype(float)
    system = HealthSystem(locs, bts, cap, complete_adjacency(n))
    adm = np.zeros((3, n, T))
    adm[0] = r.integers(0, 5, size=(n, T)).astype(float)
    p0 = r.integers(0, 4, size=(3, n)).astype(float)
    d = np.zeros((3, n, T))
    inst = ProblemInstance(system, T, groups, adm, p0, d, los)
    report = validate_instance(inst)
    assert report.ok, report.issues
    return inst


@pytest.fixture
def small_instance():
    return single_group_instance(n=2, T=3, seed=1)
