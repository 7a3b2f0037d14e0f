import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surgeflow.core import (
    BedType,
    HealthSystem,
    Location,
    PatientGroup,
    ProblemInstance,
    build_adjacency,
    complete_adjacency,
    empty_adjacency,
    group_topological_order,
    haversine_km,
    predecessors,
    validate_instance,
)
from surgeflow.los import from_pmf

from .conftest import make_locations, single_group_instance

coord = st.tuples(
    st.floats(min_value=-90, max_value=90),
    st.floats(min_value=-180, max_value=180),
)


class TestHaversine:
    def test_identical_points(self):
        p = (40.7128, -74.0060)
        assert haversine_km(p, p) == 0.0

    def test_nyc_baltimore(self):
        d = haversine_km((40.7128, -74.0060), (39.2904, -76.6122))
        assert abs(d - 271.0) < 2.0

    def test_antipodal_maximum(self):
        d = haversine_km((0.0, 0.0), (0.0, 180.0))
        assert abs(d - math.pi * 6371.0) < 1.0

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            haversine_km((91.0, 0.0), (0.0, 0.0))
        with pytest.raises(ValueError):
            haversine_km((0.0, 0.0), (0.0, 181.0))

    @given(coord, coord)
    def test_symmetric(self, a, b):
        assert abs(haversine_km(a, b) - haversine_km(b, a)) <= 1e-9

    @settings(max_examples=200)
    @given(coord, coord, coord)
    def test_triangle_inequality(self, a, b, c):
        assert haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-9


class TestBuildAdjacency:
    def test_zero_threshold_no_edges(self):
        locs = make_locations(3)
        g = build_adjacency(locs, 0.0)
        assert not g.allowed.any()

    def test_huge_threshold_complete(self):
        locs = make_locations(4)
        g = build_adjacency(locs, 1e9)
        assert np.array_equal(g.allowed, complete_adjacency(4).allowed)

    def test_collinear_threshold(self):
        # points on the equator at 0, ~100, ~245 km (1 deg lon ~= 111.195 km)
        km_per_deg = 2 * math.pi * 6371.0 / 360.0
        locs = [
            Location("a", "a", 0.0, 0.0),
            Location("b", "b", 0.0, 100.0 / km_per_deg),
            Location("c", "c", 0.0, 245.0 / km_per_deg),
        ]
        g = build_adjacency(locs, 150.0)
        assert g.allowed[0, 1] and g.allowed[1, 2]
        assert not g.allowed[0, 2]

    def test_symmetric_false_diagonal(self):
        g = build_adjacency(make_locations(5), 40.0)
        assert np.array_equal(g.allowed, g.allowed.T)
        assert not np.diag(g.allowed).any()

    def test_negative_threshold(self):
        with pytest.raises(ValueError):
            build_adjacency(make_locations(2), -1.0)


class TestGroupGraph:
    def test_topological_order(self):
        groups = [
            PatientGroup("post", "ward"),
            PatientGroup("pre", "ward", successor="icu"),
            PatientGroup("icu", "icu", successor="post"),
        ]
        order = group_topological_order(groups)
        pos = {k: i for i, k in enumerate(order)}
        assert pos[1] < pos[2] < pos[0]  # pre before icu before post

    def test_cycle_rejected(self):
        groups = [
            PatientGroup("a", "ward", successor="b"),
            PatientGroup("b", "ward", successor="a"),
        ]
        with pytest.raises(ValueError, match="in-forest"):
            group_topological_order(groups)

    def test_unknown_successor(self):
        with pytest.raises(ValueError, match="unknown successor"):
            group_topological_order([PatientGroup("a", "ward", successor="zz")])

    def test_predecessors(self):
        groups = [
            PatientGroup("a", "ward", successor="c"),
            PatientGroup("b", "ward", successor="c"),
            PatientGroup("c", "icu"),
        ]
        assert predecessors(groups) == {0: [], 1: [], 2: [0, 1]}


class TestValidateInstance:
    def test_well_formed(self, small_instance):
        report = validate_instance(small_instance)
        assert report.ok and not report.issues

    def test_discharges_exceed_initial_census(self):
        inst = single_group_instance(n=2, T=3, seed=0)
        d = np.zeros_like(inst.initial_discharges)
        d[0, 1, :] = 100.0
        bad = dataclasses.replace(inst, initial_discharges=d)
        report = validate_instance(bad)
        assert not report.ok
        assert any("h1" in i.message for i in report.errors())

    def test_group_cycle_reported(self):
        inst = single_group_instance()
        groups = [
            PatientGroup("a", "ward", successor="b"),
            PatientGroup("b", "ward", successor="a"),
        ]
        adm = np.zeros((2, 2, 3))
        bad = ProblemInstance(
            inst.system, 3, groups, adm, np.zeros((2, 2)), np.zeros((2, 2, 3)),
            [from_pmf([0, 1.0]), from_pmf([0, 1.0])],
        )
        report = validate_instance(bad)
        assert any("in-forest" in i.message for i in report.errors())

    def test_admissions_for_successor_group_rejected(self):
        locs = make_locations(1)
        groups = [
            PatientGroup("pre", "ward", successor="main"),
            PatientGroup("main", "ward"),
        ]
        system = HealthSystem(
            locs, [BedType("ward")], np.array([[5.0]]), empty_adjacency(1)
        )
        adm = np.ones((2, 1, 2))  # nonzero for "main", which has a predecessor
        bad = ProblemInstance(
            system, 2, groups, adm, np.zeros((2, 1)), np.zeros((2, 1, 2)),
            [from_pmf([0, 1.0]), from_pmf([0, 1.0])],
        )
        report = validate_instance(bad)
        assert any("predecessor" in i.message for i in report.errors())

    def test_pure(self, small_instance):
        assert validate_instance(small_instance) == validate_instance(small_instance)

    def test_negative_capacity(self):
        inst = single_group_instance()
        sys_bad = HealthSystem(
            inst.system.locations, inst.system.bed_types,
            -np.ones_like(inst.system.capacity), inst.system.adjacency,
        )
        report = validate_instance(dataclasses.replace(inst, system=sys_bad))
        assert any("capacity" in i.path for i in report.errors())
