import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surgeflow.census import (
    CensusSeries,
    correct_outliers,
    estimate_admissions,
    simulate_census,
)
from surgeflow.los import discretize_weibull, from_pmf, point_mass


class TestCorrectOutliers:
    def test_constant_unchanged(self):
        s = CensusSeries("a", np.array([50.0] * 5))
        assert np.array_equal(correct_outliers(s).values, s.values)

    def test_spike_removed(self):
        s = CensusSeries("a", np.array([50.0, 50.0, 500.0, 50.0, 50.0]))
        out = correct_outliers(s, window=5, k=10)
        assert np.array_equal(out.values, np.array([50.0] * 5))

    def test_ramp_unchanged(self):
        s = CensusSeries("a", np.array([10.0, 20, 30, 40, 50, 60, 70]))
        assert np.array_equal(correct_outliers(s).values, s.values)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        v = rng.integers(0, 100, size=40).astype(float)
        v[7] = 5000.0
        once = correct_outliers(CensusSeries("a", v))
        twice = correct_outliers(once)
        assert np.array_equal(once.values, twice.values)

    def test_window_validation(self):
        s = CensusSeries("a", np.ones(5))
        with pytest.raises(ValueError):
            correct_outliers(s, window=4)
        with pytest.raises(ValueError):
            correct_outliers(s, window=1)

    def test_empty_series(self):
        with pytest.raises(ValueError):
            correct_outliers(CensusSeries("a", np.array([])))


class TestSimulateCensus:
    def test_constant_initial(self):
        los = from_pmf([0.0, 1.0])
        out = simulate_census(np.zeros(4), 10.0, np.zeros(4), los)
        assert np.array_equal(out, np.full(4, 10.0))

    def test_point_mass_one_day(self):
        los = point_mass(1)
        out = simulate_census(np.array([5.0, 0, 0]), 0.0, np.zeros(3), los)
        assert np.array_equal(out, np.array([5.0, 0.0, 0.0]))

    def test_half_decay(self):
        # remaining fractions (1, 0.5): census = [3, 3*0.5 + 3]
        los = from_pmf([0.0, 0.5, 0.5])
        out = simulate_census(np.array([3.0, 3.0]), 0.0, np.zeros(2), los)
        assert np.allclose(out, [3.0, 4.5])

    def test_discharges_reduce_census(self):
        los = from_pmf([0.0, 1.0])
        out = simulate_census(np.zeros(3), 10.0, np.array([2.0, 3.0, 0.0]), los)
        assert np.array_equal(out, np.array([8.0, 5.0, 5.0]))

    def test_negative_inputs_rejected(self):
        los = point_mass(1)
        with pytest.raises(ValueError):
            simulate_census(np.array([-1.0]), 0.0, np.zeros(1), los)
        with pytest.raises(ValueError):
            simulate_census(np.zeros(1), -1.0, np.zeros(1), los)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=10**6))
    def test_linear_in_admissions(self, T, seed):
        rng = np.random.default_rng(seed)
        los = discretize_weibull(5.0, 1.2, horizon=10)
        a1 = rng.uniform(0, 10, T)
        a2 = rng.uniform(0, 10, T)
        lhs = simulate_census(a1 + a2, 0.0, np.zeros(T), los)
        rhs = simulate_census(a1, 0.0, np.zeros(T), los) + simulate_census(
            a2, 0.0, np.zeros(T), los
        )
        assert np.allclose(lhs, rhs, atol=1e-9)


class TestEstimateAdmissions:
    def test_zero_series(self):
        los = discretize_weibull(5.0, 1.5, horizon=20)
        res = estimate_admissions(CensusSeries("a", np.zeros(10)), los, iterations=50, seed=0)
        assert np.array_equal(res.admissions, np.zeros(10))
        assert res.residual == 0.0

    def test_roundtrip_residual(self):
        rng = np.random.default_rng(11)
        los = discretize_weibull(8.0, 1.4, horizon=30)
        true_adm = rng.uniform(0, 20, 25)
        series = simulate_census(true_adm, 30.0, np.zeros(25), los)
        res = estimate_admissions(CensusSeries("a", series), los, iterations=20000, seed=5)
        assert res.residual <= 0.05 * np.linalg.norm(series)

    def test_feasibility_of_result(self):
        los = discretize_weibull(6.0, 1.3, horizon=20)
        rng = np.random.default_rng(2)
        series = rng.uniform(0, 50, 15)
        res = estimate_admissions(CensusSeries("a", series), los, iterations=2000, seed=1)
        assert np.all(res.admissions >= 0)
        assert np.all(res.initial_discharges >= 0)
        assert res.initial_discharges.sum() <= res.initial_census + 1e-9

    def test_deterministic_for_seed(self):
        los = discretize_weibull(6.0, 1.3, horizon=20)
        series = CensusSeries("a", np.array([10.0, 14, 18, 16, 12, 9, 8]))
        r1 = estimate_admissions(series, los, iterations=3000, seed=9)
        r2 = estimate_admissions(series, los, iterations=3000, seed=9)
        assert np.array_equal(r1.admissions, r2.admissions)
        assert np.array_equal(r1.initial_discharges, r2.initial_discharges)
        assert r1.residual == r2.residual

    def test_iterations_validated(self):
        with pytest.raises(ValueError):
            estimate_admissions(CensusSeries("a", np.ones(3)), point_mass(1), iterations=0)
