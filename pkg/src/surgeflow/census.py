"""Reconstruct admissions and initial-patient discharges from reported
active-census time series, and clean single-day reporting outliers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .los import LosDistribution, remaining_fractions


@dataclass(frozen=True)
class CensusSeries:
    location: str
    values: np.ndarray  # active patients per day


@dataclass(frozen=True)
class EstimationResult:
    admissions: np.ndarray
    initial_census: float
    initial_discharges: np.ndarray
    residual: float  # l2 distance between simulated and reported census
    iterations: int


def correct_outliers(series: CensusSeries, window: int = 5, k: float = 10.0) -> CensusSeries:
    """Replace values deviating from their window median by more than
    k * MAD with that median.

    Windows are truncated at the series boundaries. A MAD of zero makes
    any deviating value an outlier (a lone spike among identical values is
    exactly the reporting error this targets).
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    v = np.asarray(series.values, dtype=float)
    if v.size == 0:
        raise ValueError("empty census series")
    half = window // 2
    out = v.copy()
    for t in range(v.size):
        win = v[max(0, t - half) : t + half + 1]
        med = np.median(win)
        mad = np.median(np.abs(win - med))
        if abs(v[t] - med) > k * mad:
            out[t] = med
    return CensusSeries(location=series.location, values=out)


def simulate_census(
    admissions: np.ndarray,
    initial_census: float,
    initial_discharges: np.ndarray,
    los: LosDistribution,
) -> np.ndarray:
    """Active patients per day with zero transfers.

    census(t) = (initial - cumulative discharges) + sum over admission
    days t' <= t of the still-active fraction of that day's cohort. This
    is the arithmetic contract for the census recursion used everywhere
    else in the package.
    """
    a = np.asarray(admissions, dtype=float)
    d = np.asarray(initial_discharges, dtype=float)
    if a.shape != d.shape:
        raise ValueError("admissions and initial_discharges must share one length")
    if initial_census < 0 or np.any(a < 0) or np.any(d < 0):
        raise ValueError("census inputs must be non-negative")
    T = a.size
    surv = remaining_fractions(los, T - 1)  # 1 - L(lag), lag = 0..T-1
    active_new = np.convolve(a, surv)[:T]
    return (initial_census - np.cumsum(d)) + active_new


def _heuristic_start(values: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    admissions = np.maximum(0.0, np.diff(values, prepend=values[0]))
    return admissions, float(values[0]), np.zeros(values.size)


def estimate_admissions(
    series: CensusSeries,
    los: LosDistribution,
    iterations: int = 20000,
    seed: int = 0,
) -> EstimationResult:
    """Seeded random search for the admissions / initial-discharge
    schedule whose simulated census best matches the reported series.

    Starts from admissions = max(0, day-over-day increase) and perturbs a
    uniformly chosen entry per iteration with a Gaussian step annealed
    from 10% of the peak census down to 0.1, keeping improvements only.
    Deterministic for a fixed seed.
    """
    values = np.asarray(series.values, dtype=float)
    if values.size == 0:
        raise ValueError("empty census series")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    T = values.size
    rng = np.random.default_rng(seed)

    admissions, p0, discharges = _heuristic_start(values)
    best = float(np.linalg.norm(simulate_census(admissions, p0, discharges, los) - values))

    scale_hi = max(0.1, 0.1 * float(values.max()))
    scale_lo = 0.1
    for it in range(iterations):
        frac = it / max(1, iterations - 1)
        scale = scale_hi * (scale_lo / scale_hi) ** frac
        idx = int(rng.integers(0, 2 * T + 1))
        step = float(rng.normal(0.0, scale))
        cand_a, cand_p0, cand_d = admissions, p0, discharges
        if idx == 0:
            cand_p0 = max(0.0, p0 + step)
        elif idx <= T:
            cand_a = admissions.copy()
            cand_a[idx - 1] = max(0.0, cand_a[idx - 1] + step)
        else:
            cand_d = discharges.copy()
            t = idx - T - 1
            cand_d[t] = max(0.0, cand_d[t] + step)
        if cand_d.sum() > cand_p0:  # discharges can never exceed initial patients
            continue
        r = float(np.linalg.norm(simulate_census(cand_a, cand_p0, cand_d, los) - values))
        if r < best:
            admissions, p0, discharges, best = cand_a, cand_p0, cand_d, r

    return EstimationResult(
        admissions=admissions,
        initial_census=p0,
        initial_discharges=discharges,
        residual=best,
        iterations=iterations,
    )
