"""Discretized length-of-stay distributions and the census decay 1 - L(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_LOS_HORIZON = 60


@dataclass(frozen=True)
class LosDistribution:
    """Daily length-of-stay pmf/cdf truncated at ``horizon`` days.

    L(0) = 0 so newly admitted patients are active on their admission day;
    mass beyond the horizon is folded into the last day.
    """

    horizon: int
    pmf: np.ndarray  # shape (horizon + 1,)
    cdf: np.ndarray  # shape (horizon + 1,)

    def __post_init__(self):
        if self.pmf.shape != (self.horizon + 1,) or self.cdf.shape != (self.horizon + 1,):
            raise ValueError("pmf/cdf length must be horizon + 1")
        if self.cdf[0] != 0.0:
            raise ValueError("L(0) must be 0")
        if np.any(self.pmf < -1e-12):
            raise ValueError("pmf entries must be non-negative")
        if abs(self.pmf.sum() - 1.0) > 1e-6:
            raise ValueError("pmf must sum to 1 after tail folding")
        if np.max(np.abs(self.cdf - np.cumsum(self.pmf))) > 1e-9:
            raise ValueError("cdf inconsistent with pmf")


def from_pmf(pmf) -> LosDistribution:
    pmf = np.asarray(pmf, dtype=float)
    return LosDistribution(horizon=len(pmf) - 1, pmf=pmf, cdf=np.cumsum(pmf))


def discretize_weibull(lam: float, k: float, horizon: int = DEFAULT_LOS_HORIZON) -> LosDistribution:
    """Daily discretization of a Weibull(scale=lam, shape=k) stay length.

    L(t) is the continuous CDF at the right endpoint of each day, so a
    stay of under one day still occupies a bed on the admission day.
    """
    if lam <= 0 or k <= 0:
        raise ValueError("Weibull parameters must be positive")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    t = np.arange(horizon + 1, dtype=float)
    cdf = 1.0 - np.exp(-((t / lam) ** k))
    pmf = np.diff(cdf, prepend=0.0)
    pmf[horizon] += 1.0 - cdf[horizon]  # fold tail mass into the last day
    cdf = np.cumsum(pmf)
    return LosDistribution(horizon=horizon, pmf=pmf, cdf=cdf)


def point_mass(days: int, horizon: int | None = None) -> LosDistribution:
    """Deterministic stay of exactly ``days`` days.

    A zero-day stay still occupies a bed on the admission day (L(0) = 0),
    so its mass sits at day 1.
    """
    if days < 0:
        raise ValueError("days must be non-negative")
    at = max(days, 1)
    h = at if horizon is None else horizon
    if h < at:
        raise ValueError("horizon must cover the point mass")
    pmf = np.zeros(h + 1)
    pmf[at] = 1.0
    return from_pmf(pmf)


def shifted_care_path_los(base: LosDistribution, pre_days: int, post_days: int):
    """LOS triple (pre-stay, main, post-stay) for a chained care path.

    The pre and post stages are deterministic stays; the main stage keeps
    its own distribution unchanged.
    """
    if pre_days < 0 or post_days < 0:
        raise ValueError("pre_days and post_days must be non-negative")
    return point_mass(pre_days), base, point_mass(post_days)


def remaining_fraction(los: LosDistribution, lag: int) -> float:
    """Fraction of an admission cohort still active ``lag`` days later."""
    if lag < 0:
        raise ValueError("lag must be non-negative")
    return float(1.0 - los.cdf[min(lag, los.horizon)])


def remaining_fractions(los: LosDistribution, max_lag: int) -> np.ndarray:
    """Vector of 1 - L(lag) for lag = 0..max_lag."""
    lags = np.minimum(np.arange(max_lag + 1), los.horizon)
    return 1.0 - los.cdf[lags]


def weibull_median(lam: float, k: float) -> float:
    return lam * math.log(2.0) ** (1.0 / k)
