"""Binomial rate estimates with confidence intervals."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.stats import beta, norm

DEFAULT_SIGMA = 3.0
CI_METHODS = ("normal", "clopper-pearson")


@dataclass(frozen=True)
class RateEstimate:
    count: int
    trials: int
    rate: float
    low: float
    high: float

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2

    def contains(self, p: float) -> bool:
        return self.low <= p <= self.high

    def to_dict(self) -> dict:
        return asdict(self)


def normal_interval(count: int, trials: int, sigma: float = DEFAULT_SIGMA) -> RateEstimate:
    """Wald interval p +- sigma * sqrt(p(1-p)/n), clipped to [0, 1]."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = count / trials
    h = sigma * math.sqrt(p * (1 - p) / trials)
    return RateEstimate(count, trials, p, max(0.0, p - h), min(1.0, p + h))


def clopper_pearson(count: int, trials: int, sigma: float = DEFAULT_SIGMA) -> RateEstimate:
    """Exact interval at the two-sided confidence matching ``sigma`` normal deviations."""
    if trials < 1:
        raise ValueError("need at least one trial")
    alpha = 2 * norm.sf(sigma)
    low = 0.0 if count == 0 else float(beta.ppf(alpha / 2, count, trials - count + 1))
    high = 1.0 if count == trials else float(beta.ppf(1 - alpha / 2, count + 1, trials - count))
    return RateEstimate(count, trials, count / trials, low, high)


def binomial_interval(count: int, trials: int, method: str = "normal",
                      sigma: float = DEFAULT_SIGMA) -> RateEstimate:
    if method == "normal":
        return normal_interval(count, trials, sigma)
    if method == "clopper-pearson":
        return clopper_pearson(count, trials, sigma)
    raise ValueError(f"unknown interval method {method!r}; expected one of {CI_METHODS}")


def binomial_sigma(p: float, trials: int) -> float:
    """Standard deviation of an observed rate when the true rate is ``p``."""
    return math.sqrt(p * (1 - p) / trials)
