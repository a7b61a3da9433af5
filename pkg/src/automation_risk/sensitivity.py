"""Selection bounds, E-values and a simulated power check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .core import check_probability
from .errors import DomainError, InvalidRateError, UnidentifiedError
from .simulation import check_seed

_SLACK = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class BoundsReport:
    p_hat: float
    rho: float
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def manski_bounds(p_hat: float, rho: float) -> BoundsReport:
    """Worst-case interval for a harm rate when a fraction ``rho`` of events went unreported.

    ``p_hat`` is the rate among reported events. The unreported events are
    assumed to be all harmless (lower bound) or all harmful (upper bound),
    so the interval width is ``rho``. Both ends are widened by a few ulps so
    floating-point rounding can never exclude a rate on the boundary.
    """
    check_probability(p_hat, "p_hat")
    if rho == 1.0:
        raise UnidentifiedError("rho = 1: nothing was reported, the rate is unidentified")
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    lower = p_hat * (1.0 - rho)
    upper = lower + rho
    return BoundsReport(p_hat, rho, max(lower - _SLACK, 0.0), min(upper + _SLACK, 1.0))


def e_value(rr: float) -> float:
    """Minimum confounder strength, on the risk-ratio scale, that explains away ``rr``."""
    if not rr >= 1.0:
        raise DomainError(f"e_value needs rr >= 1, got {rr}; for a protective association "
                          f"pass the inverse 1/rr = {1.0 / rr if rr > 0 else math.inf:.6g}")
    return rr + math.sqrt(rr * (rr - 1.0))


def power_analysis(gradient_ratio: float, n_low: int, n_total: int, alpha: float,
                   base_rate_low: float, reps: int, seed: int) -> float:
    """Rejection rate of a two-sided pooled two-proportion z test.

    Each replication draws ``n_low`` low-automation and ``n_total - n_low``
    high-automation incidents, with harm rates ``base_rate_low`` and
    ``gradient_ratio * base_rate_low``.
    """
    check_probability(base_rate_low, "base_rate_low")
    if not gradient_ratio > 0:
        raise DomainError("gradient_ratio must be positive")
    p_high = gradient_ratio * base_rate_low
    if p_high > 1.0:
        raise InvalidRateError(
            f"base_rate_low x gradient_ratio = {p_high:g} exceeds 1")
    if not 0 < n_low < n_total:
        raise DomainError("need 0 < n_low < n_total")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if reps < 100:
        raise DomainError("reps must be >= 100")
    n_high = n_total - n_low

    rng = np.random.Generator(np.random.Philox(key=check_seed(seed)))
    k_low = rng.binomial(n_low, base_rate_low, size=reps)
    k_high = rng.binomial(n_high, p_high, size=reps)

    pooled = (k_low + k_high) / n_total
    se = np.sqrt(pooled * (1.0 - pooled) * (1.0 / n_low + 1.0 / n_high))
    diff = k_high / n_high - k_low / n_low
    z = np.divide(diff, se, out=np.zeros(reps), where=se > 0)
    critical = norm.ppf(1.0 - alpha / 2.0)
    return float(np.mean(np.abs(z) > critical))
