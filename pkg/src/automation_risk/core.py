"""Expected-loss decomposition and its derivatives.

Expected loss per decision factors into three terms::

    E[Loss] = P(F) * P(H | F, A) * E[S | H]

failure probability, harm propagation at automation level ``A``, and
severity given harm. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .curves import Curve, check_harm_curve, check_unit_interval
from .errors import DomainError, UndefinedPosteriorError

DECISION_LEVELS = (0.0, 0.5, 1.0)


def check_probability(p: float, name: str = "probability") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p}")
    return p


class AggregationRule(str, Enum):
    MAX = "max"
    MEAN = "mean"
    PRODUCT = "product"


@dataclass(frozen=True)
class AutomationProfile:
    """Decision authority, inverse override capability, inverse detection speed.

    ``a_decision`` is 0 (human decides), 0.5 (human approves) or 1 (system
    decides). The other two dimensions are continuous in [0, 1].
    """

    a_decision: float
    a_override: float
    a_detection: float

    def __post_init__(self):
        if float(self.a_decision) not in DECISION_LEVELS:
            raise DomainError(f"a_decision must be one of {DECISION_LEVELS}, got {self.a_decision}")
        check_unit_interval(self.a_override, "a_override")
        check_unit_interval(self.a_detection, "a_detection")

    @classmethod
    def clamped(cls, a_decision: float, a_override: float, a_detection: float) -> "AutomationProfile":
        """Build a profile, clipping the continuous dimensions into [0, 1]."""
        return cls(a_decision, min(max(a_override, 0.0), 1.0), min(max(a_detection, 0.0), 1.0))

    def as_tuple(self) -> tuple[float, float, float]:
        return (float(self.a_decision), float(self.a_override), float(self.a_detection))


def aggregate_automation(profile: AutomationProfile,
                         rule: AggregationRule = AggregationRule.MAX) -> float:
    """Collapse the three automation dimensions into a scalar A.

    MAX is the weakest-link rule: any single unchecked pathway sets the
    overall level. MEAN and PRODUCT are the softer alternatives.
    """
    d, o, t = profile.as_tuple()
    rule = AggregationRule(rule)
    if rule is AggregationRule.MAX:
        return max(d, o, t)
    if rule is AggregationRule.MEAN:
        return (d + o + t) / 3.0
    return d * o * t


@dataclass(frozen=True)
class SeverityDistribution:
    """Loss size given harm, parameterised by its mean.

    ``point`` is a point mass, ``exponential`` has no shape parameter and
    ``lognormal`` uses ``sigma`` as the log-scale standard deviation.
    """

    family: str
    mean: float
    sigma: float = 0.0

    FAMILIES = ("point", "exponential", "lognormal")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise DomainError(f"unknown severity family {self.family!r}")
        if not self.mean >= 0:
            raise DomainError("severity mean must be nonnegative")
        if self.family == "lognormal" and not (self.sigma > 0 and self.mean > 0):
            raise DomainError("lognormal severity needs mean > 0 and sigma > 0")

    @property
    def second_moment(self) -> float:
        m = self.mean
        if self.family == "point":
            return m * m
        if self.family == "exponential":
            return 2.0 * m * m
        return m * m * math.exp(self.sigma**2)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF draw; ``u`` must lie strictly inside (0, 1)."""
        u = np.asarray(u, dtype=float)
        if self.family == "point":
            return np.full(u.shape, self.mean)
        if self.family == "exponential":
            return -self.mean * np.log1p(-u)
        mu = math.log(self.mean) - 0.5 * self.sigma**2
        return np.exp(mu + self.sigma * ndtri(u))

    def to_dict(self) -> dict:
        out = {"family": self.family}
        if self.family == "lognormal":
            out["sigma"] = self.sigma
        return out


@dataclass(frozen=True)
class RiskModel:
    p_failure: float
    harm_curve: Curve
    severity_mean: float
    severity_distribution: SeverityDistribution | None = field(default=None)

    def __post_init__(self):
        check_probability(self.p_failure, "p_failure")
        check_harm_curve(self.harm_curve)
        if not self.severity_mean >= 0:
            raise DomainError(f"severity_mean must be nonnegative, got {self.severity_mean}")
        dist = self.severity_distribution
        if dist is None:
            object.__setattr__(self, "severity_distribution",
                               SeverityDistribution("point", float(self.severity_mean)))
        elif not math.isclose(dist.mean, self.severity_mean, rel_tol=1e-9, abs_tol=0.0):
            raise DomainError("severity distribution mean must equal severity_mean")

    def replace(self, **changes) -> "RiskModel":
        fields = {"p_failure": self.p_failure, "harm_curve": self.harm_curve,
                  "severity_mean": self.severity_mean,
                  "severity_distribution": self.severity_distribution}
        fields.update(changes)
        if "severity_mean" in changes and "severity_distribution" not in changes:
            old = self.severity_distribution
            fields["severity_distribution"] = SeverityDistribution(
                old.family, float(changes["severity_mean"]), old.sigma)
        return RiskModel(**fields)


def harm_probability(model: RiskModel, a: float) -> float:
    """P(H | F, A=a): the chance a failure propagates into harm."""
    a = check_unit_interval(a)
    return float(model.harm_curve(a))


def expected_loss(model: RiskModel, a: float) -> float:
    # this grouping keeps the worked examples exact in binary floating point
    return model.p_failure * (harm_probability(model, a) * model.severity_mean)


def loss_gradient(model: RiskModel, a: float) -> float:
    """Marginal expected loss per unit of automation, dE[Loss]/dA.

    Raises ``NondifferentiableError`` at a threshold step or a table knot.
    """
    a = check_unit_interval(a)
    slope = float(model.harm_curve.derivative(a))
    return model.p_failure * (slope * model.severity_mean)


def risk_elasticity(model: RiskModel, a: float) -> float:
    """Percentage change in expected loss per percentage change in A.

    Equal to the log-log slope of the harm curve; P(F) and E[S|H] cancel.
    """
    a = check_unit_interval(a)
    if a == 0.0:
        raise DomainError("elasticity is undefined at a = 0")
    g = harm_probability(model, a)
    if g == 0.0:
        raise DomainError("elasticity is undefined where harm probability is 0")
    return float(model.harm_curve.derivative(a)) * a / g


@dataclass(frozen=True)
class HarmPosterior:
    prior: float
    likelihood_f_given_h: float
    likelihood_f_given_not_h: float
    likelihood_a_given_h: float
    likelihood_a_given_not_h: float
    posterior: float


def bayes_update_harm(prior: float, lf_h: float, lf_nh: float,
                      la_h: float, la_nh: float) -> HarmPosterior:
    """Update the harm probability on an observed failure pattern and automation level.

    Failure and automation evidence are treated as conditionally
    independent given harm, so their likelihoods multiply. Feed
    ``result.posterior`` back in as ``prior`` to chain updates.
    """
    for name, v in (("prior", prior), ("lf_h", lf_h), ("lf_nh", lf_nh),
                    ("la_h", la_h), ("la_nh", la_nh)):
        check_probability(v, name)
    num = lf_h * la_h * prior
    den = num + lf_nh * la_nh * (1.0 - prior)
    if den <= 0.0:
        raise UndefinedPosteriorError("evidence has zero probability under both hypotheses")
    return HarmPosterior(prior, lf_h, lf_nh, la_h, la_nh, num / den)
