"""Portfolio-level scenarios, counterfactual comparisons and intervention ROI."""
from __future__ import annotations

from dataclasses import dataclass

from .core import (AggregationRule, AutomationProfile, RiskModel, aggregate_automation,
                   expected_loss, harm_probability)
from .curves import check_unit_interval
from .errors import DomainError, UnitError


@dataclass(frozen=True)
class Scenario:
    """A deployed system: its risk model, automation setting and decision volume.

    ``automation`` is either a full :class:`AutomationProfile` (aggregated
    with ``rule``) or a scalar A when only an overall level is known.
    ``period_label`` names the period ``decision_volume`` is counted over;
    labels are compared for equality only.
    """

    name: str
    risk: RiskModel
    automation: AutomationProfile | float
    rule: AggregationRule = AggregationRule.MAX
    decision_volume: float = 1.0
    period_label: str = "period"

    def __post_init__(self):
        if not self.decision_volume >= 0:
            raise DomainError(f"decision_volume must be nonnegative, got {self.decision_volume}")
        if not isinstance(self.automation, AutomationProfile):
            object.__setattr__(self, "automation", check_unit_interval(self.automation, "a"))

    @property
    def a_effective(self) -> float:
        if isinstance(self.automation, AutomationProfile):
            return aggregate_automation(self.automation, self.rule)
        return self.automation


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    period_label: str
    a_effective: float
    p_failure: float
    harm_probability: float
    severity_mean: float
    loss_per_decision: float
    loss_per_period: float
    expected_incidents_per_period: float


def evaluate_scenario(s: Scenario) -> ScenarioReport:
    a = s.a_effective
    g = harm_probability(s.risk, a)
    per_decision = expected_loss(s.risk, a)
    return ScenarioReport(
        name=s.name,
        period_label=s.period_label,
        a_effective=a,
        p_failure=s.risk.p_failure,
        harm_probability=g,
        severity_mean=s.risk.severity_mean,
        loss_per_decision=per_decision,
        loss_per_period=s.decision_volume * per_decision,
        expected_incidents_per_period=s.decision_volume * (s.risk.p_failure * g),
    )


@dataclass(frozen=True)
class CounterfactualReport:
    baseline: ScenarioReport
    intervention: ScenarioReport
    absolute_delta: float
    relative_reduction: float


def counterfactual(baseline: Scenario, intervention: Scenario) -> CounterfactualReport:
    """Compare period losses of a baseline and an alternative configuration.

    ``absolute_delta`` is baseline minus intervention loss, so a positive
    value is a saving. The intervention may change A, P(F), severity or any
    combination.
    """
    if baseline.period_label != intervention.period_label:
        raise UnitError(f"period labels differ: {baseline.period_label!r} vs "
                        f"{intervention.period_label!r}")
    base = evaluate_scenario(baseline)
    alt = evaluate_scenario(intervention)
    if base.loss_per_period <= 0:
        raise DomainError("relative reduction is undefined for a zero-loss baseline")
    return CounterfactualReport(
        baseline=base,
        intervention=alt,
        absolute_delta=base.loss_per_period - alt.loss_per_period,
        relative_reduction=1.0 - alt.loss_per_period / base.loss_per_period,
    )


@dataclass(frozen=True)
class RoiReport:
    intervention_cost: float
    gross_benefit: float
    net_benefit: float
    roi_multiple: float


def roi(cf: CounterfactualReport, intervention_cost: float) -> RoiReport:
    """Net benefit per period and its multiple of the intervention's cost."""
    if not intervention_cost > 0:
        raise DomainError("intervention_cost must be positive")
    gross = cf.absolute_delta
    net = gross - intervention_cost
    return RoiReport(intervention_cost, gross, net, net / intervention_cost)
