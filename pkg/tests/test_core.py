import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from automation_risk import (AggregationRule, AutomationProfile, Linear, Quadratic, RiskModel,
                             SeverityDistribution, Table, aggregate_automation,
                             bayes_update_harm, expected_loss, harm_probability, loss_gradient,
                             risk_elasticity)
from automation_risk.errors import (DomainError, InvalidCurveError, NondifferentiableError,
                                    UndefinedPosteriorError)

prob = st.floats(0.0, 1.0)
open_prob = st.floats(0.01, 0.99)


def credit(p_failure=0.03):
    return RiskModel(p_failure, Linear(0.1, 0.15, 0.9, 0.85), 50_000.0)


def test_decomposition_worked_values_are_exact():
    r = credit()
    assert expected_loss(r, 0.9) == 1275.0
    assert expected_loss(r, 0.1) == 225.0
    assert harm_probability(r, 0.9) == 0.85


def test_table_example_values_are_exact():
    r = RiskModel(0.98, Table(((0, 0), (0.3, 0.15), (0.9, 0.9), (1, 1))), 5e8)
    assert expected_loss(r, 0.9) == 441e6
    assert expected_loss(r, 0.3) == 73.5e6
    assert expected_loss(r.replace(p_failure=0.1), 0.9) == 45e6


def test_gradient_of_linear_model():
    assert loss_gradient(credit(), 0.5) == pytest.approx(0.03 * 0.875 * 50_000)


def test_gradient_raises_at_a_table_knot():
    r = RiskModel(0.5, Table(((0, 0), (0.5, 0.2), (1, 1))), 10.0)
    with pytest.raises(NondifferentiableError):
        loss_gradient(r, 0.5)


def test_elasticity_undefined_at_zero():
    with pytest.raises(DomainError):
        risk_elasticity(credit(), 0.0)
    r = RiskModel(0.1, Quadratic(0, 0, 1), 1.0)
    assert risk_elasticity(r, 0.5) == pytest.approx(2.0)


def test_out_of_range_inputs():
    with pytest.raises(DomainError):
        harm_probability(credit(), 1.2)
    with pytest.raises(DomainError):
        credit(p_failure=1.5)
    with pytest.raises(InvalidCurveError):
        RiskModel(0.1, Linear.from_slope(0.5, 0.9), 1.0)
    with pytest.raises(DomainError):
        RiskModel(0.1, Linear.from_slope(0, 1), -1.0)


def test_severity_distribution_mean_must_agree():
    with pytest.raises(DomainError):
        RiskModel(0.1, Linear.from_slope(0, 1), 10.0, SeverityDistribution("exponential", 12.0))
    r = RiskModel(0.1, Linear.from_slope(0, 1), 10.0, SeverityDistribution("lognormal", 10.0, 1.0))
    assert r.replace(severity_mean=20.0).severity_distribution.mean == 20.0


@pytest.mark.parametrize("dist", [SeverityDistribution("exponential", 3.0),
                                  SeverityDistribution("lognormal", 3.0, 0.8)],
                         ids=lambda d: d.family)
def test_severity_moments_by_quadrature(dist):
    u = (np.arange(400_000) + 0.5) / 400_000
    x = dist.from_uniform(u)
    assert x.mean() == pytest.approx(dist.mean, rel=2e-3)
    assert (x**2).mean() == pytest.approx(dist.second_moment, rel=2e-2)


def test_aggregation_rules():
    p = AutomationProfile(0.5, 0.2, 0.9)
    assert aggregate_automation(p) == 0.9
    assert aggregate_automation(p, AggregationRule.MEAN) == pytest.approx(1.6 / 3)
    assert aggregate_automation(p, "product") == pytest.approx(0.09)


def test_profile_validation_and_clamping():
    with pytest.raises(DomainError):
        AutomationProfile(0.3, 0.2, 0.1)
    with pytest.raises(DomainError):
        AutomationProfile(0.5, 1.2, 0.1)
    assert AutomationProfile.clamped(1.0, -0.3, 1.7).as_tuple() == (1.0, 0.0, 1.0)


@settings(max_examples=300, deadline=None)
@given(d=st.sampled_from([0.0, 0.5, 1.0]), o=prob, t=prob)
def test_aggregation_ordering(d, o, t):
    p = AutomationProfile(d, o, t)
    mx = aggregate_automation(p, "max")
    mean = aggregate_automation(p, "mean")
    prod = aggregate_automation(p, "product")
    assert 0.0 <= prod <= mean + 1e-15 and mean <= mx + 1e-15 and mx <= 1.0


@settings(max_examples=300, deadline=None)
@given(pf=prob, b=st.floats(0.0, 0.5), s=st.floats(0.0, 0.5), sev=st.floats(0.0, 1e7), a=prob)
def test_loss_is_product_of_factors(pf, b, s, sev, a):
    r = RiskModel(pf, Linear.from_slope(b, s), sev)
    loss = expected_loss(r, a)
    assert loss >= 0.0
    assert math.isclose(loss, pf * (b + s * a) * sev, rel_tol=1e-12, abs_tol=1e-9)
    assert expected_loss(r, a) <= expected_loss(r, 1.0) + 1e-9


@settings(max_examples=200, deadline=None)
@given(pf=st.floats(0.001, 1.0), c2=st.floats(0.01, 1.0), sev=st.floats(1.0, 1e6),
       a=st.floats(0.05, 0.95))
def test_elasticity_is_log_log_slope(pf, c2, sev, a):
    r = RiskModel(pf, Quadratic(0.0, 0.0, c2), sev)
    h = 1e-4
    fd = (math.log(expected_loss(r, a * math.exp(h)))
          - math.log(expected_loss(r, a * math.exp(-h)))) / (2 * h)
    assert risk_elasticity(r, a) == pytest.approx(fd, rel=1e-6)
    assert risk_elasticity(r, a) == pytest.approx(2.0)


def brute_force_posterior(prior, lf_h, lf_nh, la_h, la_nh):
    """Enumerate the joint (H, F-pattern, A-pattern) table and condition on both observed."""
    joint = {}
    for h, ph in ((1, prior), (0, 1 - prior)):
        pf = lf_h if h else lf_nh
        pa = la_h if h else la_nh
        for f in (0, 1):
            for a in (0, 1):
                joint[h, f, a] = ph * (pf if f else 1 - pf) * (pa if a else 1 - pa)
    evidence = joint[1, 1, 1] + joint[0, 1, 1]
    return joint[1, 1, 1] / evidence


@settings(max_examples=300, deadline=None)
@given(open_prob, open_prob, open_prob, open_prob, open_prob)
def test_bayes_matches_enumeration(prior, lf_h, lf_nh, la_h, la_nh):
    post = bayes_update_harm(prior, lf_h, lf_nh, la_h, la_nh).posterior
    assert post == pytest.approx(brute_force_posterior(prior, lf_h, lf_nh, la_h, la_nh),
                                 rel=1e-12)
    assert 0.0 <= post <= 1.0


@settings(max_examples=200, deadline=None)
@given(open_prob, open_prob, open_prob, open_prob, open_prob)
def test_bayes_chaining_equals_joint_update(prior, lf_h, lf_nh, la_h, la_nh):
    step = bayes_update_harm(prior, lf_h, lf_nh, 1.0, 1.0).posterior
    chained = bayes_update_harm(step, 1.0, 1.0, la_h, la_nh).posterior
    joint = bayes_update_harm(prior, lf_h, lf_nh, la_h, la_nh).posterior
    assert chained == pytest.approx(joint, rel=1e-9, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(prior=open_prob, lf_nh=open_prob, la=open_prob, lo=open_prob, hi=open_prob)
def test_posterior_increases_with_likelihood_under_harm(prior, lf_nh, la, lo, hi):
    lo, hi = min(lo, hi), max(lo, hi)
    a = bayes_update_harm(prior, lo, lf_nh, la, la).posterior
    b = bayes_update_harm(prior, hi, lf_nh, la, la).posterior
    assert b >= a - 1e-12


def test_bayes_degenerate_evidence():
    with pytest.raises(UndefinedPosteriorError):
        bayes_update_harm(0.5, 0.0, 0.0, 0.5, 0.5)
    assert bayes_update_harm(0.0, 0.9, 0.1, 0.9, 0.1).posterior == 0.0
    assert bayes_update_harm(1.0, 0.9, 0.1, 0.9, 0.1).posterior == 1.0
