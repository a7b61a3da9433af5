import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from automation_risk import e_value, manski_bounds, power_analysis
from automation_risk.errors import DomainError, InvalidRateError, UnidentifiedError


def test_e_value_known_points():
    assert e_value(1.0) == 1.0
    assert e_value(4.0) == pytest.approx(4 + math.sqrt(12))
    assert e_value(2.0) == pytest.approx(3.41421356, abs=1e-8)


def test_e_value_rejects_protective_ratio_with_hint():
    with pytest.raises(DomainError, match="1/rr = 2"):
        e_value(0.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(1.0, 1e4), st.floats(1.0, 1e4))
def test_e_value_is_monotone_and_at_least_rr(a, b):
    lo, hi = sorted((a, b))
    assert e_value(lo) <= e_value(hi)
    assert e_value(lo) >= lo


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 0.999))
def test_manski_interval_properties(p_hat, rho):
    b = manski_bounds(p_hat, rho)
    assert 0.0 <= b.lower <= b.upper <= 1.0
    assert b.width == pytest.approx(rho, abs=1e-14)


def test_manski_edge_cases():
    b = manski_bounds(0.3, 0.0)
    assert b.lower == pytest.approx(0.3, abs=1e-14) and b.upper == pytest.approx(0.3, abs=1e-14)
    with pytest.raises(UnidentifiedError):
        manski_bounds(0.3, 1.0)
    with pytest.raises(DomainError):
        manski_bounds(1.3, 0.1)


def test_manski_covers_adversarial_counts():
    # every split of 40 events into reported/unreported and harmed/harmless
    n = 40
    for n_rep in range(1, n + 1):
        for k_rep in range(n_rep + 1):
            for k_unrep in range(n - n_rep + 1):
                b = manski_bounds(k_rep / n_rep, 1 - n_rep / n)
                assert b.lower <= (k_rep + k_unrep) / n <= b.upper


def test_power_is_reproducible_and_increases_with_gradient():
    args = (75, 500, 0.05, 0.1, 1000)
    assert power_analysis(2.0, *args, seed=1) == power_analysis(2.0, *args, seed=1)
    powers = [power_analysis(g, *args, seed=1) for g in (1.0, 1.5, 2.0, 3.0)]
    assert powers == sorted(powers)


def test_power_matches_normal_approximation():
    n_low, n_high, p0, p1 = 75, 425, 0.1, 0.2
    pooled = (n_low * p0 + n_high * p1) / (n_low + n_high)
    se_null = math.sqrt(pooled * (1 - pooled) * (1 / n_low + 1 / n_high))
    se_alt = math.sqrt(p0 * (1 - p0) / n_low + p1 * (1 - p1) / n_high)
    approx = norm.sf((1.96 * se_null - (p1 - p0)) / se_alt)
    sim = power_analysis(2.0, n_low, n_low + n_high, 0.05, p0, 4000, seed=2)
    assert sim == pytest.approx(approx, abs=0.04)


def test_null_rejection_rate_across_seeds():
    sizes = [power_analysis(1.0, 75, 500, 0.05, 0.1, 2000, seed=s) for s in range(5)]
    assert abs(np.mean(sizes) - 0.05) < 0.015


def test_power_input_validation():
    with pytest.raises(InvalidRateError):
        power_analysis(3.0, 75, 500, 0.05, 0.4, 200, seed=1)
    with pytest.raises(DomainError):
        power_analysis(3.0, 75, 500, 0.05, 0.1, 50, seed=1)
    with pytest.raises(DomainError):
        power_analysis(3.0, 500, 500, 0.05, 0.1, 200, seed=1)
