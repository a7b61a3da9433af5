import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from automation_risk.curves import (Exponential, Linear, Logistic, Quadratic, Table, Threshold,
                                    check_cost_curve, check_harm_curve, curve_from_dict)
from automation_risk.errors import InvalidCurveError, NondifferentiableError

SMOOTH = [
    Linear(0.1, 0.15, 0.9, 0.85),
    Quadratic(0.05, 0.2, 0.5),
    Exponential(0.1, 1.5, -0.05),
    Logistic(0.5, 8.0, 0.05, 0.95),
]

unit = st.floats(0.0, 1.0)


def test_linear_hits_its_anchor_points_exactly():
    c = Linear(0.1, 0.15, 0.9, 0.85)
    assert c(0.1) == 0.15 and c(0.9) == 0.85
    assert c.slope == pytest.approx(0.875)
    assert Linear.from_slope(0.2, 0.5)(1.0) == pytest.approx(0.7)


def test_logistic_is_pinned_at_the_ends():
    c = Logistic(0.3, 10.0, 0.1, 0.8)
    assert c(0.0) == pytest.approx(0.1, abs=1e-15)
    assert c(1.0) == pytest.approx(0.8, abs=1e-15)


@pytest.mark.parametrize("curve", SMOOTH, ids=lambda c: c.family)
def test_second_derivative_matches_central_difference(curve):
    a = np.linspace(0.05, 0.95, 19)
    h = 1e-4
    fd = (curve.derivative(a + h) - curve.derivative(a - h)) / (2 * h)
    np.testing.assert_allclose(curve.second_derivative(a), fd, rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("curve", SMOOTH, ids=lambda c: c.family)
def test_scalar_in_scalar_out(curve):
    assert isinstance(curve(0.5), float)
    assert isinstance(curve.derivative(0.5), float)
    assert curve(np.array([0.2, 0.4])).shape == (2,)


@pytest.mark.parametrize("curve", SMOOTH, ids=lambda c: c.family)
def test_steepened_keeps_origin_and_scales_the_rise(curve):
    s = curve.steepened(0.5)
    a = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(s(a) - s(0.0), 0.5 * (curve(a) - curve(0.0)), atol=1e-12)
    np.testing.assert_allclose(curve.scaled(3.0)(a), 3.0 * curve(a), rtol=1e-12)


@pytest.mark.parametrize("curve", SMOOTH + [Threshold(0.5, 0.1, 0.6),
                                            Table(((0.0, 0.0), (0.5, 0.2), (1.0, 0.9)))],
                         ids=lambda c: c.family)
def test_dict_round_trip(curve):
    assert curve_from_dict(curve.to_dict()) == curve


def test_linear_dict_accepts_slope_form():
    assert curve_from_dict({"family": "linear", "intercept": 1.0, "slope": -1.0})(1.0) == 0.0


def test_unknown_family_and_extra_fields_are_rejected():
    with pytest.raises(KeyError):
        curve_from_dict({"family": "spline"})
    with pytest.raises(TypeError):
        curve_from_dict({"family": "quadratic", "c0": 0, "c1": 0, "c2": 1, "c3": 2})


def test_threshold_derivative_raises_at_the_step():
    c = Threshold(0.5, 0.1, 0.6)
    assert c(0.4999) == 0.1 and c(0.5) == 0.6
    assert c.derivative(0.3) == 0.0
    with pytest.raises(NondifferentiableError):
        c.derivative(0.5)


def test_table_interpolates_and_clamps():
    c = Table(((0.2, 0.1), (0.6, 0.5)))
    assert c(0.0) == 0.1 and c(1.0) == 0.5
    assert c(0.4) == pytest.approx(0.3)
    assert c.derivative(0.4) == pytest.approx(1.0)
    assert c.derivative(0.9) == 0.0
    with pytest.raises(NondifferentiableError):
        c.derivative(0.6)


def test_table_needs_increasing_knots():
    with pytest.raises(InvalidCurveError):
        Table(((0.5, 0.1), (0.5, 0.2)))
    with pytest.raises(InvalidCurveError):
        Table(((0.5, 0.1),))


def test_convexity_flags():
    assert Quadratic(0, 0, 1).convex and not Quadratic(0, 1, -0.5).convex
    assert Linear(0, 0, 1, 1).convex
    assert Exponential(1.0, -2.0).convex and not Exponential(-1.0, 2.0).convex
    assert Logistic(1.5, 3.0, 0.0, 0.5).convex and not Logistic(0.5, 3.0, 0.0, 0.5).convex
    assert Table(((0, 0), (0.5, 0.1), (1, 0.8))).convex
    assert not Table(((0, 0), (0.5, 0.7), (1, 0.8))).convex


def test_harm_curve_checks():
    check_harm_curve(SMOOTH[0])
    with pytest.raises(InvalidCurveError):
        check_harm_curve(Linear.from_slope(0.5, 0.7))
    with pytest.raises(InvalidCurveError):
        check_harm_curve(Linear.from_slope(0.9, -0.5))


def test_cost_curve_checks():
    check_cost_curve(Quadratic(100, -200, 100))
    with pytest.raises(InvalidCurveError):
        check_cost_curve(Linear.from_slope(10, 5))
    with pytest.raises(InvalidCurveError):
        check_cost_curve(Linear.from_slope(10, -20))
    check_cost_curve(Linear.from_slope(10, 5), direction="nondecreasing")


@settings(max_examples=200, deadline=None)
@given(x0=st.floats(0.0, 0.4), x1=st.floats(0.6, 1.0), y0=unit, y1=unit, a=unit)
def test_linear_two_point_form_is_affine(x0, x1, y0, y1, a):
    c = Linear(x0, y0, x1, y1)
    expected = y0 + (y1 - y0) * (a - x0) / (x1 - x0)
    assert math.isclose(c(a), expected, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=200, deadline=None)
@given(mid=st.floats(-0.5, 1.5), k=st.floats(0.5, 20.0), lo=st.floats(0, 0.5),
       rise=st.floats(0, 0.5))
def test_logistic_is_monotone_between_its_ends(mid, k, lo, rise):
    c = Logistic(mid, k, lo, lo + rise)
    v = c(np.linspace(0.0, 1.0, 101))
    assert np.all(np.diff(v) >= -1e-12)
    assert v.min() >= lo - 1e-12 and v.max() <= lo + rise + 1e-12
