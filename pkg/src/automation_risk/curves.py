"""One-dimensional curves on the automation axis A in [0, 1].

The same small set of shapes backs both harm-propagation curves
(probabilities, nondecreasing in A) and the automation / oversight cost
curves (nonnegative money, nonincreasing in A). Range and monotonicity are
checked by dense sampling in :func:`check_harm_curve` and
:func:`check_cost_curve`; the shapes themselves only know how to evaluate
and differentiate.

Every curve is an immutable dataclass that evaluates elementwise on floats
or numpy arrays.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from .errors import DomainError, InvalidCurveError, NondifferentiableError

SAMPLE_POINTS = 1001
_KINK_ATOL = 1e-12


def _scalar_or_array(values, a):
    if np.ndim(a) == 0:
        return float(values)
    return np.asarray(values, dtype=float)


class Curve(ABC):
    family: ClassVar[str]
    smooth: ClassVar[bool] = True

    @abstractmethod
    def __call__(self, a): ...

    @abstractmethod
    def derivative(self, a): ...

    @abstractmethod
    def second_derivative(self, a): ...

    @property
    @abstractmethod
    def convex(self) -> bool:
        """True when the curve is convex on [0, 1]."""

    @abstractmethod
    def steepened(self, factor: float) -> "Curve":
        """Return ``c(0) + factor * (c(a) - c(0))``: every slope times ``factor``."""

    @abstractmethod
    def scaled(self, factor: float) -> "Curve":
        """Return ``factor * c(a)``."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...


@dataclass(frozen=True)
class Linear(Curve):
    """Straight line through two anchor points.

    Stored in two-point form so that evaluating at an anchor returns the
    anchor value exactly.
    """

    x0: float
    y0: float
    x1: float
    y1: float

    family: ClassVar[str] = "linear"

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise InvalidCurveError("linear curve anchors need x0 < x1")

    @classmethod
    def from_slope(cls, intercept: float, slope: float) -> "Linear":
        return cls(0.0, intercept, 1.0, intercept + slope)

    @property
    def slope(self) -> float:
        return (self.y1 - self.y0) / (self.x1 - self.x0)

    def __call__(self, a):
        t = (np.asarray(a, dtype=float) - self.x0) / (self.x1 - self.x0)
        return _scalar_or_array(self.y0 + (self.y1 - self.y0) * t, a)

    def derivative(self, a):
        return _scalar_or_array(np.full(np.shape(a), self.slope), a)

    def second_derivative(self, a):
        return _scalar_or_array(np.zeros(np.shape(a)), a)

    @property
    def convex(self) -> bool:
        return True

    def steepened(self, factor):
        base = self(0.0)
        return Linear(self.x0, base + factor * (self.y0 - base),
                      self.x1, base + factor * (self.y1 - base))

    def scaled(self, factor):
        return Linear(self.x0, factor * self.y0, self.x1, factor * self.y1)

    def to_dict(self):
        return {"family": self.family, "points": [[self.x0, self.y0], [self.x1, self.y1]]}


@dataclass(frozen=True)
class Quadratic(Curve):
    """``c0 + c1*a + c2*a**2``."""

    c0: float
    c1: float
    c2: float

    family: ClassVar[str] = "quadratic"

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(self.c0 + (self.c1 + self.c2 * a) * a, a)

    def derivative(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(self.c1 + 2.0 * self.c2 * a, a)

    def second_derivative(self, a):
        return _scalar_or_array(np.full(np.shape(a), 2.0 * self.c2), a)

    @property
    def convex(self) -> bool:
        return self.c2 >= 0

    def steepened(self, factor):
        return Quadratic(self.c0, factor * self.c1, factor * self.c2)

    def scaled(self, factor):
        return Quadratic(factor * self.c0, factor * self.c1, factor * self.c2)

    def to_dict(self):
        return {"family": self.family, "c0": self.c0, "c1": self.c1, "c2": self.c2}


@dataclass(frozen=True)
class Exponential(Curve):
    """``offset + scale * exp(rate * a)``."""

    scale: float
    rate: float
    offset: float = 0.0

    family: ClassVar[str] = "exponential"

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(self.offset + self.scale * np.exp(self.rate * a), a)

    def derivative(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(self.scale * self.rate * np.exp(self.rate * a), a)

    def second_derivative(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(self.scale * self.rate**2 * np.exp(self.rate * a), a)

    @property
    def convex(self) -> bool:
        return self.scale >= 0 or self.rate == 0

    def steepened(self, factor):
        return Exponential(factor * self.scale, self.rate,
                           self.offset + (1.0 - factor) * self.scale)

    def scaled(self, factor):
        return Exponential(factor * self.scale, self.rate, factor * self.offset)

    def to_dict(self):
        return {"family": self.family, "scale": self.scale, "rate": self.rate,
                "offset": self.offset}


@dataclass(frozen=True)
class Logistic(Curve):
    """Logistic sigmoid rescaled so that c(0) == lo and c(1) == hi."""

    midpoint: float
    steepness: float
    lo: float
    hi: float

    family: ClassVar[str] = "logistic"

    def __post_init__(self):
        if not self.steepness > 0:
            raise InvalidCurveError("logistic steepness must be positive")

    def _sigmoid(self, a):
        return 1.0 / (1.0 + np.exp(-self.steepness * (a - self.midpoint)))

    @property
    def _span(self) -> float:
        return float(self._sigmoid(1.0) - self._sigmoid(0.0))

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        s0 = self._sigmoid(0.0)
        t = (self._sigmoid(a) - s0) / self._span
        return _scalar_or_array(self.lo + (self.hi - self.lo) * t, a)

    def derivative(self, a):
        s = self._sigmoid(np.asarray(a, dtype=float))
        k = self.steepness
        return _scalar_or_array((self.hi - self.lo) * k * s * (1.0 - s) / self._span, a)

    def second_derivative(self, a):
        s = self._sigmoid(np.asarray(a, dtype=float))
        k = self.steepness
        return _scalar_or_array(
            (self.hi - self.lo) * k * k * s * (1.0 - s) * (1.0 - 2.0 * s) / self._span, a)

    @property
    def convex(self) -> bool:
        # the sigmoid is convex left of its midpoint
        if self.hi == self.lo:
            return True
        if self.hi > self.lo:
            return self.midpoint >= 1.0
        return self.midpoint <= 0.0

    def steepened(self, factor):
        return Logistic(self.midpoint, self.steepness, self.lo,
                        self.lo + factor * (self.hi - self.lo))

    def scaled(self, factor):
        return Logistic(self.midpoint, self.steepness, factor * self.lo, factor * self.hi)

    def to_dict(self):
        return {"family": self.family, "midpoint": self.midpoint,
                "steepness": self.steepness, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Threshold(Curve):
    """Step function: ``lo`` for a < step, ``hi`` for a >= step."""

    step: float
    lo: float
    hi: float

    family: ClassVar[str] = "threshold"
    smooth: ClassVar[bool] = False

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        return _scalar_or_array(np.where(a < self.step, self.lo, self.hi), a)

    def _check(self, a):
        if np.any(np.abs(np.asarray(a, dtype=float) - self.step) <= _KINK_ATOL):
            raise NondifferentiableError(f"threshold curve has a step at A={self.step}")

    def derivative(self, a):
        self._check(a)
        return _scalar_or_array(np.zeros(np.shape(a)), a)

    def second_derivative(self, a):
        self._check(a)
        return _scalar_or_array(np.zeros(np.shape(a)), a)

    @property
    def convex(self) -> bool:
        return self.lo == self.hi

    def steepened(self, factor):
        return Threshold(self.step, self.lo, self.lo + factor * (self.hi - self.lo))

    def scaled(self, factor):
        return Threshold(self.step, factor * self.lo, factor * self.hi)

    def to_dict(self):
        return {"family": self.family, "step": self.step, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Table(Curve):
    """Piecewise-linear interpolation through ``(a, value)`` knots.

    Outside the first and last knot the curve is held at the end values.
    """

    knots: tuple[tuple[float, float], ...]

    family: ClassVar[str] = "table"
    smooth: ClassVar[bool] = False

    def __post_init__(self):
        knots = tuple((float(x), float(y)) for x, y in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise InvalidCurveError("table curve needs at least two knots")
        xs = [x for x, _ in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidCurveError("table knots must be strictly increasing in A")

    @property
    def _xs(self):
        return np.array([x for x, _ in self.knots])

    @property
    def _ys(self):
        return np.array([y for _, y in self.knots])

    def __call__(self, a):
        return _scalar_or_array(np.interp(np.asarray(a, dtype=float), self._xs, self._ys), a)

    def _segment_slopes(self):
        return np.diff(self._ys) / np.diff(self._xs)

    def derivative(self, a):
        a = np.asarray(a, dtype=float)
        xs = self._xs
        if np.any(np.min(np.abs(a[..., None] - xs), axis=-1) <= _KINK_ATOL):
            raise NondifferentiableError("table curve derivative requested at a knot")
        # segment index; 0 and len(xs) are the clamped flat ends
        idx = np.searchsorted(xs, a)
        slopes = np.concatenate([[0.0], self._segment_slopes(), [0.0]])
        return _scalar_or_array(slopes[idx], a)

    def second_derivative(self, a):
        self.derivative(a)
        return _scalar_or_array(np.zeros(np.shape(a)), a)

    @property
    def convex(self) -> bool:
        slopes = list(self._segment_slopes())
        if self.knots[0][0] > 0.0:
            slopes.insert(0, 0.0)
        if self.knots[-1][0] < 1.0:
            slopes.append(0.0)
        return all(b >= a for a, b in zip(slopes, slopes[1:]))

    def steepened(self, factor):
        base = self(0.0)
        return Table(tuple((x, base + factor * (y - base)) for x, y in self.knots))

    def scaled(self, factor):
        return Table(tuple((x, factor * y) for x, y in self.knots))

    def to_dict(self):
        return {"family": self.family, "knots": [[x, y] for x, y in self.knots]}


FAMILIES: dict[str, type[Curve]] = {
    cls.family: cls for cls in (Linear, Quadratic, Exponential, Logistic, Threshold, Table)
}


def curve_from_dict(spec: dict[str, Any]) -> Curve:
    """Build a curve from its dictionary form (inverse of ``Curve.to_dict``).

    Raises ``KeyError``/``TypeError`` with the offending key on malformed
    input; :mod:`automation_risk.config` turns those into field-path errors.
    """
    spec = dict(spec)
    family = spec.pop("family")
    if family not in FAMILIES:
        raise KeyError(f"unknown curve family {family!r}")
    if family == "linear":
        if "points" in spec:
            (x0, y0), (x1, y1) = spec.pop("points")
            _reject_extra(spec)
            return Linear(float(x0), float(y0), float(x1), float(y1))
        curve = Linear.from_slope(_num(spec.pop("intercept")), _num(spec.pop("slope")))
        _reject_extra(spec)
        return curve
    if family == "table":
        knots = tuple((_num(x), _num(y)) for x, y in spec.pop("knots"))
        _reject_extra(spec)
        return Table(knots)
    cls = FAMILIES[family]
    kwargs = {k: _num(v) for k, v in spec.items()}
    return cls(**kwargs)


def _num(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError(f"expected a number, got {v!r}")
    return float(v)


def _reject_extra(spec):
    if spec:
        raise TypeError(f"unexpected field(s): {', '.join(sorted(spec))}")


def _grid():
    return np.linspace(0.0, 1.0, SAMPLE_POINTS)


def check_harm_curve(curve: Curve) -> Curve:
    """Validate that ``curve`` is a probability, nondecreasing on [0, 1]."""
    values = curve(_grid())
    if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
        raise InvalidCurveError(
            f"harm curve leaves [0, 1] on A in [0, 1] (range {values.min():.6g}..{values.max():.6g})")
    if np.any(np.diff(values) < -_KINK_ATOL):
        raise InvalidCurveError("harm curve must be nondecreasing in A")
    return curve


def check_cost_curve(curve: Curve, direction: str = "nonincreasing", name: str = "cost") -> Curve:
    """Validate a cost curve: nonnegative and monotone in the declared sense."""
    if direction not in ("nonincreasing", "nondecreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    values = curve(_grid())
    if not np.all(np.isfinite(values)) or values.min() < 0.0:
        raise InvalidCurveError(f"{name} curve must be nonnegative on [0, 1]")
    steps = np.diff(values)
    tol = _KINK_ATOL * max(1.0, float(np.abs(values).max()))
    if direction == "nonincreasing" and np.any(steps > tol):
        raise InvalidCurveError(f"{name} curve must be nonincreasing in A")
    if direction == "nondecreasing" and np.any(steps < -tol):
        raise InvalidCurveError(f"{name} curve must be nondecreasing in A")
    return curve


def check_unit_interval(a: float, name: str = "a") -> float:
    a = float(a)
    if not (0.0 <= a <= 1.0) or math.isnan(a):
        raise DomainError(f"{name} must lie in [0, 1], got {a}")
    return a
