"""Cost-minimising automation level, validation-budget allocation and the
cost / risk efficient frontier.

Solvers here are deliberately plain: scan a grid for a sign change of the
first-order condition, then bisect. They are slow by optimisation-library
standards and fast enough for one-dimensional problems, and they never
silently return a local optimum without comparing it against the
boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .core import RiskModel, expected_loss
from .curves import Curve, check_cost_curve, check_unit_interval
from .errors import DomainError, InvalidCurveError, UnsupportedCurveError

BRACKET_POINTS = 1000
CHECK_POINTS = 10_000
DEFAULT_TOL = 1e-8
OBJECTIVE_RTOL = 1e-6
SECOND_ORDER_FLOOR = -1e-9


@dataclass(frozen=True)
class CostModel:
    """Direct automation cost and human-oversight cost per decision.

    Both curves must be nonnegative and nonincreasing in A: automation gets
    cheaper as it scales up, oversight gets cheaper as it is withdrawn.
    """

    c_auto: Curve
    c_oversight: Curve

    def __post_init__(self):
        check_cost_curve(self.c_auto, "nonincreasing", "c_auto")
        check_cost_curve(self.c_oversight, "nonincreasing", "c_oversight")


def _loss_vec(risk: RiskModel, a):
    return risk.p_failure * (risk.harm_curve(a) * risk.severity_mean)


def _tc_vec(costs: CostModel, risk: RiskModel, a):
    return costs.c_auto(a) + costs.c_oversight(a) + _loss_vec(risk, a)


def _dtc(costs: CostModel, risk: RiskModel, a):
    return (costs.c_auto.derivative(a) + costs.c_oversight.derivative(a)
            + risk.p_failure * (risk.harm_curve.derivative(a) * risk.severity_mean))


def _d2tc(costs: CostModel, risk: RiskModel, a):
    return (costs.c_auto.second_derivative(a) + costs.c_oversight.second_derivative(a)
            + risk.p_failure * (risk.harm_curve.second_derivative(a) * risk.severity_mean))


def total_cost(costs: CostModel, risk: RiskModel, a: float) -> float:
    """Automation cost + oversight cost + expected loss at automation level ``a``."""
    a = check_unit_interval(a)
    return float(costs.c_auto(a)) + float(costs.c_oversight(a)) + expected_loss(risk, a)


def bisect_root(func: Callable[[float], float], lo: float, hi: float, tol: float,
                max_iter: int = 200) -> float:
    """Root of ``func`` in [lo, hi] assuming ``func(lo) < 0 <= func(hi)``.

    Stops once the bracket is narrower than ``tol`` and the residual at its
    midpoint is within ``tol`` too, or when the bracket cannot be split
    further in floating point.
    """
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = func(mid)
        if (hi - lo <= tol and abs(value) <= tol) or mid in (lo, hi):
            break
        if value < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _upcrossings(values: np.ndarray) -> np.ndarray:
    # index i where the derivative goes from negative to nonnegative: local minima
    return np.flatnonzero((values[:-1] < 0.0) & (values[1:] >= 0.0))


def _pick(candidates: list[float], objective: Callable[[float], float]) -> float:
    """Lowest-objective candidate; near-ties go to the smallest argument."""
    values = [objective(c) for c in candidates]
    best = min(values)
    slack = 1e-12 * max(1.0, abs(best))
    return min(c for c, v in zip(candidates, values) if v <= best + slack)


@dataclass(frozen=True)
class OptimalAutomation:
    a_star: float
    total_cost: float
    foc_residual: float
    second_derivative: float
    second_order_ok: bool
    boundary: bool
    global_ok: bool


def optimal_automation(costs: CostModel, risk: RiskModel,
                       tol: float = DEFAULT_TOL) -> OptimalAutomation:
    """Automation level minimising total cost.

    The first-order condition is bracketed on a 1,000-point grid and refined
    by bisection to ``tol`` in A. Interior minima compete with both
    boundaries; a flat objective resolves to A = 0.
    """
    for name, curve in (("c_auto", costs.c_auto), ("c_oversight", costs.c_oversight),
                        ("harm_curve", risk.harm_curve)):
        if not curve.smooth:
            raise UnsupportedCurveError(
                f"{name} uses the nondifferentiable {curve.family!r} family")

    def dtc(a):
        return float(_dtc(costs, risk, a))

    def tc(a):
        return float(_tc_vec(costs, risk, a))

    grid = np.linspace(0.0, 1.0, BRACKET_POINTS)
    slopes = _dtc(costs, risk, grid)
    candidates = [0.0, 1.0]
    for i in _upcrossings(slopes):
        candidates.append(bisect_root(dtc, float(grid[i]), float(grid[i + 1]), tol))
    a_star = _pick(sorted(candidates), tc)

    check_grid = np.linspace(0.0, 1.0, CHECK_POINTS)
    grid_min = float(np.min(_tc_vec(costs, risk, check_grid)))
    best = tc(a_star)
    curvature = float(_d2tc(costs, risk, a_star))
    return OptimalAutomation(
        a_star=a_star,
        total_cost=best,
        foc_residual=dtc(a_star),
        second_derivative=curvature,
        second_order_ok=curvature >= SECOND_ORDER_FLOOR,
        boundary=a_star in (0.0, 1.0),
        global_ok=best <= grid_min + OBJECTIVE_RTOL * max(1.0, abs(grid_min)),
    )


@dataclass(frozen=True)
class FrontierPoint:
    a: float
    total_cost: float
    expected_loss: float


def efficient_frontier(costs: CostModel, risk: RiskModel, grid_size: int) -> list[FrontierPoint]:
    """Non-dominated (total cost, expected loss) pairs on an equispaced A grid.

    A point is dropped when another grid point is no worse in both
    coordinates and strictly better in one, so exact duplicates of a
    frontier point stay on the frontier. The result is sorted by ``a``.
    """
    if int(grid_size) != grid_size or grid_size < 2:
        raise DomainError("grid must be >= 2")
    a = np.linspace(0.0, 1.0, int(grid_size))
    tc = _tc_vec(costs, risk, a)
    loss = _loss_vec(risk, a)
    order = np.lexsort((a, loss, tc))
    keep = []
    best_loss = np.inf
    for i in order:
        if loss[i] < best_loss:
            keep.append(i)
            best_loss = loss[i]
        elif tc[i] == tc[keep[-1]] and loss[i] == loss[keep[-1]]:
            keep.append(i)
    keep.sort()
    return [FrontierPoint(float(a[i]), float(tc[i]), float(loss[i])) for i in keep]


@dataclass(frozen=True)
class StaticsRow:
    parameter: str
    factor: float
    a_star_before: float
    a_star_after: float
    direction_ok: bool


DEFAULT_BUMPS = {"severity_mean": 2.0, "p_failure": 2.0, "harm_slope": 2.0, "oversight_cost": 0.5}


def _bumped(costs: CostModel, risk: RiskModel, parameter: str, factor: float):
    if parameter == "severity_mean":
        return costs, risk.replace(severity_mean=risk.severity_mean * factor)
    if parameter == "p_failure":
        return costs, risk.replace(p_failure=risk.p_failure * factor)
    if parameter == "harm_slope":
        return costs, risk.replace(harm_curve=risk.harm_curve.steepened(factor))
    if parameter == "oversight_cost":
        return CostModel(costs.c_auto, costs.c_oversight.scaled(factor)), risk
    raise DomainError(f"unknown comparative-statics parameter {parameter!r}")


def comparative_statics_report(costs: CostModel, risk: RiskModel,
                               bumps: Mapping[str, float] | None = None,
                               tol: float = DEFAULT_TOL) -> list[StaticsRow]:
    """Re-solve for A* under multiplicative parameter bumps.

    Raising severity, failure probability or the harm slope should never
    raise A*; neither should making oversight cheaper. ``direction_ok``
    records whether the solver agrees (up to twice the bisection tolerance).
    """
    bumps = DEFAULT_BUMPS if bumps is None else bumps
    before = optimal_automation(costs, risk, tol).a_star
    rows = []
    for parameter, factor in bumps.items():
        try:
            bumped_costs, bumped_risk = _bumped(costs, risk, parameter, float(factor))
        except InvalidCurveError as exc:
            raise DomainError(f"bump {parameter} x{factor} gives an invalid curve: {exc}") from exc
        after = optimal_automation(bumped_costs, bumped_risk, tol).a_star
        # more risk pushes A* down; for oversight, a factor below 1 is cheaper oversight
        expect_down = factor >= 1.0 if parameter != "oversight_cost" else factor <= 1.0
        if factor == 1.0:
            ok = abs(after - before) <= 2 * tol
        elif expect_down:
            ok = after <= before + 2 * tol
        else:
            ok = after >= before - 2 * tol
        rows.append(StaticsRow(parameter, float(factor), before, after, ok))
    return rows


# ---------------------------------------------------------------- budget split

@dataclass(frozen=True)
class Hyperbolic:
    """``p0 / (1 + k x)``: diminishing returns to spending ``x``."""

    p0: float
    k: float

    family = "hyperbolic"

    def __post_init__(self):
        if not (self.p0 > 0 and self.k > 0):
            raise DomainError("hyperbolic return curve needs p0 > 0 and k > 0")

    def __call__(self, x):
        return self.p0 / (1.0 + self.k * x)

    def derivative(self, x):
        return -self.p0 * self.k / (1.0 + self.k * x) ** 2

    def to_dict(self):
        return {"family": self.family, "p0": self.p0, "k": self.k}


@dataclass(frozen=True)
class ExponentialFloor:
    """``floor + (p0 - floor) exp(-k x)``: decays toward an irreducible floor."""

    p0: float
    k: float
    floor: float

    family = "exponential_floor"

    def __post_init__(self):
        if not (self.p0 > 0 and self.k > 0 and 0 < self.floor < self.p0):
            raise DomainError("exponential_floor return curve needs p0 > floor > 0 and k > 0")

    def __call__(self, x):
        return self.floor + (self.p0 - self.floor) * np.exp(-self.k * x)

    def derivative(self, x):
        return -self.k * (self.p0 - self.floor) * np.exp(-self.k * x)

    def to_dict(self):
        return {"family": self.family, "p0": self.p0, "k": self.k, "floor": self.floor}


ReturnCurve = Hyperbolic | ExponentialFloor


def return_curve_from_dict(spec: Mapping) -> ReturnCurve:
    spec = dict(spec)
    family = spec.pop("family")
    cls = {"hyperbolic": Hyperbolic, "exponential_floor": ExponentialFloor}.get(family)
    if cls is None:
        raise KeyError(f"unknown return-curve family {family!r}")
    for k, v in spec.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TypeError(f"{k}: expected a number, got {v!r}")
    return cls(**{k: float(v) for k, v in spec.items()})


@dataclass(frozen=True)
class BudgetProblem:
    """Split budget B between lowering P(F) (``x_f``) and lowering P(H|F,A) (``x_a``).

    ``curve_f`` maps spend on model validation to P(F), ``curve_a`` maps
    spend on deployment controls to P(H|F,A). Spending obeys
    ``cost_f * x_f + cost_a * x_a == budget``.
    """

    budget: float
    cost_f: float
    cost_a: float
    curve_f: ReturnCurve
    curve_a: ReturnCurve
    severity_mean: float

    def __post_init__(self):
        if not self.budget >= 0:
            raise DomainError("budget must be nonnegative")
        for name in ("cost_f", "cost_a", "severity_mean"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def x_a_for(self, x_f):
        return np.maximum((self.budget - self.cost_f * x_f) / self.cost_a, 0.0)

    def loss(self, x_f, x_a):
        return self.curve_f(x_f) * self.curve_a(x_a) * self.severity_mean


@dataclass(frozen=True)
class AllocationResult:
    x_f: float
    x_a: float
    expected_loss: float
    foc_gap: float
    corner: bool


def _foc_terms(problem: BudgetProblem, x_f):
    x_a = problem.x_a_for(x_f)
    left = problem.curve_a(x_a) * problem.curve_f.derivative(x_f) / problem.cost_f
    right = problem.curve_f(x_f) * problem.curve_a.derivative(x_a) / problem.cost_a
    return left, right


def allocate_budget(problem: BudgetProblem, tol: float = 1e-12) -> AllocationResult:
    """Loss-minimising split of the validation budget.

    Searches along the budget line over ``x_f`` in [0, B / c_F]. Where the
    equal-marginal-return condition changes sign an interior solution is
    refined by bisection (``tol`` is relative to B / c_F); otherwise the
    better corner wins. ``foc_gap`` is the residual of that condition
    normalised by the larger of its two sides.
    """
    x_max = problem.budget / problem.cost_f

    def residual(x_f):
        left, right = _foc_terms(problem, x_f)
        return float(left - right)

    def loss_at(x_f):
        return float(problem.loss(x_f, problem.x_a_for(x_f)))

    candidates = [0.0, x_max]
    if x_max > 0:
        grid = np.linspace(0.0, x_max, BRACKET_POINTS)
        left, right = _foc_terms(problem, grid)
        for i in _upcrossings(left - right):
            candidates.append(bisect_root(residual, float(grid[i]), float(grid[i + 1]),
                                          tol * x_max))
    x_f = _pick(sorted(candidates), loss_at)
    x_a = float(problem.x_a_for(x_f))
    left, right = _foc_terms(problem, x_f)
    scale = max(abs(float(left)), abs(float(right)))
    gap = float(left - right) / scale if scale > 0 else 0.0
    return AllocationResult(
        x_f=x_f,
        x_a=x_a,
        expected_loss=loss_at(x_f),
        foc_gap=gap,
        corner=x_f in (0.0, x_max),
    )
