"""JSON configuration documents for the command line.

Parsing is strict: unknown keys are rejected so that a misspelt probability
field cannot silently fall back to a default. Type and shape problems raise
:class:`ConfigError`; values of the right type that violate a domain
invariant raise the library's :class:`~automation_risk.errors.DomainError`
with the field path prepended.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from typing import Any

from .core import AggregationRule, AutomationProfile, RiskModel, SeverityDistribution
from .curves import curve_from_dict
from .errors import AutomationRiskError, DomainError
from .optimize import BudgetProblem, CostModel, return_curve_from_dict
from .scenarios import Scenario
from .simulation import ObservationalConfig

SCHEMA_VERSIONS = ("1",)


class ConfigError(AutomationRiskError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class _Block:
    """Reads one JSON object, tracking the keys consumed."""

    def __init__(self, data, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path, "expected an object")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def sub(self, key):
        return f"{self.path}.{key}" if self.path else key

    def has(self, key) -> bool:
        return key in self.data

    def raw(self, key, required=True, default=None):
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self.sub(key), "missing required field")
            return default
        return self.data[key]

    def num(self, key, required=True, default=None) -> float | None:
        v = self.raw(key, required, default)
        if v is default and key not in self.data:
            return v
        if not _is_num(v):
            raise ConfigError(self.sub(key), f"expected a number, got {v!r}")
        return float(v)

    def integer(self, key, required=True, default=None) -> int | None:
        v = self.raw(key, required, default)
        if v is default and key not in self.data:
            return v
        if not _is_num(v) or float(v) != int(v):
            raise ConfigError(self.sub(key), f"expected an integer, got {v!r}")
        return int(v)

    def text(self, key, required=True, default=None) -> str | None:
        v = self.raw(key, required, default)
        if v is default and key not in self.data:
            return v
        if not isinstance(v, str):
            raise ConfigError(self.sub(key), f"expected a string, got {v!r}")
        return v

    def finish(self):
        extra = sorted(set(self.data) - self.seen)
        if extra:
            raise ConfigError(self.sub(extra[0]), "unknown field")


def _build(path, factory, *args, **kwargs):
    """Call a constructor, prefixing domain errors with the config path."""
    try:
        return factory(*args, **kwargs)
    except DomainError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _curve(data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a curve object")
    try:
        return _build(path, curve_from_dict, data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ConfigError(path, str(exc).strip("'\"")) from exc


def _return_curve(data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a return-curve object")
    try:
        return _build(path, return_curve_from_dict, data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(path, str(exc).strip("'\"")) from exc


def parse_risk(data, path="risk") -> RiskModel:
    b = _Block(data, path)
    p_failure = b.num("p_failure")
    severity_mean = b.num("severity_mean")
    curve = _curve(b.raw("harm_curve"), b.sub("harm_curve"))
    dist = None
    if b.has("severity_distribution"):
        d = _Block(b.raw("severity_distribution"), b.sub("severity_distribution"))
        family = d.text("family")
        sigma = d.num("sigma", required=False, default=0.0)
        d.finish()
        dist = _build(d.path, SeverityDistribution, family, severity_mean, sigma)
    b.finish()
    return _build(path, RiskModel, p_failure, curve, severity_mean, dist)


def risk_to_dict(risk: RiskModel) -> dict:
    out = {"p_failure": risk.p_failure, "severity_mean": risk.severity_mean,
           "harm_curve": risk.harm_curve.to_dict()}
    out["severity_distribution"] = risk.severity_distribution.to_dict()
    return out


def parse_automation(data, path="automation") -> tuple[AutomationProfile | float, AggregationRule]:
    b = _Block(data, path)
    if b.has("a") == b.has("profile"):
        raise ConfigError(path, "give exactly one of 'a' or 'profile'")
    if b.has("a"):
        a = b.num("a")
        rule = AggregationRule.MAX
        if b.has("rule"):
            raise ConfigError(b.sub("rule"), "rule only applies to a profile")
        b.finish()
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"{b.sub('a')}: a must lie in [0, 1], got {a}")
        return a, rule
    p = _Block(b.raw("profile"), b.sub("profile"))
    values = (p.num("a_decision"), p.num("a_override"), p.num("a_detection"))
    p.finish()
    rule_name = b.text("rule", required=False, default="max")
    try:
        rule = AggregationRule(rule_name)
    except ValueError:
        raise ConfigError(b.sub("rule"), f"unknown rule {rule_name!r}") from None
    b.finish()
    return _build(p.path, AutomationProfile, *values), rule


def automation_to_dict(automation, rule) -> dict:
    if isinstance(automation, AutomationProfile):
        return {"profile": {"a_decision": automation.a_decision,
                            "a_override": automation.a_override,
                            "a_detection": automation.a_detection},
                "rule": AggregationRule(rule).value}
    return {"a": automation}


def parse_costs(data, path="costs") -> CostModel:
    b = _Block(data, path)
    c_auto = _curve(b.raw("c_auto"), b.sub("c_auto"))
    c_over = _curve(b.raw("c_oversight"), b.sub("c_oversight"))
    b.finish()
    return _build(path, CostModel, c_auto, c_over)


def parse_budget(data, path="budget") -> BudgetProblem:
    b = _Block(data, path)
    values = dict(budget=b.num("budget"), cost_f=b.num("cost_f"), cost_a=b.num("cost_a"),
                  curve_f=_return_curve(b.raw("curve_f"), b.sub("curve_f")),
                  curve_a=_return_curve(b.raw("curve_a"), b.sub("curve_a")),
                  severity_mean=b.num("severity_mean"))
    b.finish()
    return _build(path, BudgetProblem, **values)


_VALIDATION_FIELDS = {f.name: f for f in dataclasses.fields(ObservationalConfig) if f.name != "seed"}
_VALIDATION_INTS = {"n", "n_groups", "n_periods"}


def parse_validation(data, path="validation") -> ObservationalConfig:
    b = _Block(data, path)
    values = {}
    for name in _VALIDATION_FIELDS:
        if b.has(name):
            values[name] = b.integer(name) if name in _VALIDATION_INTS else b.num(name)
    if b.has("seed"):
        raise ConfigError(b.sub("seed"), "seeds are passed with --seed, not in the config")
    b.finish()
    return _build(path, ObservationalConfig, **values)


@dataclass(frozen=True)
class SimulationBlock:
    n: int | None = None


@dataclass(frozen=True)
class ConfigDocument:
    schema_version: str
    risk: RiskModel | None = None
    automation: AutomationProfile | float | None = None
    rule: AggregationRule = AggregationRule.MAX
    decision_volume: float | None = None
    period_label: str = "period"
    costs: CostModel | None = None
    budget: BudgetProblem | None = None
    scenarios: tuple[Scenario, ...] = ()
    simulation: SimulationBlock | None = None
    validation: ObservationalConfig | None = None

    def scenario(self, name: str) -> Scenario:
        for s in self.scenarios:
            if s.name == name:
                return s
        known = ", ".join(s.name for s in self.scenarios) or "none"
        raise ConfigError("scenarios", f"unknown scenario {name!r} (known: {known})")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"schema_version": self.schema_version}
        if self.risk is not None:
            out["risk"] = risk_to_dict(self.risk)
        if self.automation is not None:
            out["automation"] = automation_to_dict(self.automation, self.rule)
        if self.decision_volume is not None:
            out["decision_volume"] = self.decision_volume
        out["period_label"] = self.period_label
        if self.costs is not None:
            out["costs"] = {"c_auto": self.costs.c_auto.to_dict(),
                            "c_oversight": self.costs.c_oversight.to_dict()}
        if self.budget is not None:
            bp = self.budget
            out["budget"] = {"budget": bp.budget, "cost_f": bp.cost_f, "cost_a": bp.cost_a,
                             "curve_f": bp.curve_f.to_dict(), "curve_a": bp.curve_a.to_dict(),
                             "severity_mean": bp.severity_mean}
        if self.scenarios:
            out["scenarios"] = [
                {"name": s.name, "risk": risk_to_dict(s.risk),
                 "automation": automation_to_dict(s.automation, s.rule),
                 "decision_volume": s.decision_volume, "period_label": s.period_label}
                for s in self.scenarios]
        if self.simulation is not None:
            out["simulation"] = {} if self.simulation.n is None else {"n": self.simulation.n}
        if self.validation is not None:
            out["validation"] = {k: getattr(self.validation, k) for k in _VALIDATION_FIELDS}
        return out

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _parse_scenario(data, path, top_risk_raw, top_automation, top_volume, top_period):
    b = _Block(data, path)
    name = b.text("name")
    risk_raw = b.raw("risk", required=False, default=None)
    if risk_raw is None and top_risk_raw is None:
        raise ConfigError(b.sub("risk"), "missing (no top-level risk block to inherit)")
    if risk_raw is not None and not isinstance(risk_raw, dict):
        raise ConfigError(b.sub("risk"), "expected an object")
    merged = {**(top_risk_raw or {}), **(risk_raw or {})}
    risk = parse_risk(merged, b.sub("risk"))
    if b.has("automation"):
        automation, rule = parse_automation(b.raw("automation"), b.sub("automation"))
    elif top_automation is not None:
        automation, rule = top_automation
    else:
        raise ConfigError(b.sub("automation"), "missing (no top-level automation block to inherit)")
    volume = b.num("decision_volume", required=False, default=top_volume)
    period = b.text("period_label", required=False, default=top_period)
    b.finish()
    return _build(path, Scenario, name, risk, automation, rule,
                  1.0 if volume is None else volume, period)


def parse_document(data: Any) -> ConfigDocument:
    if not isinstance(data, dict):
        raise ConfigError("", "config must be a JSON object")
    b = _Block(data, "")
    version = b.text("schema_version")
    if version not in SCHEMA_VERSIONS:
        raise ConfigError("schema_version", f"unsupported version {version!r}")
    risk_raw = b.raw("risk", required=False)
    risk = parse_risk(risk_raw) if risk_raw is not None else None
    automation = None
    if b.has("automation"):
        automation = parse_automation(b.raw("automation"))
    volume = b.num("decision_volume", required=False)
    if volume is not None and volume < 0:
        raise DomainError(f"decision_volume: must be nonnegative, got {volume}")
    period = b.text("period_label", required=False, default="period")
    costs = parse_costs(b.raw("costs")) if b.has("costs") else None
    budget = parse_budget(b.raw("budget")) if b.has("budget") else None
    scenarios = ()
    if b.has("scenarios"):
        raw = b.raw("scenarios")
        if not isinstance(raw, list):
            raise ConfigError("scenarios", "expected a list")
        scenarios = tuple(_parse_scenario(item, f"scenarios[{i}]", risk_raw, automation,
                                          volume, period) for i, item in enumerate(raw))
        names = [s.name for s in scenarios]
        if len(set(names)) != len(names):
            raise ConfigError("scenarios", "scenario names must be unique")
    simulation = None
    if b.has("simulation"):
        s = _Block(b.raw("simulation"), "simulation")
        simulation = SimulationBlock(s.integer("n", required=False))
        s.finish()
    validation = parse_validation(b.raw("validation")) if b.has("validation") else None
    b.finish()
    a, rule = automation if automation is not None else (None, AggregationRule.MAX)
    return ConfigDocument(version, risk, a, rule, volume, period, costs, budget, scenarios,
                          simulation, validation)


def load_config(path) -> ConfigDocument:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
                              f"{exc.msg}") from exc
    return parse_document(data)
