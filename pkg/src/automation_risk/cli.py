"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 domain error,
4 estimation failure. JSON output is deterministic: identical config,
flags and seed give byte-identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
from typing import Any, Sequence

from . import __version__
from .config import ConfigDocument, ConfigError, load_config
from .errors import DomainError, EstimationError
from .estimators import estimate_did, estimate_iv_2sls, estimate_ols, estimate_rd
from .optimize import allocate_budget, efficient_frontier, optimal_automation
from .scenarios import Scenario, counterfactual, evaluate_scenario, roi
from .sensitivity import e_value, manski_bounds, power_analysis
from .simulation import SimConfig, generate_observational, simulate_incidents

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ESTIMATION = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _money(x: float) -> str:
    return f"{x:,.2f}"


def _clean(value):
    """JSON-safe copy: NaN/inf become null, tuples become lists."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _digest(payload: Any) -> str:
    canonical = json.dumps(_clean(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclasses.dataclass
class Report:
    command: str
    inputs_digest: str
    body: dict
    warnings: list[str] = dataclasses.field(default_factory=list)
    text_lines: list[str] = dataclasses.field(default_factory=list)
    csv_rows: list[dict] | None = None

    def envelope(self) -> dict:
        return {"command": self.command, "inputs_digest": self.inputs_digest,
                "body": _clean(self.body), "warnings": list(self.warnings)}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.envelope(), sort_keys=True, indent=2) + "\n"
        if fmt == "csv":
            if not self.csv_rows:
                raise UsageError(f"{self.command} has no CSV output")
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=list(self.csv_rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in self.csv_rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
            return buf.getvalue()
        lines = list(self.text_lines)
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


def _require(doc: ConfigDocument, block: str):
    if getattr(doc, block) is None:
        raise ConfigError(block, "block required by this command is missing")
    return getattr(doc, block)


# ------------------------------------------------------------------ commands

def cmd_decompose(args) -> Report:
    doc = load_config(args.config)
    risk = _require(doc, "risk")
    if args.a is not None:
        automation, rule = args.a, doc.rule
    elif doc.automation is not None:
        automation, rule = doc.automation, doc.rule
    else:
        raise ConfigError("automation", "missing; give an automation block or --a")
    scenario = Scenario("config", risk, automation, rule,
                        doc.decision_volume if doc.decision_volume is not None else 1.0,
                        doc.period_label)
    rep = evaluate_scenario(scenario)
    body = {"p_failure": rep.p_failure, "harm_probability": rep.harm_probability,
            "severity_mean": rep.severity_mean, "a_effective": rep.a_effective,
            "loss_per_decision": rep.loss_per_decision}
    text = [
        f"P(F)            = {rep.p_failure:g}",
        f"A (effective)   = {rep.a_effective:g}",
        f"P(H|F,A)        = {rep.harm_probability:g}",
        f"E[S|H]          = {_money(rep.severity_mean)}",
        f"loss / decision = {_money(rep.loss_per_decision)}",
    ]
    if doc.decision_volume is not None:
        body.update(decision_volume=doc.decision_volume, period_label=doc.period_label,
                    loss_per_period=rep.loss_per_period,
                    expected_incidents_per_period=rep.expected_incidents_per_period)
        text += [f"loss / {doc.period_label} = {_money(rep.loss_per_period)}",
                 f"incidents / {doc.period_label} = {rep.expected_incidents_per_period:g}"]
    warnings = ["degenerate: no failure risk"] if risk.p_failure == 0 else []
    digest = _digest({"config": doc.to_dict(), "a": args.a})
    return Report("decompose", digest, body, warnings, text, [body])


def _scenario_body(rep) -> dict:
    return {"name": rep.name, "a_effective": rep.a_effective, "p_failure": rep.p_failure,
            "harm_probability": rep.harm_probability, "severity_mean": rep.severity_mean,
            "loss_per_decision": rep.loss_per_decision, "loss_per_period": rep.loss_per_period,
            "expected_incidents_per_period": rep.expected_incidents_per_period}


def cmd_counterfactual(args) -> Report:
    doc = load_config(args.config)
    cf = counterfactual(doc.scenario(args.baseline), doc.scenario(args.intervention))
    pct = f"{100.0 * cf.relative_reduction:.1f}%"
    body = {"baseline": _scenario_body(cf.baseline),
            "intervention": _scenario_body(cf.intervention),
            "absolute_delta": cf.absolute_delta, "relative_reduction": cf.relative_reduction,
            "relative_reduction_display": pct}
    period = cf.baseline.period_label
    text = [
        f"baseline     {cf.baseline.name}: loss / {period} = {_money(cf.baseline.loss_per_period)}",
        f"intervention {cf.intervention.name}: loss / {period} = "
        f"{_money(cf.intervention.loss_per_period)}",
        f"reduction    {_money(cf.absolute_delta)} ({pct})",
    ]
    if args.intervention_cost is not None:
        r = roi(cf, args.intervention_cost)
        body["roi"] = dataclasses.asdict(r)
        text.append(f"ROI          net {_money(r.net_benefit)} on cost "
                    f"{_money(r.intervention_cost)}: {r.roi_multiple:g}x")
    digest = _digest({"config": doc.to_dict(), "baseline": args.baseline,
                      "intervention": args.intervention, "cost": args.intervention_cost})
    return Report("counterfactual", digest, body, [], text)


def cmd_allocate(args) -> Report:
    doc = load_config(args.config)
    problem = _require(doc, "budget")
    res = allocate_budget(problem)
    body = dataclasses.asdict(res)
    body["budget"] = problem.budget
    text = [
        f"x_f (failure-rate spend)  = {res.x_f:.6g}",
        f"x_a (deployment controls) = {res.x_a:.6g}",
        f"expected loss             = {_money(res.expected_loss)}",
        f"FOC gap                   = {res.foc_gap:.3g}",
        f"corner                    = {str(res.corner).lower()}",
    ]
    return Report("allocate", _digest({"config": doc.to_dict()}), body, [], text)


def cmd_frontier(args) -> Report:
    doc = load_config(args.config)
    costs = _require(doc, "costs")
    risk = _require(doc, "risk")
    points = efficient_frontier(costs, risk, args.grid)
    rows = [dataclasses.asdict(p) for p in points]
    body: dict = {"grid": args.grid, "n_frontier": len(points), "points": rows}
    text = [f"{len(points)} of {args.grid} grid points on the efficient frontier"]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["a", "total_cost", "expected_loss"])
            for p in points:
                writer.writerow([repr(p.a), repr(p.total_cost), repr(p.expected_loss)])
        text.append(f"frontier written to {args.out}")
    if not args.no_optimum:
        opt = optimal_automation(costs, risk)
        body["optimum"] = dataclasses.asdict(opt)
        text.append(f"A* = {opt.a_star:.4f}  TC(A*) = {_money(opt.total_cost)}"
                    f"  second-order ok = {str(opt.second_order_ok).lower()}")
    digest = _digest({"config": doc.to_dict(), "grid": args.grid, "optimum": not args.no_optimum})
    return Report("frontier", digest, body, [], text)


def cmd_simulate(args) -> Report:
    doc = load_config(args.config)
    risk = _require(doc, "risk")
    if doc.automation is None:
        raise ConfigError("automation", "block required by this command is missing")
    n = args.n if args.n is not None else (doc.simulation.n if doc.simulation else None)
    if n is None:
        raise ConfigError("simulation.n", "missing; give --n or a simulation block")
    scenario = Scenario("sim", risk, doc.automation, doc.rule)
    cfg = SimConfig(risk, scenario.a_effective, n, args.seed)
    res = simulate_incidents(cfg)
    band = (res.analytic_loss - 3 * res.std_error, res.analytic_loss + 3 * res.std_error)
    body = {"n": n, "seed": args.seed, "a_effective": cfg.a_level,
            "analytic_loss": res.analytic_loss, "empirical_loss": res.mean_loss,
            "std_error": res.std_error, "band_3se": list(band),
            "within_band": band[0] <= res.mean_loss <= band[1],
            "n_failed": res.n_failed, "p_harm_given_failure": res.p_harm_given_failure,
            "p_exec_given_failure": res.p_exec_given_failure}
    if args.records_out:
        res.dataset.to_csv(args.records_out)
    text = [
        f"analytic loss / decision  = {_money(res.analytic_loss)}",
        f"empirical loss / decision = {_money(res.mean_loss)}  (n = {n:,}, seed = {args.seed})",
        f"3 s.e. band               = [{_money(band[0])}, {_money(band[1])}]",
        f"empirical P(H|F) = {res.p_harm_given_failure:.6f}   P(U|F) = {res.p_exec_given_failure:.6f}",
    ]
    warnings = ["degenerate: no failure risk"] if risk.p_failure == 0 else []
    digest = _digest({"config": doc.to_dict(), "n": n, "seed": args.seed})
    return Report("simulate", digest, body, warnings, text)


_ESTIMATORS = {"ols": "true_gradient", "iv": "true_gradient", "did": "did_effect", "rd": "rd_jump"}


def cmd_validate(args) -> Report:
    doc = load_config(args.config)
    block = _require(doc, "validation")
    cfg = dataclasses.replace(block, seed=args.seed)
    ds = generate_observational(cfg)
    if args.data_out:
        ds.to_csv(args.data_out)
    if args.method == "ols":
        est = estimate_ols(ds, "harmed", ["a_level"])
    elif args.method == "iv":
        est = estimate_iv_2sls(ds)
    elif args.method == "did":
        est = estimate_did(ds)
    else:
        est = estimate_rd(ds, args.bandwidth)
    truth_field = _ESTIMATORS[args.method]
    body = {"method": est.method, "point": est.point, "std_error": est.std_error,
            "n_used": est.n_used, "configured_value": getattr(cfg, truth_field),
            "configured_field": truth_field, **est.diagnostics}
    text = [f"{est.method}: {est.point:.6f} (s.e. {est.std_error:.6f}, n = {est.n_used:,})",
            f"configured {truth_field} = {getattr(cfg, truth_field):g}"]
    if "first_stage_f" in est.diagnostics:
        text.append(f"first-stage F = {est.diagnostics['first_stage_f']:.1f}")
    digest = _digest({"config": doc.to_dict(), "method": args.method, "seed": args.seed,
                      "bandwidth": args.bandwidth})
    return Report("validate", digest, body, list(ds.warnings), text)


def cmd_sensitivity(args) -> Report:
    if args.evalue is not None:
        value = e_value(args.evalue)
        body = {"mode": "evalue", "rr": args.evalue, "e_value": value}
        text = [f"E-value for RR = {args.evalue:g}: {value:.4f}"]
    else:
        p_hat, rho = args.manski
        b = manski_bounds(p_hat, rho)
        body = {"mode": "manski", "p_hat": p_hat, "rho": rho, "lower": b.lower, "upper": b.upper}
        text = [f"Manski bounds for p_hat = {p_hat:g}, rho = {rho:g}: [{b.lower:.4f}, {b.upper:.4f}]"]
    return Report("sensitivity", _digest(body), body, [], text)


def cmd_power(args) -> Report:
    power = power_analysis(args.gradient, args.n_low, args.n_total, args.alpha,
                           args.base_rate, args.reps, args.seed)
    half_width = 1.96 * math.sqrt(power * (1.0 - power) / args.reps)
    inputs = {"gradient": args.gradient, "n_low": args.n_low, "n_total": args.n_total,
              "alpha": args.alpha, "base_rate": args.base_rate, "reps": args.reps,
              "seed": args.seed}
    body = {**inputs, "power": power, "mc_half_width": half_width}
    text = [f"power = {power:.4f} +- {half_width:.4f} "
            f"({args.gradient:g}x gradient, n_low = {args.n_low}, n_total = {args.n_total}, "
            f"alpha = {args.alpha:g}, {args.reps} reps)"]
    return Report("power", _digest(inputs), body, [], text)


# ------------------------------------------------------------------- parsing

def _grid_size(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError("grid must be >= 2")
    return value


def _reps(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 100:
        raise argparse.ArgumentTypeError("reps must be >= 100")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="automation-risk",
        description="Expected-loss decomposition, automation policy optimisation and "
                    "validation tooling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, config=True, formats=("text", "json")):
        p = sub.add_parser(name, help=help_)
        if config:
            p.add_argument("config", help="JSON config file")
        p.add_argument("--format", choices=formats, default="text")
        p.set_defaults(func=func)
        return p

    p = add("decompose", cmd_decompose, "P(F) x P(H|F,A) x E[S|H] for the configured system",
            formats=("text", "json", "csv"))
    p.add_argument("--a", type=float, help="override the automation level")

    p = add("counterfactual", cmd_counterfactual, "compare two named scenarios")
    p.add_argument("--baseline", required=True)
    p.add_argument("--intervention", required=True)
    p.add_argument("--intervention-cost", type=float, help="per-period cost, adds an ROI line")

    add("allocate", cmd_allocate, "split the validation budget")

    p = add("frontier", cmd_frontier, "efficient frontier and cost-minimising A*")
    p.add_argument("--grid", type=_grid_size, default=101)
    p.add_argument("--out", help="write frontier points to this CSV")
    p.add_argument("--no-optimum", action="store_true", help="skip the A* search")

    p = add("simulate", cmd_simulate, "Monte Carlo check of the decomposition")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--records-out", help="write simulated records to this CSV")

    p = add("validate", cmd_validate, "run an estimator on a synthetic observational dataset")
    p.add_argument("--method", choices=sorted(_ESTIMATORS), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bandwidth", type=float, default=0.5)
    p.add_argument("--data-out", help="write the generated dataset to this CSV")

    p = add("sensitivity", cmd_sensitivity, "E-value or selection bounds", config=False)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--evalue", type=float, metavar="RR")
    mode.add_argument("--manski", type=float, nargs=2, metavar=("P_HAT", "RHO"))

    p = add("power", cmd_power, "simulated power of the automation-gradient test", config=False)
    p.add_argument("--gradient", type=float, default=3.0)
    p.add_argument("--n-low", type=int, default=75)
    p.add_argument("--n-total", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--base-rate", type=float, default=0.1)
    p.add_argument("--reps", type=_reps, default=2000)
    p.add_argument("--seed", type=int, required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
        sys.stdout.write(report.render(args.format))
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
