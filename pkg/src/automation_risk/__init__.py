"""Automation risk: expected loss as P(F) x P(H|F,A) x E[S|H].

The public API re-exports the pieces most analyses need; submodules hold
the rest.
"""
from .core import (AggregationRule, AutomationProfile, HarmPosterior, RiskModel,
                   SeverityDistribution, aggregate_automation, bayes_update_harm,
                   expected_loss, harm_probability, loss_gradient, risk_elasticity)
from .curves import Exponential, Linear, Logistic, Quadratic, Table, Threshold
from .estimators import (EstimateReport, estimate_did, estimate_iv_2sls, estimate_ols,
                         estimate_rd)
from .optimize import (AllocationResult, BudgetProblem, CostModel, ExponentialFloor,
                       FrontierPoint, Hyperbolic, OptimalAutomation, allocate_budget,
                       comparative_statics_report, efficient_frontier, optimal_automation,
                       total_cost)
from .scenarios import (CounterfactualReport, RoiReport, Scenario, ScenarioReport,
                        counterfactual, evaluate_scenario, roi)
from .sensitivity import BoundsReport, e_value, manski_bounds, power_analysis
from .simulation import (IncidentDataset, ObservationalConfig, SimConfig, SimulationResult,
                         generate_observational, simulate_incidents)

__version__ = "0.1.0"
