"""Counterfactuals for a trading-system deployment failure.

Harm propagation is a table curve: most failures are caught at low
automation, almost none once the system runs unattended.
"""
from automation_risk import RiskModel, Scenario, Table, counterfactual

harm = Table(((0.0, 0.0), (0.3, 0.15), (0.9, 0.9), (1.0, 1.0)))
risk = RiskModel(p_failure=0.98, harm_curve=harm, severity_mean=5e8)

realized = Scenario("realized", risk, 0.9, period_label="deployment")
oversight = Scenario("enhanced oversight", risk, 0.3, period_label="deployment")
# better pre-deployment testing leaves automation alone but cuts P(F)
testing = Scenario("enhanced testing", risk.replace(p_failure=0.1), 0.9,
                   period_label="deployment")

for alt in (oversight, testing):
    cf = counterfactual(realized, alt)
    print(f"{alt.name:19s} {cf.baseline.loss_per_period:13,.0f} -> "
          f"{cf.intervention.loss_per_period:13,.0f}  ({cf.relative_reduction:.1%} lower)")
