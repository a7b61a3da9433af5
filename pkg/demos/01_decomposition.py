"""Expected loss of a credit-underwriting model at two automation levels."""
from automation_risk import Linear, RiskModel, Scenario, counterfactual, evaluate_scenario, roi

# harm probability rises linearly from 0.15 at A=0.1 to 0.85 at A=0.9
harm = Linear(0.1, 0.15, 0.9, 0.85)
risk = RiskModel(p_failure=0.03, harm_curve=harm, severity_mean=50_000.0)

high = Scenario("auto-approve", risk, 0.9, decision_volume=1000, period_label="month")
low = Scenario("human review", risk, 0.1, decision_volume=1000, period_label="month")

for s in (high, low):
    r = evaluate_scenario(s)
    print(f"{r.name:13s} A={r.a_effective:.1f}  P(H|F,A)={r.harm_probability:.2f}  "
          f"loss/decision={r.loss_per_decision:8,.0f}  loss/month={r.loss_per_period:12,.0f}  "
          f"incidents/month={r.expected_incidents_per_period:g}")

cf = counterfactual(high, low)
print(f"switching to review saves {cf.absolute_delta:,.0f} a month "
      f"({cf.relative_reduction:.2%})")

# the review team costs 100k a month
r = roi(cf, 100_000.0)
print(f"net benefit {r.net_benefit:,.0f}, ROI multiple {r.roi_multiple:g}")
