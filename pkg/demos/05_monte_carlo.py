"""Monte Carlo check of the decomposition for the underwriting model."""
from automation_risk import Linear, RiskModel, SeverityDistribution, SimConfig, simulate_incidents

harm = Linear(0.1, 0.15, 0.9, 0.85)
for dist in (SeverityDistribution("point", 50_000.0),
             SeverityDistribution("lognormal", 50_000.0, 1.2)):
    risk = RiskModel(0.03, harm, 50_000.0, dist)
    res = simulate_incidents(SimConfig(risk, a_level=0.9, n=1_000_000, seed=42))
    print(f"{dist.family:9s} analytic {res.analytic_loss:8.2f}  simulated {res.mean_loss:8.2f}  "
          f"z = {res.z_score:+.2f}")
    # harm requires execution, so the two conditional rates coincide
    print(f"          P(H|F) = {res.p_harm_given_failure:.5f}  P(U|F) = "
          f"{res.p_exec_given_failure:.5f}")

# chunked generation gives the same records
a = simulate_incidents(SimConfig(risk, 0.9, 200_000, 7))
b = simulate_incidents(SimConfig(risk, 0.9, 200_000, 7), chunk_size=30_000)
print("chunked == unchunked:", bool((a.dataset.loss == b.dataset.loss).all()))
