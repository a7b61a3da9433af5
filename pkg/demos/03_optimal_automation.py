"""Cost-minimising automation level and the cost/risk frontier."""
import numpy as np

from automation_risk import (CostModel, Linear, Quadratic, RiskModel, comparative_statics_report,
                             efficient_frontier, optimal_automation)

# running the system gets cheaper with automation, and so does oversight
costs = CostModel(c_auto=Quadratic(100.0, -200.0, 100.0),
                  c_oversight=Linear.from_slope(50.0, -50.0))
risk = RiskModel(0.03, Quadratic(0.0, 0.0, 0.9), 50_000.0)

opt = optimal_automation(costs, risk)
print(f"A* = {opt.a_star:.6f}  (closed form {250 / 2900:.6f})")
print(f"total cost at A* = {opt.total_cost:.2f}, TC'' = {opt.second_derivative:g}")

front = efficient_frontier(costs, risk, 1001)
a = np.array([p.a for p in front])
print(f"{len(front)} of 1001 grid points are efficient, A in [{a.min():.3f}, {a.max():.3f}]")

# more severe or more frequent failures push A* down, cheaper oversight too
rows = comparative_statics_report(costs, risk, {"severity_mean": 2.0, "p_failure": 2.0,
                                                "oversight_cost": 0.5})
for r in rows:
    print(f"{r.parameter:15s} x{r.factor:<4g} A*: {r.a_star_before:.4f} -> {r.a_star_after:.4f}")
