"""Split a fixed validation budget between model quality and deployment controls."""
import numpy as np

from automation_risk import Hyperbolic, allocate_budget
from automation_risk.optimize import BudgetProblem

problem = BudgetProblem(budget=10.0, cost_f=1.0, cost_a=1.0,
                        curve_f=Hyperbolic(0.1, 1.0),   # P(F) after spending x_f
                        curve_a=Hyperbolic(0.9, 2.0),   # P(H|F,A) after spending x_a
                        severity_mean=50_000.0)
res = allocate_budget(problem)
print(f"x_f = {res.x_f:.4f}, x_a = {res.x_a:.4f}, expected loss = {res.expected_loss:.2f}")

# hyperbolic returns have a closed form for the split
print("closed form x_f =", (10.0 + 1 / 2.0 - 1 / 1.0) / 2)

# how the split moves with the budget
for b in (0.0, 0.5, 2.0, 10.0, 40.0):
    r = allocate_budget(BudgetProblem(b, 1.0, 1.0, problem.curve_f, problem.curve_a, 50_000.0))
    print(f"B={b:5.1f}  x_f={r.x_f:7.3f}  x_a={r.x_a:7.3f}  loss={r.expected_loss:9.2f}"
          f"{'  (corner)' if r.corner else ''}")

x = np.linspace(0, 10, 5)
print("loss along the budget line:", np.round(problem.loss(x, problem.x_a_for(x)), 1))
