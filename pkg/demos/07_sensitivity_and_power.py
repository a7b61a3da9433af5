"""How robust is an observed gradient, and how many incidents are needed to see it?"""
from automation_risk import e_value, manski_bounds, power_analysis

# harm rate of 0.2 among reported incidents, a quarter never reported
b = manski_bounds(0.2, 0.25)
print(f"harm rate lies in [{b.lower:.2f}, {b.upper:.2f}]")

for rr in (1.0, 1.5, 2.0, 4.0):
    print(f"risk ratio {rr:3g}: a confounder needs RR >= {e_value(rr):.3f} on both arms")

for g in (1.0, 1.5, 2.0, 3.0):
    p = power_analysis(g, n_low=75, n_total=500, alpha=0.05, base_rate_low=0.1,
                       reps=2000, seed=0)
    print(f"gradient {g:3g}x  rejection rate {p:.3f}")
