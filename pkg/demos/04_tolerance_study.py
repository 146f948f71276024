"""Simulated shoulder-surfing observer across tolerance values.

An observer re-enters each enrolled click with rounded Gaussian error.
The noise level is calibrated once so tolerance 5 lands near an 87.5%
re-entry success rate; smaller tolerances then collapse on their own:
at t=1 the observer must hit the exact pixel and essentially never does.

Equivalent CLI:
    attacklab study --sigma 1.01 --trials 1000 --tolerances 1,2,3,4,5 --out table.csv
"""

from clickpass.attacklab import calibrate_sigma, tolerance_study

sigma = calibrate_sigma()
print(f"calibrated observer noise: sigma = {sigma:.3f} px\n")

rows = tolerance_study(sigma, trials=1000, t_values=[1, 2, 3, 4, 5], seed=42)
print(f"{'t':>3} {'successes':>10} {'trials':>7} {'success %':>10} {'security %':>11}")
for r in rows:
    print(f"{r.t:>3} {r.successes:>10} {r.trials:>7} {r.success_pct:>10.1f} {r.security_pct:>11.1f}")

print("\nreading: higher tolerance forgives sloppier observation; a single")
print("pixel of tolerance makes an observed password nearly unusable.")
