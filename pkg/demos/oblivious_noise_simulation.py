"""Oblivious noise as a special case of the flag-based adversary.

An oblivious adversary adds an exactly eta*m-sparse vector at positions
chosen blind to the covariates. A flag-based adversary at the slightly
inflated rate eta + sqrt(ln(1/delta)/(2m)) flags at least eta*m samples
with probability 1 - delta, and can then place the same sparse pattern on
its flagged set. Run: python demos/oblivious_noise_simulation.py
"""

import numpy as np

from radreg import corrupt_oblivious, inflated_massart_rate
from radreg.errors import SimulationInfeasible

eta, m, delta = 0.2, 1000, 0.1
rate = inflated_massart_rate(eta, m, delta)
print(f"oblivious rate eta={eta}, m={m}, failure budget delta={delta}")
print(f"inflated flag rate: {rate:.6f}")

rng = np.random.default_rng(0)
draws = rng.binomial(m, rate, size=100_000)
coverage = (draws >= eta * m).mean()
print(f"P[flags >= eta*m] ~ {coverage:.4f}  (needs >= {1 - delta:.2f})")

# the sparse corruption itself
y = rng.standard_normal(m)
y_corrupted = corrupt_oblivious(y, eta, b_magnitude=5.0, seed=1)
changed = int((y_corrupted != y).sum())
print(f"\ncorrupt_oblivious changed exactly {changed} = floor({eta}*{m}) labels,"
      f" all by +-5.0: {np.all(np.isin(np.abs(y_corrupted - y)[y_corrupted != y], [5.0]))}")

# near the breakdown point the simulation becomes infeasible
try:
    inflated_massart_rate(0.49, 100, 0.01)
except SimulationInfeasible as exc:
    print(f"\neta=0.49, m=100, delta=0.01 -> infeasible ({exc})")
