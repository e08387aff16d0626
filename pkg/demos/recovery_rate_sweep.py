"""Exact-recovery rate versus noise rate, desk scale.

Reproduces the benchmark protocol: for each noise rate, draw fresh data,
corrupt with the gated flip adversary, fit every method, and declare success
only on snapped-exact equality with the planted parameter. Error bars are
two standard errors. Run: python demos/recovery_rate_sweep.py
"""

import time

from radreg.bench import exact_recovery_bench

METHODS = ["rescaled-l1", "naive-l1", "normalized-l1", "least-squares"]
ETA_GRID = [0.0, 0.1, 0.2, 0.3, 0.4]
TRIALS = 50  # bump to 200 for the full protocol

start = time.perf_counter()
report = exact_recovery_bench(
    METHODS, d=5, n=200, eta_grid=ETA_GRID, trials=TRIALS, seed=0,
    instance="outlier",
)
elapsed = time.perf_counter() - start

print(f"{TRIALS} trials per cell, outlier instance family, d=5, n=200 "
      f"({elapsed:.1f}s)\n")
header = "eta    " + "".join(f"{m:>18s}" for m in METHODS)
print(header)
print("-" * len(header))
for eta in ETA_GRID:
    cells = []
    for m in METHODS:
        row = next(r for r in report.rows
                   if r.method == m and r.grid_value == eta)
        cells.append(f"{row.recovery_rate:.2f} +-{row.two_stderr:.2f}")
    print(f"{eta:<7.2f}" + "".join(f"{c:>18s}" for c in cells))

print("\nrescaled l1 holds its rate as eta grows; the baselines decay.")
print("The reference d=30/n=120 configuration is available via:")
print("  radreg bench recovery-rate --d 30 --n 120 --eta-grid 0,0.1,0.2,0.3 "
      "--trials 200 --out sweep.json")
