"""Synthetic data generation, baseline fitters, and the recovery-rate harness.

The synthetic covariate distribution is the Gaussian mixture

    1/2 N(e1, I/d^2)  +  (1/2d) sum_i N(d e_i, I/d^2),

paired by default with the gated adversary that flips labels to the negated
clean value only for points with some coordinate above d/2 (exactly the
points from the far mixture components). Exact recovery means the snapped
output equals the planted parameter as a tuple of reduced fractions; no
distance threshold is ever involved.

Trials are seeded through ``numpy.random.SeedSequence([seed, grid_idx,
trial])`` so every report is reproducible bit for bit from (seed, config).
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .data import LabeledDataset, load_dataset_csv, save_dataset_csv  # noqa: F401
from .errors import ContractViolation, RadregError
from .l1 import l1_fit_linear, snap_to_rational
from .linear import RecoveryConfig, recover_linear
from .noise import MassartSpec, corrupt_massart, gated_flip

__all__ = [
    "SyntheticSpec", "BenchReport", "sample_synthetic_mixture",
    "make_synthetic_dataset", "make_outlier_dataset", "default_target",
    "default_sample_size",
    "method_registry", "exact_recovery_bench", "margin_fraction",
    "load_dataset_csv", "save_dataset_csv",
]


def default_target(d):
    """The reference experiment target: all-ones plus 9 on the second axis."""
    w = np.ones(d)
    if d >= 2:
        w[1] += 9.0
    return w


@dataclass
class SyntheticSpec:
    d: int
    n: int
    seed: int = 0
    w_star: np.ndarray | None = None

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ContractViolation("need d >= 1 and n >= 1")
        if self.w_star is None:
            self.w_star = default_target(self.d)
        self.w_star = np.asarray(self.w_star, dtype=float)
        if self.w_star.shape != (self.d,):
            raise ContractViolation("w_star must have shape (d,)")


def sample_synthetic_mixture(spec):
    """Draw covariates from the two-level Gaussian mixture (see module doc)."""
    rng = np.random.default_rng(spec.seed)
    d, n = spec.d, spec.n
    pick_near = rng.random(n) < 0.5
    comps = rng.integers(0, d, size=n)
    noise = rng.standard_normal((n, d)) / d
    means = np.zeros((n, d))
    means[pick_near, 0] = 1.0
    far = ~pick_near
    means[far, comps[far]] = float(d)
    return means + noise


def make_synthetic_dataset(spec, model="linear"):
    """Mixture covariates with clean labels from the planted parameter."""
    X = sample_synthetic_mixture(spec)
    z = X @ spec.w_star
    y = z if model == "linear" else np.maximum(z, 0.0)
    return LabeledDataset(X, y)


def make_outlier_dataset(spec, model="linear", n_far=4, far_scale=100.0):
    """Dense cluster at e1 plus a handful of axis-aligned far outliers.

    The far points have norm ~far_scale, so a single flipped far label can
    dominate the raw l1 objective along its axis while the clean cluster
    mass is far too small to resist; rescaling neutralizes exactly this.
    Pair with a gate at far_scale / 2 so only the outliers are corruptible.
    """
    if not 0 < n_far < spec.n:
        raise ContractViolation("need 0 < n_far < n")
    rng = np.random.default_rng(spec.seed)
    d, n = spec.d, spec.n
    near = rng.standard_normal((n - n_far, d)) / d
    near[:, 0] += 1.0
    comps = rng.integers(0, d, size=n_far)
    far = rng.standard_normal((n_far, d)) / d
    far[np.arange(n_far), comps] += far_scale
    X = np.vstack([near, far])[rng.permutation(n)]
    z = X @ spec.w_star
    y = z if model == "linear" else np.maximum(z, 0.0)
    return LabeledDataset(X, y)


INSTANCE_FAMILIES = ("mixture", "outlier")


def default_sample_size(d, eta, rho=1.0, c=1.0):
    """Sample-size suggestion c * d^3 / (rho (1 - 2 eta)^2)."""
    if not 0.0 <= eta < 0.5:
        raise ContractViolation("eta must lie in [0, 1/2)")
    return int(math.ceil(c * d**3 / (rho * (1.0 - 2.0 * eta) ** 2)))


# --- fitting methods ----------------------------------------------------------

def _fit_rescaled_l1(samples, config):
    return recover_linear(samples, config).w_snapped


def _fit_naive_l1(samples, config):
    return snap_to_rational(l1_fit_linear(samples).w, config.max_denominator)


def _fit_normalized_l1(samples, config):
    norms = np.linalg.norm(samples.x, axis=1)
    if np.any(norms == 0.0):
        raise ContractViolation("cannot normalize zero covariates")
    scaled = LabeledDataset(samples.x / norms[:, None], samples.y / norms)
    return snap_to_rational(l1_fit_linear(scaled).w, config.max_denominator)


def _fit_least_squares(samples, config):
    w, *_ = np.linalg.lstsq(samples.x, samples.y, rcond=None)
    return snap_to_rational(w, config.max_denominator)


def make_ridge(coeff):
    def _fit_ridge(samples, config):
        X, y = samples.x, samples.y
        w = np.linalg.solve(X.T @ X + coeff * np.eye(samples.d), X.T @ y)
        return snap_to_rational(w, config.max_denominator)
    return _fit_ridge


def method_registry(ridge_coeff=1.0):
    """Name -> fitter(samples, RecoveryConfig) -> RationalVector."""
    return {
        "rescaled-l1": _fit_rescaled_l1,
        "naive-l1": _fit_naive_l1,
        "normalized-l1": _fit_normalized_l1,
        "least-squares": _fit_least_squares,
        "ridge": make_ridge(ridge_coeff),
    }


# --- the recovery-rate benchmark ----------------------------------------------

@dataclass
class BenchRow:
    method: str
    grid_param: str
    grid_value: float
    trials: int
    successes: int
    recovery_rate: float
    two_stderr: float
    wall_time_s: float

    def to_json(self, include_timing=False):
        obj = {
            "method": self.method,
            "grid_param": self.grid_param,
            "grid_value": self.grid_value,
            "trials": self.trials,
            "successes": self.successes,
            "recovery_rate": self.recovery_rate,
            "two_stderr": self.two_stderr,
        }
        if include_timing:
            obj["wall_time_s"] = self.wall_time_s
        return obj


@dataclass
class BenchReport:
    config: dict
    rows: list = field(default_factory=list)

    def rate(self, method, grid_value=None):
        for row in self.rows:
            if row.method == method and (grid_value is None or row.grid_value == grid_value):
                return row.recovery_rate
        raise KeyError(method)

    def to_json(self, include_timing=False):
        return {
            "config": self.config,
            "rows": [row.to_json(include_timing) for row in self.rows],
        }


def _trial_seeds(seed, grid_idx, trial):
    root = np.random.default_rng(np.random.SeedSequence([seed, grid_idx, trial]))
    return int(root.integers(2**63)), int(root.integers(2**63))


def exact_recovery_bench(methods, *, d, n=120, eta=0.25, eta_grid=None, n_grid=None,
                         trials=200, seed=0, w_star=None, gamma=0.5,
                         max_denominator=10**6, adversary=None, ridge_coeff=1.0,
                         instance="mixture", n_far=4, far_scale=100.0):
    """Exact-recovery rates over a noise grid or a sample-size grid.

    One of eta_grid / n_grid selects the sweep (a single point is used when
    both are None). ``instance`` picks the covariate family: "mixture" (the
    reference Gaussian mixture, gate at d/2) or "outlier" (cluster plus far
    outliers, gate at far_scale/2). Every method sees the same corrupted
    dataset per trial; a trial crash counts as a failure for the crashing
    method only. Success is snapped-exact equality with the planted
    parameter.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    if eta_grid is not None and n_grid is not None:
        raise ContractViolation("pass at most one of eta_grid / n_grid")
    if instance not in INSTANCE_FAMILIES:
        raise ContractViolation(f"instance must be one of {INSTANCE_FAMILIES}")
    registry = method_registry(ridge_coeff)
    unknown = [name for name in methods if name not in registry]
    if unknown:
        raise ContractViolation(f"unknown methods: {unknown}")
    if eta_grid is not None:
        grid_param, grid = "eta", list(eta_grid)
    elif n_grid is not None:
        grid_param, grid = "n", list(n_grid)
    else:
        grid_param, grid = "eta", [eta]

    w_star = default_target(d) if w_star is None else np.asarray(w_star, dtype=float)
    target = tuple(Fraction(v) for v in w_star)
    config = RecoveryConfig(gamma=gamma, max_denominator=max_denominator)
    report = BenchReport(config={
        "d": d, "n": n, "eta": eta, "grid_param": grid_param, "grid": grid,
        "trials": trials, "seed": seed, "gamma": gamma,
        "max_denominator": max_denominator,
        "w_star": [float(v) for v in w_star],
        "methods": list(methods),
        "instance": instance,
    })

    gate = d / 2.0 if instance == "mixture" else far_scale / 2.0
    for gi, gval in enumerate(grid):
        cur_eta = float(gval) if grid_param == "eta" else eta
        cur_n = int(gval) if grid_param == "n" else n
        strategy = adversary if adversary is not None else gated_flip(gate)
        successes = {name: 0 for name in methods}
        elapsed = {name: 0.0 for name in methods}
        for trial in range(trials):
            data_seed, noise_seed = _trial_seeds(seed, gi, trial)
            spec = SyntheticSpec(d=d, n=cur_n, seed=data_seed, w_star=w_star)
            if instance == "mixture":
                clean = make_synthetic_dataset(spec, model="linear")
            else:
                clean = make_outlier_dataset(spec, n_far=n_far, far_scale=far_scale)
            corrupted, _ = corrupt_massart(
                clean, MassartSpec(cur_eta, strategy, noise_seed)
            )
            for name in methods:
                start = time.perf_counter()
                try:
                    snapped = registry[name](corrupted, config)
                    if snapped.to_fractions() == target:
                        successes[name] += 1
                except (RadregError, np.linalg.LinAlgError):
                    pass
                elapsed[name] += time.perf_counter() - start
        for name in methods:
            rate = successes[name] / trials
            report.rows.append(BenchRow(
                method=name,
                grid_param=grid_param,
                grid_value=float(gval),
                trials=trials,
                successes=successes[name],
                recovery_rate=rate,
                two_stderr=2.0 * math.sqrt(rate * (1.0 - rate) / trials),
                wall_time_s=elapsed[name],
            ))
    return report


def margin_fraction(w, testset, margin):
    """Fraction of the test set with |w.x - y| within the margin."""
    if margin < 0:
        raise ContractViolation("margin must be >= 0")
    if testset.m == 0:
        raise ContractViolation("empty test set")
    w = np.asarray(w, dtype=float)
    return float(np.mean(np.abs(testset.x @ w - testset.y) <= margin))
