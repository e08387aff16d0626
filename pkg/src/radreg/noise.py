"""Label-corruption adversaries.

Two adversaries are implemented. The Massart adversary flags each sample
independently with probability eta and may rewrite the flagged labels using
any deterministic function of the whole dataset (it can also decline). The
oblivious adversary adds a sparse +-magnitude vector at covariate-independent
positions. ``inflated_massart_rate`` gives the rate at which the former
simulates the latter with probability 1 - delta.

All randomness flows through ``numpy.random.default_rng`` (PCG64), so a seed
pins the corrupted dataset bit for bit. The corruptible flags are drawn
before the strategy ever sees the data, which keeps them independent of the
covariates by construction.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset
from .errors import ContractViolation, InvalidNoiseRate, SimulationInfeasible


# --- gating predicates -------------------------------------------------------

@dataclass
class AnyCoordAbove:
    """Selects samples with any covariate coordinate strictly above threshold."""

    threshold: float

    def __call__(self, x, y):
        return np.any(x > self.threshold, axis=1)

    def to_json(self):
        return {"kind": "any-coord-above", "threshold": self.threshold}


_PREDICATES = {"any-coord-above": lambda obj: AnyCoordAbove(float(obj["threshold"]))}


def predicate_from_json(obj):
    try:
        return _PREDICATES[obj["kind"]](obj)
    except KeyError:
        raise ContractViolation(f"unknown predicate kind {obj.get('kind')!r}") from None


# --- corruption strategies ---------------------------------------------------
#
# A strategy answers two questions for the flagged samples: which of them the
# adversary bothers to corrupt (``selects``), and what the rewritten label is
# (``target_labels``). Both are deterministic functions of the full dataset.

@dataclass
class FlipNegate:
    """Rewrite y to -y."""

    def selects(self, x, y):
        return np.ones(len(y), dtype=bool)

    def target_labels(self, x, y):
        return -y

    def to_json(self):
        return {"kind": "flip-negate"}


@dataclass
class Scale:
    """Rewrite y to factor * y."""

    factor: float

    def selects(self, x, y):
        return np.ones(len(y), dtype=bool)

    def target_labels(self, x, y):
        return self.factor * y

    def to_json(self):
        return {"kind": "scale", "factor": self.factor}


@dataclass
class Constant:
    """Rewrite y to a fixed value."""

    value: float

    def selects(self, x, y):
        return np.ones(len(y), dtype=bool)

    def target_labels(self, x, y):
        return np.full(len(y), self.value)

    def to_json(self):
        return {"kind": "constant", "value": self.value}


@dataclass
class Gated:
    """Apply ``inner`` only where ``predicate`` holds; decline elsewhere."""

    predicate: object
    inner: object

    def selects(self, x, y):
        return self.predicate(x, y) & self.inner.selects(x, y)

    def target_labels(self, x, y):
        return self.inner.target_labels(x, y)

    def to_json(self):
        return {
            "kind": "gated",
            "predicate": self.predicate.to_json(),
            "inner": self.inner.to_json(),
        }


def strategy_from_json(obj):
    kind = obj.get("kind")
    if kind == "flip-negate":
        return FlipNegate()
    if kind == "scale":
        return Scale(float(obj["factor"]))
    if kind == "constant":
        return Constant(float(obj["value"]))
    if kind == "gated":
        return Gated(predicate_from_json(obj["predicate"]), strategy_from_json(obj["inner"]))
    raise ContractViolation(f"unknown strategy kind {kind!r}")


def gated_flip(threshold):
    """Flip-to-negative gated on any coordinate exceeding ``threshold``."""
    return Gated(AnyCoordAbove(threshold), FlipNegate())


# --- Massart corruption ------------------------------------------------------

@dataclass
class MassartSpec:
    """Noise rate, strategy and seed for one corruption pass. eta < 1/2."""

    eta: float
    strategy: object = field(default_factory=FlipNegate)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eta < 0.5:
            raise InvalidNoiseRate(f"eta must lie in [0, 1/2), got {self.eta}")

    def to_json(self):
        return {"eta": self.eta, "strategy": self.strategy.to_json(), "seed": self.seed}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["eta"]), strategy_from_json(obj["strategy"]), int(obj["seed"]))


@dataclass
class CorruptionRecord:
    """Ground truth of a corruption pass.

    ``mask`` marks samples whose label the adversary rewrote (a rewrite may
    coincide with the original, e.g. negating a zero). ``corruptible`` is the
    eta-probability flag mask drawn before the data was inspected; ``mask``
    is always a subset of it.
    """

    mask: np.ndarray
    corruptible: np.ndarray
    originals: np.ndarray


def corrupt_massart(clean, spec):
    """Apply a Massart adversary to a clean dataset.

    Returns (corrupted dataset, CorruptionRecord). The flag mask depends only
    on (seed, m, eta); the strategy then decides, deterministically from the
    full dataset, which flagged labels to rewrite and to what.
    """
    if not 0.0 <= spec.eta < 0.5:
        raise InvalidNoiseRate(f"eta must lie in [0, 1/2), got {spec.eta}")
    rng = np.random.default_rng(spec.seed)
    flagged = rng.random(clean.m) < spec.eta
    chosen = flagged & spec.strategy.selects(clean.x, clean.y)
    targets = spec.strategy.target_labels(clean.x, clean.y)
    y_new = np.where(chosen, targets, clean.y)
    record = CorruptionRecord(
        mask=chosen, corruptible=flagged, originals=clean.y.copy()
    )
    return LabeledDataset(clean.x.copy(), y_new, corrupted=chosen.copy()), record


# --- oblivious corruption ----------------------------------------------------

def corrupt_oblivious(clean_labels, eta, b_magnitude, seed=0):
    """Add an exactly floor(eta*m)-sparse +-b_magnitude vector to the labels.

    Positions and signs are drawn independently of everything else, which is
    what makes this adversary oblivious.
    """
    y = np.asarray(clean_labels, dtype=float).copy()
    if not 0.0 <= eta <= 1.0:
        raise ContractViolation(f"oblivious rate must lie in [0, 1], got {eta}")
    m = y.shape[0]
    k = int(math.floor(eta * m))
    if k == 0:
        return y
    rng = np.random.default_rng(seed)
    positions = rng.choice(m, size=k, replace=False)
    signs = rng.choice([-1.0, 1.0], size=k)
    y[positions] += signs * b_magnitude
    return y


def inflated_massart_rate(eta, m, delta):
    """Massart rate eta + sqrt(ln(1/delta) / (2m)) that covers an eta-oblivious
    adversary with probability at least 1 - delta.

    Raises SimulationInfeasible when the inflated rate reaches 1/2; the rate
    is never silently clamped.
    """
    if m < 1:
        raise ContractViolation(f"need m >= 1, got {m}")
    if not 0.0 < delta <= 1.0:
        raise ContractViolation(f"need 0 < delta <= 1, got {delta}")
    rate = eta + math.sqrt(math.log(1.0 / delta) / (2.0 * m))
    if rate >= 0.5:
        raise SimulationInfeasible(rate)
    return rate
