import json

import numpy as np
import pytest

from radreg.bench import SyntheticSpec, make_synthetic_dataset
from radreg.data import LabeledDataset
from radreg.errors import ContractViolation, InvalidNoiseRate, SimulationInfeasible
from radreg.noise import (
    Constant,
    FlipNegate,
    Gated,
    MassartSpec,
    Scale,
    corrupt_massart,
    corrupt_oblivious,
    gated_flip,
    inflated_massart_rate,
    strategy_from_json,
)


def linear_dataset(m, d, seed, w_star=None):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, d))
    w = np.ones(d) if w_star is None else np.asarray(w_star)
    return LabeledDataset(X, X @ w), w


class TestCorruptMassart:
    def test_zero_noise_is_identity(self):
        ds, _ = linear_dataset(50, 3, seed=0)
        out, record = corrupt_massart(ds, MassartSpec(0.0, FlipNegate(), seed=1))
        assert np.array_equal(out.y, ds.y)
        assert not record.mask.any()
        assert not record.corruptible.any()

    def test_gated_flip_reference_adversary(self):
        # only points with a coordinate beyond the gate may flip, and flipped
        # labels equal the negated clean value
        spec = SyntheticSpec(d=4, n=400, seed=3)
        clean = make_synthetic_dataset(spec)
        out, record = corrupt_massart(
            clean, MassartSpec(0.4, gated_flip(spec.d / 2.0), seed=5)
        )
        gate = np.any(clean.x > spec.d / 2.0, axis=1)
        assert record.mask.sum() > 0
        assert np.all(gate[record.mask])
        assert np.allclose(out.y[record.mask], -clean.y[record.mask])
        assert np.array_equal(out.y[~record.mask], clean.y[~record.mask])

    def test_corrupted_fraction_concentrates(self):
        ds, _ = linear_dataset(10000, 2, seed=4)
        _, record = corrupt_massart(ds, MassartSpec(0.3, FlipNegate(), seed=6))
        frac = record.mask.mean()
        assert abs(frac - 0.3) <= 0.015  # ~5 sigma of Binomial(10000, 0.3)

    def test_flag_mask_independent_of_data(self):
        ds_a, _ = linear_dataset(200, 3, seed=10)
        ds_b, _ = linear_dataset(200, 5, seed=11)  # different covariates
        _, rec_a = corrupt_massart(ds_a, MassartSpec(0.25, FlipNegate(), seed=42))
        _, rec_b = corrupt_massart(ds_b, MassartSpec(0.25, Scale(7.0), seed=42))
        assert np.array_equal(rec_a.corruptible, rec_b.corruptible)

    def test_gating_refines_never_extends(self):
        ds, _ = linear_dataset(500, 3, seed=12)
        strategy = Gated(predicate=type("P", (), {
            "__call__": lambda self, x, y: x[:, 0] > 0.5,
            "to_json": lambda self: {"kind": "any-coord-above", "threshold": 0.5},
        })(), inner=FlipNegate())
        _, record = corrupt_massart(ds, MassartSpec(0.4, strategy, seed=13))
        assert np.all(record.corruptible[record.mask])
        assert record.mask.sum() < record.corruptible.sum()

    def test_deterministic_given_seed(self):
        ds, _ = linear_dataset(300, 4, seed=14)
        out1, _ = corrupt_massart(ds, MassartSpec(0.3, Scale(-100.0), seed=99))
        out2, _ = corrupt_massart(ds, MassartSpec(0.3, Scale(-100.0), seed=99))
        assert np.array_equal(out1.y, out2.y)

    def test_rate_out_of_range(self):
        with pytest.raises(InvalidNoiseRate):
            MassartSpec(0.5, FlipNegate(), seed=0)
        with pytest.raises(InvalidNoiseRate):
            MassartSpec(-0.1, FlipNegate(), seed=0)

    def test_constant_strategy(self):
        ds, _ = linear_dataset(100, 2, seed=15)
        out, record = corrupt_massart(ds, MassartSpec(0.3, Constant(7.5), seed=16))
        assert np.all(out.y[record.mask] == 7.5)


class TestCorruptOblivious:
    def test_zero_rate(self):
        y = np.arange(10.0)
        assert np.array_equal(corrupt_oblivious(y, 0.0, 5.0, seed=1), y)

    def test_full_support(self):
        y = np.zeros(64)
        out = corrupt_oblivious(y, 1.0, 5.0, seed=2)
        assert np.all(np.abs(out) == 5.0)

    def test_exact_sparsity(self):
        y = np.linspace(0, 1, 1000)
        out = corrupt_oblivious(y, 0.25, 3.0, seed=3)
        assert int((out != y).sum()) == 250

    def test_floor_rounding(self):
        y = np.zeros(10)
        out = corrupt_oblivious(y, 0.19, 1.0, seed=4)
        assert int((out != y).sum()) == 1  # floor(1.9)


class TestInflatedRate:
    def test_delta_one_is_identity(self):
        assert inflated_massart_rate(0.3, 500, 1.0) == 0.3

    def test_reference_value(self):
        rate = inflated_massart_rate(0.2, 1000, 0.1)
        assert abs(rate - 0.23393070212207556) < 1e-12

    def test_infeasible(self):
        with pytest.raises(SimulationInfeasible):
            inflated_massart_rate(0.49, 100, 0.01)

    def test_bad_args(self):
        with pytest.raises(ContractViolation):
            inflated_massart_rate(0.2, 0, 0.1)
        with pytest.raises(ContractViolation):
            inflated_massart_rate(0.2, 100, 0.0)

    def test_binomial_coverage_property(self):
        # the operative content of the simulation lemma: an inflated-rate
        # Massart adversary flags at least eta*m samples w.p. >= 1 - delta
        eta, m, delta = 0.2, 1000, 0.1
        rate = inflated_massart_rate(eta, m, delta)
        rng = np.random.default_rng(7)
        draws = rng.binomial(m, rate, size=10000)
        assert (draws >= eta * m).mean() >= (1 - delta) - 0.02


class TestStrategyJson:
    @pytest.mark.parametrize("obj", [
        {"kind": "flip-negate"},
        {"kind": "scale", "factor": -100.0},
        {"kind": "constant", "value": 3.5},
        {"kind": "gated",
         "predicate": {"kind": "any-coord-above", "threshold": 15.0},
         "inner": {"kind": "flip-negate"}},
    ])
    def test_roundtrip(self, obj):
        strategy = strategy_from_json(obj)
        assert strategy.to_json() == obj
        # and it survives an actual JSON encode/decode
        assert strategy_from_json(json.loads(json.dumps(strategy.to_json()))).to_json() == obj

    def test_unknown_kind(self):
        with pytest.raises(ContractViolation):
            strategy_from_json({"kind": "nonsense"})

    def test_spec_roundtrip(self):
        spec = MassartSpec(0.25, gated_flip(15.0), seed=7)
        again = MassartSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert again.eta == spec.eta and again.seed == spec.seed
        assert again.strategy.to_json() == spec.strategy.to_json()
