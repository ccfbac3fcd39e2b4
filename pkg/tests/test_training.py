"""Adam steps, run records, determinism, divergence bookkeeping."""

from __future__ import annotations

import numpy as np
import pytest

from pinnbench import losses, pde_zoo, sampling, training
from pinnbench.errors import (NonFiniteGradientError, NonFiniteLossError,
                              UndefinedDenominatorError)
from pinnbench.losses import RiskSpec
from pinnbench.models import PredictorModel, oracle_model
from pinnbench.network import NetSpec
from pinnbench.sampling import SampleSet
from pinnbench.training import (AdamState, TrainConfig, adam_step,
                                fractional_error, train, train_single)


class TestAdam:
    def test_first_step_is_lr_sized(self):
        params = np.array([1.0, -2.0, 0.5])
        grads = np.ones(3)
        new, state = adam_step(params, grads, AdamState.zeros(3), lr=0.1)
        np.testing.assert_allclose(new, params - 0.1 / (1.0 + 1e-8), rtol=1e-12)
        assert state.t == 1

    def test_zero_gradient_keeps_params(self):
        params = np.array([3.0])
        state = AdamState(np.array([0.5]), np.array([0.25]), 3)
        new, state2 = adam_step(params, np.zeros(1), state, lr=0.1)
        assert state2.m[0] == pytest.approx(0.45)
        assert state2.v[0] == pytest.approx(0.25 * 0.999)

    def test_purity(self):
        params = np.array([1.0, 2.0])
        grads = np.array([0.3, -0.4])
        state = AdamState.zeros(2)
        a1, s1 = adam_step(params, grads, state, lr=0.01)
        a2, s2 = adam_step(params, grads, state, lr=0.01)
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(s1.m, s2.m)
        assert state.t == 0

    def test_nonfinite_gradient_rejected(self):
        with pytest.raises(NonFiniteGradientError):
            adam_step(np.zeros(2), np.array([1.0, np.nan]), AdamState.zeros(2), 0.1)


class TestFractionalError:
    def setup_method(self):
        self.prob = pde_zoo.poisson(2)
        self.mesh = sampling.test_mesh(self.prob, 21)

    def test_oracle_is_zero(self):
        err = fractional_error(oracle_model(self.prob), None, self.mesh)
        assert err <= 1e-12

    def test_zero_and_double_are_one(self):
        spec = NetSpec(2, 1, 4, 4)
        model = PredictorModel("vanilla", self.prob, spec)
        err0 = fractional_error(model, np.zeros(2 * 16 + 6 * 4 + 1), self.mesh)
        assert err0 == pytest.approx(1.0, abs=1e-12)

    def test_undefined_denominator(self):
        # the inviscid profile (alpha x)/(alpha t + 1) vanishes on the x=0 line
        prob = pde_zoo.burgers1_inviscid()
        mesh = SampleSet(np.array([[0.0, 0.2], [0.0, 0.8]]), "test", 0)
        with pytest.raises(UndefinedDenominatorError):
            fractional_error(oracle_model(prob), None, mesh)


def _tiny_run(epochs=5, seed=0):
    prob = pde_zoo.kdv(1)
    spec = NetSpec(2, 1, 4, 4, "sigmoid")
    model = PredictorModel("initial_included", prob, spec)
    risk = RiskSpec("initial_included_composite", n_bulk=30, boundary_per_face=10)
    cfg = TrainConfig(epochs=epochs, learning_rate=1e-4, seed_init=seed,
                      repeats=1, test_resolution=11)
    return train_single(prob, model, risk, cfg)


class TestTrainSingle:
    def test_zero_epoch_run(self):
        rec = _tiny_run(epochs=0)
        assert len(rec.risk_trace) == 1
        assert not rec.diverged
        assert rec.final_error is not None

    def test_trace_lengths_and_finiteness(self):
        rec = _tiny_run(epochs=7)
        assert len(rec.risk_trace) == 7
        assert np.all(np.isfinite(rec.risk_trace))
        assert rec.error_epochs == [0]

    def test_bitwise_determinism(self):
        a, b = _tiny_run(epochs=6, seed=3), _tiny_run(epochs=6, seed=3)
        assert a.risk_trace == b.risk_trace
        np.testing.assert_array_equal(a.final_params, b.final_params)

    def test_divergence_is_flagged_not_propagated(self, monkeypatch):
        calls = {"n": 0}
        real = losses.total_risk

        def exploding(spec, model, layers, sets):
            calls["n"] += 1
            if calls["n"] >= 3:
                raise NonFiniteLossError("injected", epoch=calls["n"] - 1)
            return real(spec, model, layers, sets)

        monkeypatch.setattr(training.losses, "total_risk", exploding)
        rec = _tiny_run(epochs=10)
        assert rec.diverged
        assert rec.divergence_epoch == 2
        assert len(rec.risk_trace) == 2
        assert rec.final_error is None


class TestTrainRepeats:
    def test_distinct_seeds_distinct_runs(self):
        prob = pde_zoo.kdv(1)
        spec = NetSpec(2, 1, 4, 4, "sigmoid")
        model = PredictorModel("vanilla", prob, spec)
        risk = RiskSpec("vanilla_composite", n_bulk=20, boundary_per_face=5,
                        n_initial=10)
        cfg = TrainConfig(epochs=3, learning_rate=1e-4, repeats=3,
                          test_resolution=11)
        recs = train(prob, model, risk, cfg)
        assert len(recs) == 3
        assert recs[0].seed_init != recs[1].seed_init
        assert recs[0].risk_trace != recs[1].risk_trace
