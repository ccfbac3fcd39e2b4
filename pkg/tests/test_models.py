"""Predictor transforms: constraint exactness, blends, derivative bundles."""

from __future__ import annotations

import numpy as np
import pytest

from pinnbench import network, pde_zoo
from pinnbench.errors import ContractError
from pinnbench.models import (PredictorModel, boundary_exactness_check,
                              initial_exactness_check, model_bundle,
                              oracle_bundle, predict_values)
from pinnbench.network import NetSpec, init_xavier, param_count

ALL_PROBLEMS = [pde_zoo.poisson(1), pde_zoo.poisson(3),
                pde_zoo.burgers1_inviscid(), pde_zoo.burgers1_viscid(0.1),
                pde_zoo.burgers2_inviscid(), pde_zoo.burgers3_viscid(),
                pde_zoo.kdv(1), pde_zoo.kdv(2), pde_zoo.kdv(3)]


def _spec(prob) -> NetSpec:
    return NetSpec(prob.input_dim, prob.n_fields, 4, 8)


def _pid(p) -> str:
    return f"{p.kind}{p.spatial_dim}n{p.soliton_count}"


class TestValidation:
    def test_scaled_model_is_poisson_only(self):
        prob = pde_zoo.kdv(1)
        with pytest.raises(ContractError):
            PredictorModel("boundary_included_scaled", prob, _spec(prob), lam=5.0)

    def test_initial_model_needs_time(self):
        prob = pde_zoo.poisson(2)
        with pytest.raises(ContractError):
            PredictorModel("initial_included", prob, _spec(prob))

    def test_net_shape_must_match(self):
        prob = pde_zoo.burgers3_viscid()
        with pytest.raises(ContractError):
            PredictorModel("vanilla", prob, NetSpec(4, 1, 4, 8))


class TestBoundaryExactness:
    @pytest.mark.parametrize("prob", [p for p in ALL_PROBLEMS], ids=_pid)
    def test_defect_at_roundoff(self, prob):
        model = PredictorModel("boundary_included", prob, _spec(prob))
        assert boundary_exactness_check(model, 400, 3) <= 1e-12

    def test_scaled_poisson_defect(self):
        prob = pde_zoo.poisson(3)
        model = PredictorModel("boundary_included_scaled", prob, _spec(prob), lam=5.0)
        assert boundary_exactness_check(model, 400, 3) <= 1e-12

    def test_vanilla_rejected(self):
        prob = pde_zoo.poisson(1)
        model = PredictorModel("vanilla", prob, _spec(prob))
        with pytest.raises(ContractError):
            boundary_exactness_check(model, 10, 0)

    def test_burgers1_left_boundary_kills_net(self):
        prob = pde_zoo.burgers1_inviscid()
        model = PredictorModel("boundary_included", prob, _spec(prob))
        for seed in range(3):
            params = init_xavier(model.spec, seed)
            pts = np.column_stack([np.zeros(5), np.linspace(0, 1, 5)])
            np.testing.assert_allclose(predict_values(model, params, pts), 0.0,
                                       atol=1e-15)


class TestInitialExactness:
    @pytest.mark.parametrize("prob", [p for p in ALL_PROBLEMS if p.has_time], ids=_pid)
    def test_defect_at_roundoff(self, prob):
        model = PredictorModel("initial_included", prob, _spec(prob))
        assert initial_exactness_check(model, 400, 3) <= 1e-12

    def test_kdv_blend_weight_vanishes_at_t0(self):
        prob = pde_zoo.kdv(1)
        model = PredictorModel("initial_included", prob, _spec(prob), q_blend=1e-9)
        params = init_xavier(model.spec, 5)
        x = np.linspace(0, 1, 7)
        pred = predict_values(model, params, np.column_stack([x, np.zeros(7)]))
        ref = 2.0 / np.cosh(x) ** 2
        np.testing.assert_allclose(pred[:, 0], ref, atol=1e-12)


class TestScaledBlend:
    def test_lambda_prefactor_value(self):
        # net forced to the constant 1 via zero weights and unit output bias
        prob = pde_zoo.poisson(10)
        spec = NetSpec(10, 1, 4, 8)
        model = PredictorModel("boundary_included_scaled", prob, spec, lam=5.0)
        params = np.zeros(param_count(spec))
        params[-1] = 1.0
        pred = predict_values(model, params, np.full((1, 10), 0.5))
        assert pred[0, 0] == pytest.approx(1.25 ** 10, rel=1e-12)

    def test_lambda_scaling_identity(self):
        # lam=5 output equals 5^d times the lam=1 output for the same params
        prob = pde_zoo.poisson(3)
        spec = _spec(prob)
        params = init_xavier(spec, 2)
        pts = np.random.default_rng(0).random((20, 3))
        a = predict_values(PredictorModel("boundary_included_scaled", prob, spec, lam=5.0),
                           params, pts)
        b = predict_values(PredictorModel("boundary_included", prob, spec), params, pts)
        np.testing.assert_allclose(a, 125.0 * b, rtol=1e-12)


class TestBundles:
    @pytest.mark.parametrize("kind", ["vanilla", "boundary_included", "initial_included"])
    def test_bundle_derivatives_match_finite_differences(self, kind):
        prob = pde_zoo.burgers1_viscid(0.5)
        model = PredictorModel(kind, prob, _spec(prob))
        params = init_xavier(model.spec, 1)
        layers = network.numpy_layers(model.spec, params)
        pts = np.array([[0.3, 0.4], [0.7, 0.2]])
        bundle = model_bundle(model, layers, pts)
        h = 1e-5

        def f(x, t):
            return predict_values(model, params, np.array([[x, t]]))[0, 0]

        for i, (x, t) in enumerate(pts):
            dt = (f(x, t + h) - f(x, t - h)) / (2 * h)
            dx = (f(x + h, t) - f(x - h, t)) / (2 * h)
            h2 = 1e-4
            dxx = (f(x + h2, t) - 2 * f(x, t) + f(x - h2, t)) / h2 ** 2
            assert np.asarray(bundle.values[0])[i] == pytest.approx(f(x, t), rel=1e-12)
            assert np.asarray(bundle.dt[0])[i] == pytest.approx(dt, rel=1e-6)
            assert np.asarray(bundle.dx[0][0])[i] == pytest.approx(dx, rel=1e-6)
            assert np.asarray(bundle.dxx[0][0])[i] == pytest.approx(dxx, rel=1e-4)

    def test_oracle_bundle_matches_exact_solution(self):
        prob = pde_zoo.kdv(2)
        pts = np.column_stack([np.linspace(-3, 3, 9), np.linspace(-0.5, 0.5, 9)])
        bundle = oracle_bundle(prob, pts)
        ref = np.asarray(pde_zoo.exact_solution(prob, [pts[:, 0], pts[:, 1]])[0])
        np.testing.assert_allclose(np.asarray(bundle.values[0]), ref, rtol=1e-12)
