"""Acceptance suite: end-to-end correctness and benchmark reproduction.

Criteria, in order: (1) jet/finite-difference equivalence over random nets,
(2) parameter gradients of every risk family, (3) closed-form residuals,
(4) constraint exactness of included predictors, (5) Poisson reproduction,
(6) 1D inviscid Burgers model ranking, (7) KdV soliton reproduction and
ranking, (8) fractional-error identities, (9) bitwise reproducibility.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from pinnbench import network, pde_zoo, sampling, tape, training
from pinnbench.jets import ACTIVATIONS, Jet, finite_diff, lift_seed
from pinnbench.losses import RiskSpec, total_risk
from pinnbench.models import (PredictorModel, boundary_exactness_check,
                              initial_exactness_check, oracle_bundle,
                              oracle_model)
from pinnbench.network import NetSpec, forward, init_xavier
from pinnbench.presets import get_preset
from pinnbench.training import TrainConfig, fractional_error, train_single


def fd_oracle(f, x, k, h):
    """Central differences, Richardson-extrapolated for orders 2 and 3."""
    if k == 1:
        return finite_diff(f, x, k, h)
    return (4.0 * finite_diff(f, x, k, h / 2.0) - finite_diff(f, x, k, h)) / 3.0


class TestCriterion1AutodiffEquivalence:
    @pytest.mark.parametrize("act", sorted(ACTIVATIONS))
    def test_100_random_net_point_pairs(self, act):
        steps = {1: 1e-6, 2: 1e-3, 3: 4e-3}
        rng = np.random.default_rng(sum(map(ord, act)))
        for _ in range(100):
            spec = NetSpec(2, 1, int(rng.integers(2, 5)),
                           int(rng.integers(2, 8)), act)
            params = init_xavier(spec, int(rng.integers(10000)))
            x0, t0 = rng.uniform(-1, 1, 2)
            (jet,) = forward(spec, params,
                             [lift_seed(x0, 3), Jet([t0, 0.0, 0.0, 0.0])])

            def f(v):
                return forward(spec, params, [v, t0])[0]

            for k, h in steps.items():
                ref = fd_oracle(f, x0, k, h)
                assert abs(jet.derivative(k) - ref) <= max(1e-5 * abs(ref), 1e-7)


def _family_instances():
    poisson = pde_zoo.poisson(2)
    kdv = pde_zoo.kdv(1)
    burgers = pde_zoo.burgers1_viscid(0.5)
    return [
        ("residual", poisson, "vanilla",
         RiskSpec("residual", beta_penalty=200.0, n_bulk=16, boundary_per_face=3)),
        ("energy", poisson, "vanilla",
         RiskSpec("energy", beta_penalty=50.0, n_bulk=16, boundary_per_face=3)),
        ("vanilla_composite", kdv, "vanilla",
         RiskSpec("vanilla_composite", n_bulk=16, boundary_per_face=4, n_initial=8)),
        ("boundary_included_composite", burgers, "boundary_included",
         RiskSpec("boundary_included_composite", n_bulk=16, n_initial=8)),
        ("initial_included_composite", kdv, "initial_included",
         RiskSpec("initial_included_composite", n_bulk=16, boundary_per_face=4)),
    ]


class TestCriterion2ParameterGradients:
    @pytest.mark.parametrize("label,prob,kind,risk", _family_instances(),
                             ids=[f[0] for f in _family_instances()])
    def test_gradient_matches_central_differences(self, label, prob, kind, risk):
        spec = NetSpec(prob.input_dim, prob.n_fields, 3, 6)
        model = PredictorModel(kind, prob, spec)
        flat = init_xavier(spec, 1)
        sets = training.make_sets(prob, risk, 100)

        def loss_value(p):
            return float(total_risk(risk, model, network.numpy_layers(spec, p), sets))

        layers = network.param_tensors(spec, flat)
        loss = total_risk(risk, model, layers, sets)
        leaves = [t for pair in layers for t in pair]
        grads = network.flatten_grads(spec, tape.grad(loss, leaves))
        rng = np.random.default_rng(0)
        scale = max(1.0, float(np.max(np.abs(grads))))
        for i in rng.choice(flat.size, 25, replace=False):
            up, dn = flat.copy(), flat.copy()
            up[i] += 1e-5
            dn[i] -= 1e-5
            ref = (loss_value(up) - loss_value(dn)) / 2e-5
            assert abs(grads[i] - ref) <= 1e-4 * max(abs(ref), 1e-4 * scale)


RESIDUAL_SUITE = [pde_zoo.poisson(1), pde_zoo.poisson(3),
                  pde_zoo.burgers1_inviscid(), pde_zoo.burgers1_viscid(0.1),
                  pde_zoo.burgers2_inviscid(), pde_zoo.burgers3_viscid(100.0),
                  pde_zoo.kdv(1), pde_zoo.kdv(2), pde_zoo.kdv(3)]


class TestCriterion3ExactSolutionResiduals:
    @pytest.mark.parametrize("prob", RESIDUAL_SUITE,
                             ids=lambda p: f"{p.kind}_d{p.spatial_dim}_n{p.soliton_count}")
    def test_closed_form_residual_at_100_points(self, prob):
        pts = sampling.sample_bulk(prob, 100, 2024).points
        res = pde_zoo.residual(prob, oracle_bundle(prob, pts))
        worst = max(float(np.max(np.abs(np.asarray(r)))) for r in res)
        assert worst <= 1e-3


class TestCriterion4ConstraintExactness:
    @pytest.mark.parametrize("prob", RESIDUAL_SUITE,
                             ids=lambda p: f"{p.kind}_d{p.spatial_dim}_n{p.soliton_count}")
    def test_boundary_defect(self, prob):
        spec = NetSpec(prob.input_dim, prob.n_fields, 4, 8)
        model = PredictorModel("boundary_included", prob, spec)
        for seed in range(10):
            assert boundary_exactness_check(model, 1000, seed) <= 1e-12

    @pytest.mark.parametrize("prob", [p for p in RESIDUAL_SUITE if p.has_time],
                             ids=lambda p: f"{p.kind}_d{p.spatial_dim}_n{p.soliton_count}")
    def test_initial_defect(self, prob):
        spec = NetSpec(prob.input_dim, prob.n_fields, 4, 8)
        model = PredictorModel("initial_included", prob, spec)
        for seed in range(10):
            assert initial_exactness_check(model, 1000, seed) <= 1e-12


def _run(cfg, **overrides):
    prob, model, risk, train_cfg = replace(cfg, **overrides).resolve()
    return train_single(prob, model, risk, train_cfg)


class TestCriterion5PoissonReproduction:
    def test_d1_width25_residual_scaled(self):
        prob = pde_zoo.poisson(1)
        model = PredictorModel("boundary_included_scaled", prob,
                               NetSpec(1, 1, 4, 25), lam=5.0)
        cfg = TrainConfig(epochs=2000, learning_rate=1e-4, repeats=1,
                          eval_cadence=1000, test_resolution=1001)
        rec = train_single(prob, model, RiskSpec("residual", n_bulk=1000), cfg)
        assert not rec.diverged
        assert rec.final_error <= 1e-3

    def test_d10_width50_lambda5_beats_lambda1(self):
        prob = pde_zoo.poisson(10)
        cfg = TrainConfig(epochs=2000, learning_rate=1e-4, repeats=1,
                          eval_cadence=10 ** 6, test_resolution=3)
        risk = RiskSpec("residual", n_bulk=500)
        finals = {}
        for lam in (5.0, 1.0):
            kind = "boundary_included_scaled" if lam != 1.0 else "boundary_included"
            model = PredictorModel(kind, prob, NetSpec(10, 1, 4, 50), lam=lam)
            rec = train_single(prob, model, risk, cfg)
            assert not rec.diverged
            finals[lam] = rec.final_error
        assert finals[5.0] <= 2e-1
        assert finals[5.0] < finals[1.0]


class TestCriterion6Burgers1Ranking:
    def test_boundary_included_beats_vanilla_at_3441_params(self):
        finals = {}
        for name in ("burgers1_inviscid_boundary_included_3441p",
                     "burgers1_inviscid_vanilla_3441p"):
            cfg = replace(get_preset(name), epochs=10000, eval_cadence=10 ** 6)
            prob, model, risk, train_cfg = cfg.resolve()
            recs = training.train(prob, model, risk, train_cfg)
            assert not any(r.diverged for r in recs)
            finals[cfg.model_kind] = [r.final_error for r in recs]
        for b, v in zip(finals["boundary_included"], finals["vanilla"]):
            assert b < v
        assert min(finals["boundary_included"]) <= 1e-4


class TestCriterion7KdV:
    def test_1soliton_initial_included_57p_full_budget(self):
        cfg = replace(get_preset("kdv1_initial_included_57p"), repeats=1,
                      eval_cadence=10 ** 6)
        rec = _run(cfg)
        assert not rec.diverged
        assert rec.final_error <= 1e-3

    def test_3soliton_initial_included_beats_vanilla_at_5000_epochs(self):
        finals = {}
        for name in ("kdv3_initial_included_3297p", "kdv3_vanilla_3297p"):
            cfg = replace(get_preset(name), repeats=1, n_bulk=1500,
                          boundary_per_face=[250, 250],
                          n_initial=None if "initial" in name else 500,
                          seed_init=1, seed_sample=1001,
                          eval_cadence=10 ** 6, test_resolution=[81, 51])
            rec = _run(cfg)
            assert not rec.diverged
            finals[name.split("_")[1]] = rec.final_error
        assert finals["initial"] < finals["vanilla"]


class TestCriterion8MetricIdentities:
    def test_identities_on_meshes(self):
        for prob, res in ((pde_zoo.poisson(2), 21), (pde_zoo.kdv(1), 31)):
            mesh = sampling.test_mesh(prob, res)
            pts = mesh.points
            exact = pde_zoo.exact_solution(prob, [pts[:, j] for j in range(pts.shape[1])])
            exact = np.stack([np.broadcast_to(np.asarray(e, float), (len(mesh),))
                              for e in exact], axis=1)
            denom = float(np.sum(exact * exact))

            def frac(pred):
                return float(np.sum((pred - exact) ** 2)) / denom

            assert fractional_error(oracle_model(prob), None, mesh) <= 1e-12
            assert abs(frac(np.zeros_like(exact)) - 1.0) <= 1e-12
            assert abs(frac(2.0 * exact) - 1.0) <= 1e-12


class TestCriterion9Reproducibility:
    def test_bitwise_identical_risk_traces(self):
        cfg = replace(get_preset("kdv1_vanilla_57p"), epochs=100, repeats=1,
                      eval_cadence=10 ** 6, test_resolution=21)
        a, b = _run(cfg), _run(cfg)
        assert a.risk_trace == b.risk_trace
        np.testing.assert_array_equal(a.final_params, b.final_params)
