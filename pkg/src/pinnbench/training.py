"""Full-batch Adam training loop with risk and fractional-error traces."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import losses, network, sampling, tape
from .errors import (NonFiniteGradientError, NonFiniteLossError,
                     UndefinedDenominatorError)
from .losses import RiskSpec
from .models import PredictorModel, predict_values
from .network import NetSpec
from .pde_zoo import PdeProblem

Array = np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed_init: int = 0
    seed_sample: int = 1000
    repeats: int = 3
    eval_cadence: int = 100
    test_resolution: object = 51

    def __post_init__(self):
        if self.epochs < 0 or self.learning_rate <= 0:
            raise ValueError("epochs must be >= 0 and learning rate positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")


@dataclass
class AdamState:
    m: Array
    v: Array
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(params: Array, grads: Array, state: AdamState,
              lr: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> tuple[Array, AdamState]:
    """One bias-corrected Adam update; pure in (params, state)."""
    if params.shape != grads.shape:
        raise ValueError("parameter/gradient shape mismatch")
    if not np.all(np.isfinite(grads)):
        raise NonFiniteGradientError("non-finite gradient in optimizer step")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grads
    v = beta2 * state.v + (1.0 - beta2) * grads * grads
    mhat = m / (1.0 - beta1 ** t)
    vhat = v / (1.0 - beta2 ** t)
    return params - lr * mhat / (np.sqrt(vhat) + eps), AdamState(m, v, t)


def fractional_error(model: PredictorModel, params: Array,
                     mesh: sampling.SampleSet) -> float:
    """sum ||predict - u||^2 / sum ||u||^2 over the mesh."""
    from . import pde_zoo
    if len(mesh) == 0:
        raise ValueError("empty evaluation mesh")
    pts = mesh.points
    exact = pde_zoo.exact_solution(
        model.problem, [pts[:, j] for j in range(pts.shape[1])])
    exact = np.stack([np.broadcast_to(np.asarray(e, dtype=float), (len(mesh),))
                      for e in exact], axis=1)
    denom = float(np.sum(exact * exact))
    if denom == 0.0:
        raise UndefinedDenominatorError("exact solution vanishes on the mesh")
    if model.kind == "oracle":
        from .jets import Jet
        fields = model.predict_fields([Jet([pts[:, j]]) for j in range(pts.shape[1])])
        pred = np.stack([np.broadcast_to(np.asarray(f.coeffs[0], dtype=float),
                                         (len(mesh),)) for f in fields], axis=1)
    else:
        pred = predict_values(model, params, pts)
    return float(np.sum((pred - exact) ** 2)) / denom


@dataclass
class RunRecord:
    """Full provenance of one training run."""

    problem_kind: str
    model_kind: str
    family: str
    depth: int
    width: int
    activation: str
    seed_init: int
    seed_sample: int
    epochs: int
    learning_rate: float
    eval_cadence: int
    risk_trace: list = field(default_factory=list)
    error_trace: list = field(default_factory=list)
    error_epochs: list = field(default_factory=list)
    final_params: Array | None = None
    final_error: float | None = None
    diverged: bool = False
    divergence_epoch: int | None = None
    wall_time: float = 0.0

    @property
    def final_risk(self) -> float:
        return self.risk_trace[-1] if self.risk_trace else float("nan")

    @property
    def min_error(self) -> float:
        errs = list(self.error_trace)
        if self.final_error is not None:
            errs.append(self.final_error)
        return min(errs) if errs else float("nan")


def make_sets(problem: PdeProblem, risk: RiskSpec, seed: int) -> dict:
    """Fixed collocation sets for one run, sampled once and reused."""
    sets = {"bulk": sampling.sample_bulk(problem, risk.n_bulk, seed)}
    if risk.boundary_per_face is not None:
        sets["boundary"] = sampling.sample_boundary(
            problem, risk.boundary_per_face, seed + 1)
    if risk.n_initial is not None:
        sets["initial"] = sampling.sample_initial(problem, risk.n_initial, seed + 2)
    return sets


def train_single(problem: PdeProblem, model: PredictorModel, risk: RiskSpec,
                 config: TrainConfig, mesh: sampling.SampleSet | None = None) -> RunRecord:
    """One seeded run: evaluate risk with jets, backprop, Adam, record traces."""
    start = time.perf_counter()
    spec = model.spec
    record = RunRecord(problem.kind, model.kind, risk.family, spec.depth,
                       spec.width, spec.activation, config.seed_init,
                       config.seed_sample, config.epochs, config.learning_rate,
                       config.eval_cadence)
    sets = make_sets(problem, risk, config.seed_sample)
    if mesh is None:
        mesh = sampling.test_mesh(problem, config.test_resolution)
    params = network.init_xavier(spec, config.seed_init)
    state = AdamState.zeros(params.size)
    try:
        if config.epochs == 0:
            layers = network.param_tensors(spec, params)
            loss = losses.total_risk(risk, model, layers, sets)
            record.risk_trace.append(float(np.asarray(losses._value(loss))))
        for epoch in range(config.epochs):
            layers = network.param_tensors(spec, params)
            loss = losses.total_risk(risk, model, layers, sets)
            record.risk_trace.append(float(np.asarray(losses._value(loss))))
            if not np.isfinite(record.risk_trace[-1]):
                raise NonFiniteLossError("non-finite total risk", epoch=epoch)
            if epoch % config.eval_cadence == 0:
                record.error_trace.append(fractional_error(model, params, mesh))
                record.error_epochs.append(epoch)
            leaves = [t for pair in layers for t in pair]
            grads = tape.grad(loss, leaves, epoch=epoch)
            gflat = network.flatten_grads(spec, grads)
            params, state = adam_step(params, gflat, state, config.learning_rate,
                                      config.beta1, config.beta2, config.eps)
    except (NonFiniteLossError, NonFiniteGradientError) as err:
        record.diverged = True
        record.divergence_epoch = getattr(err, "epoch", None)
    record.final_params = params
    if not record.diverged:
        record.final_error = fractional_error(model, params, mesh)
    record.wall_time = time.perf_counter() - start
    return record


def train(problem: PdeProblem, model: PredictorModel, risk: RiskSpec,
          config: TrainConfig) -> list[RunRecord]:
    """All repeats with derived seeds; one record per repeat."""
    mesh = sampling.test_mesh(problem, config.test_resolution)
    records = []
    for r in range(config.repeats):
        cfg = replace(config, seed_init=config.seed_init + r,
                      seed_sample=config.seed_sample + 10 * r, repeats=1)
        records.append(train_single(problem, model, risk, cfg, mesh))
    return records
