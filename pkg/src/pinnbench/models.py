"""Predictor models: algebraic transforms wrapping the raw net output.

A predictor is evaluated on jets, so the transform's product and quotient
rules are propagated exactly along with the net's own derivatives. The
batched entry point stacks one seed direction per needed input coordinate
into the batch axis and reads the whole derivative bundle off one forward
pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import network, pde_zoo
from .errors import ContractError
from .jets import Jet, jet_constant
from .network import NetSpec
from .pde_zoo import DerivativeBundle, PdeProblem
from .tape import Tensor

MODEL_KINDS = ("vanilla", "boundary_included", "initial_included",
               "boundary_included_scaled")


@dataclass(frozen=True)
class PredictorModel:
    """A (problem, net, transform) triple; immutable view, params live outside."""

    kind: str
    problem: PdeProblem
    spec: NetSpec
    lam: float = 1.0
    q_blend: float = 1e-9

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ContractError(f"unknown model kind {self.kind!r}")
        if self.kind == "boundary_included_scaled" and self.problem.kind != "poisson":
            raise ContractError("the scaled boundary model applies to poisson only")
        if self.kind == "initial_included" and not self.problem.has_time:
            raise ContractError(f"{self.problem.kind} has no initial condition")
        if self.spec.input_dim != self.problem.input_dim:
            raise ContractError("net input width does not match the problem")
        if self.spec.output_dim != self.problem.n_fields:
            raise ContractError("net output width does not match the field count")


def _component(out: Jet, j: int) -> Jet:
    return Jet([c[:, j] for c in out.coeffs])


def _as_jets(coords) -> list[Jet]:
    orders = {c.order for c in coords if isinstance(c, Jet)}
    order = orders.pop() if orders else 0
    if orders:
        raise ContractError("coordinate jets must share one order")
    return [c if isinstance(c, Jet) else jet_constant(c, order) for c in coords]


def predict(model: PredictorModel, layers, coords) -> list[Jet]:
    """Transformed field jets at a (possibly batched) jet coordinate tuple.

    `layers` as accepted by network.forward_batch; `coords` is one entry per
    input axis, jets sharing an order (non-jets are lifted as constants).
    """
    coords = _as_jets(coords)
    out = network.forward_batch(model.spec, layers, network._stack_inputs(coords))
    fields = [_component(out, j) for j in range(model.spec.output_dim)]
    problem = model.problem
    if model.kind == "vanilla":
        return fields
    if model.kind in ("boundary_included", "boundary_included_scaled"):
        if problem.kind == "poisson":
            blend = None
            for axis in range(problem.spatial_dim):
                s = _unit(problem, axis, coords[axis])
                term = s * (1.0 - s)
                blend = term if blend is None else blend * term
            return [(model.lam ** problem.spatial_dim) * blend * fields[0]]
        out_fields = []
        for j, f in enumerate(fields):
            axis = j if problem.n_fields > 1 else 0
            s = _unit(problem, axis, coords[axis])
            g_lo = pde_zoo.boundary_g(problem, axis, 0, coords)
            g_hi = pde_zoo.boundary_g(problem, axis, 1, coords)
            out_fields.append(f * s * (1.0 - s) + (1.0 - s) * g_lo + s * g_hi)
        return out_fields
    # initial_included
    t = coords[-1]
    u0 = pde_zoo.initial_value(problem, coords[:-1])
    if problem.kind == "kdv":
        den = t * t + model.q_blend
        wn = (t * t) / den
        w0 = model.q_blend / den
        return [fields[0] * wn + w0 * u0[0]]
    t_max = problem.time_bounds[1]
    wn = t if t_max == 0.5 else t * (1.0 / t_max)
    w0 = 1.0 - t * (1.0 / t_max)
    return [f * wn + w0 * u0[j] for j, f in enumerate(fields)]


def _unit(problem: PdeProblem, axis: int, x: Jet) -> Jet:
    lo, hi = problem.space_bounds[axis]
    if lo == 0.0 and hi == 1.0:
        return x
    return (x - lo) * (1.0 / (hi - lo))


# batched derivative bundles ----------------------------------------------

def _seed_directions(problem: PdeProblem) -> tuple[list[int], int]:
    """Input axes needing a seed direction and the uniform jet order."""
    sx, st = pde_zoo.required_orders(problem)
    axes = list(range(problem.spatial_dim))
    if st > 0:
        axes.append(problem.spatial_dim)
    return axes, max(sx, st)


def _bundle_from(predict_fn, problem: PdeProblem, points: np.ndarray) -> DerivativeBundle:
    """Derivative bundle of `predict_fn` over a batch of points.

    One forward pass: each needed seed direction occupies one block of the
    batch axis. Entries are tensors when the predictor carries tensors.
    """
    axes, order = _seed_directions(problem)
    n = points.shape[0]
    nd = len(axes)
    coords = []
    for j in range(problem.input_dim):
        c0 = np.tile(points[:, j], nd)
        c1 = np.zeros(n * nd)
        if j in axes:
            b = axes.index(j)
            c1[b * n:(b + 1) * n] = 1.0
        coeffs = [c0, c1] + [np.zeros(n * nd)] * (order - 1)
        coords.append(Jet(coeffs[:order + 1]))
    fields = predict_fn(coords)

    def block(c, b):
        return c[axes.index(b) * n:(axes.index(b) + 1) * n]

    sx, st = pde_zoo.required_orders(problem)
    values, dt, dx, dxx, dxxx = [], [], [], [], []
    for f in fields:
        values.append(block(f.coeffs[0], axes[0]))
        dx.append([block(f.coeffs[1], a) for a in range(problem.spatial_dim)])
        if sx >= 2:
            dxx.append([2.0 * block(f.coeffs[2], a)
                        for a in range(problem.spatial_dim)])
        if sx >= 3:
            dxxx.append(6.0 * block(f.coeffs[3], 0))
        if st > 0:
            dt.append(block(f.coeffs[1], problem.spatial_dim))
    point = [points[:n, j] for j in range(problem.input_dim)]
    return DerivativeBundle(problem.kind, point, values,
                            dt=dt if st else None, dx=dx, dxx=dxx,
                            dxxx=dxxx if sx >= 3 else None)


def model_bundle(model: PredictorModel, layers, points: np.ndarray) -> DerivativeBundle:
    return _bundle_from(lambda coords: predict(model, layers, coords),
                        model.problem, points)


def predict_values(model: PredictorModel, params: np.ndarray,
                   points: np.ndarray) -> np.ndarray:
    """Plain numpy field values, shape (count, n_fields)."""
    layers = network.numpy_layers(model.spec, params)
    coords = [Jet([points[:, j]]) for j in range(points.shape[1])]
    fields = predict(model, layers, coords)
    return np.stack([np.asarray(f.coeffs[0]) for f in fields], axis=1)


# constraint checks --------------------------------------------------------

def boundary_exactness_check(model: PredictorModel, n_points: int,
                             seed: int, params: np.ndarray | None = None) -> float:
    """Max |predict - g| over sampled boundary points."""
    from . import sampling
    if model.kind not in ("boundary_included", "boundary_included_scaled"):
        raise ContractError("boundary exactness applies to boundary-included models")
    if params is None:
        params = network.init_xavier(model.spec, seed)
    faces = sampling.face_list(model.problem)
    per_face = [n_points // len(faces)] * len(faces)
    per_face[0] += n_points - sum(per_face)
    pts = sampling.sample_boundary(model.problem, per_face, seed).points
    pred = predict_values(model, params, pts)
    defect = 0.0
    for row, p in zip(pts, pred):
        target = pde_zoo.boundary_value(model.problem, row)
        mask = ~np.isnan(target)
        defect = max(defect, float(np.max(np.abs(p[mask] - target[mask]))))
    return defect


def initial_exactness_check(model: PredictorModel, n_points: int,
                            seed: int, params: np.ndarray | None = None) -> float:
    """Max |predict(x, 0) - u0(x)| over sampled initial points."""
    from . import sampling
    if model.kind != "initial_included":
        raise ContractError("initial exactness applies to initial-included models")
    if params is None:
        params = network.init_xavier(model.spec, seed)
    pts = sampling.sample_initial(model.problem, n_points, seed).points
    pred = predict_values(model, params, pts)
    target = np.stack([np.asarray(v, dtype=float) * np.ones(len(pts))
                       for v in _initial_rows(model.problem, pts)], axis=1)
    return float(np.max(np.abs(pred - target)))


def _initial_rows(problem: PdeProblem, pts: np.ndarray) -> list:
    coords = [pts[:, j] for j in range(problem.spatial_dim)]
    return pde_zoo.initial_value(problem, coords)


def oracle_model(problem: PdeProblem) -> "OraclePredictor":
    return OraclePredictor(problem)


class OraclePredictor:
    """Predictor that evaluates the closed-form exact solution.

    Shares the predict/model_bundle interface so the loss oracles can run
    the same code paths as trained models; carries no parameters.
    """

    kind = "oracle"

    def __init__(self, problem: PdeProblem):
        self.problem = problem

    def predict_fields(self, coords) -> list[Jet]:
        coords = _as_jets(coords)
        return [f if isinstance(f, Jet) else jet_constant(f, coords[0].order)
                for f in pde_zoo.exact_solution(self.problem, coords)]


def oracle_bundle(problem: PdeProblem, points: np.ndarray) -> DerivativeBundle:
    """Derivative bundle of the exact solution via jets of the closed form."""
    return _bundle_from(OraclePredictor(problem).predict_fields, problem, points)
