"""Empirical risks: residual, variational energy, penalty terms, composites.

Every term is a mean square over its own sample set. Composites sum their
terms with weight 1; only the Poisson penalty families scale the boundary
term by beta. Evaluation is batched and, when the predictor carries tensor
layers, fully recorded on the tape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pde_zoo, tape
from .errors import ConfigurationError, ContractError, NonFiniteLossError
from .jets import Jet
from .models import PredictorModel, model_bundle, predict
from .sampling import SampleSet
from .tape import Tensor

FAMILIES = ("residual", "energy", "vanilla_composite",
            "boundary_included_composite", "initial_included_composite")


@dataclass(frozen=True)
class RiskSpec:
    """A loss family plus its sample-set bindings.

    Counts double as the run configuration: n_bulk for the bulk set,
    boundary_per_face (int or per-face tuple) for the boundary set, and
    n_initial for the t=0 slice. Unbound roles are None.
    """

    family: str
    beta_penalty: float = 0.0
    n_bulk: int = 1000
    boundary_per_face: object = None
    n_initial: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown risk family {self.family!r}")
        if self.beta_penalty < 0:
            raise ConfigurationError("beta_penalty must be nonnegative")
        if self.family == "boundary_included_composite" and self.boundary_per_face is not None:
            raise ConfigurationError(
                "boundary-included composite binds no boundary set")
        if self.family == "initial_included_composite" and self.n_initial is not None:
            raise ConfigurationError(
                "initial-included composite binds no initial set")


def _value(x):
    return x.value if isinstance(x, Tensor) else np.asarray(x)


def _check_finite(arrs, what: str) -> None:
    for arr in arrs:
        v = _value(arr)
        bad = ~np.isfinite(v)
        if bad.any():
            idx = int(np.argmax(bad))
            raise NonFiniteLossError(f"non-finite {what}", sample=idx)


def _mean_sq(x):
    if isinstance(x, Tensor):
        return tape.tmean(x * x)
    x = np.asarray(x)
    return float(np.mean(x * x))


def residual_risk(model, layers, bulk: SampleSet):
    """Sum over field components of (1/N) * sum of squared residuals."""
    if len(bulk) == 0:
        raise ContractError("empty bulk sample set")
    problem = model.problem
    if model.kind == "oracle":
        from .models import oracle_bundle
        bundle = oracle_bundle(problem, bulk.points)
    else:
        bundle = model_bundle(model, layers, bulk.points)
    res = pde_zoo.residual(problem, bundle)
    _check_finite(res, "residual")
    total = None
    for r in res:
        term = _mean_sq(r)
        total = term if total is None else total + term
    return total


def energy_risk(model, layers, bulk: SampleSet):
    """(1/N) sum [ 1/2 |grad u|^2 - f u ] for the Poisson problem."""
    problem = model.problem
    if problem.kind != "poisson":
        raise ContractError("energy risk is defined for poisson only")
    if model.kind == "oracle":
        from .models import oracle_bundle
        bundle = oracle_bundle(problem, bulk.points)
    else:
        bundle = model_bundle(model, layers, bulk.points)
    u = bundle.values[0]
    gradsq = None
    for g in bundle.dx[0]:
        term = g * g
        gradsq = term if gradsq is None else gradsq + term
    f = pde_zoo.source_term(problem, bundle.point)
    integrand = 0.5 * gradsq - f * u
    _check_finite([integrand], "energy integrand")
    if isinstance(integrand, Tensor):
        return tape.tmean(integrand)
    return float(np.mean(np.asarray(integrand)))


def _predict_values(model, layers, points: np.ndarray) -> list:
    coords = [Jet([points[:, j]]) for j in range(points.shape[1])]
    if model.kind == "oracle":
        fields = model.predict_fields(coords)
    else:
        fields = predict(model, layers, coords)
    return [f.coeffs[0] for f in fields]


def boundary_penalty(model, layers, boundary: SampleSet):
    """(1/M) * sum of squared boundary defects on constrained components."""
    if len(boundary) == 0:
        raise ContractError("empty boundary sample set")
    problem = model.problem
    pts = boundary.points
    fields = _predict_values(model, layers, pts)
    targets = np.stack([pde_zoo.boundary_value(problem, row) for row in pts])
    total = None
    m = len(boundary)
    for j, f in enumerate(fields):
        mask = ~np.isnan(targets[:, j])
        if not mask.any():
            continue
        defect = f[np.nonzero(mask)[0]] - targets[mask, j]
        _check_finite([defect], "boundary defect")
        term = tape.tsum(defect * defect) * (1.0 / m) if isinstance(defect, Tensor) \
            else float(np.sum(defect * defect)) / m
        total = term if total is None else total + term
    return total


def initial_penalty(model, layers, initial: SampleSet):
    """(1/M) * sum over components of squared t=0 defects."""
    if len(initial) == 0:
        raise ContractError("empty initial sample set")
    problem = model.problem
    pts = initial.points
    fields = _predict_values(model, layers, pts)
    coords = [pts[:, j] for j in range(problem.spatial_dim)]
    targets = pde_zoo.initial_value(problem, coords)
    total = None
    for f, t in zip(fields, targets):
        defect = f - np.broadcast_to(np.asarray(t, dtype=float), (len(initial),))
        _check_finite([defect], "initial defect")
        total = _mean_sq(defect) if total is None else total + _mean_sq(defect)
    return total


def penalty_term(model, layers, samples: SampleSet):
    """Mean squared defect against the role's target (g or u0)."""
    if samples.role == "boundary":
        return boundary_penalty(model, layers, samples)
    if samples.role == "initial":
        return initial_penalty(model, layers, samples)
    raise ContractError(f"penalty term for role {samples.role!r} is undefined")


def total_risk(spec: RiskSpec, model, layers, sets: dict):
    """Assemble the family's terms exactly as written.

    `sets` maps roles (bulk/boundary/initial) to sample sets; missing
    required bindings raise a configuration error.
    """
    if "bulk" not in sets:
        raise ConfigurationError("every risk family binds a bulk set")
    fam = spec.family
    if fam == "energy":
        risk = energy_risk(model, layers, sets["bulk"])
        if spec.beta_penalty > 0:
            _require(sets, "boundary", fam)
            risk = risk + spec.beta_penalty * boundary_penalty(model, layers, sets["boundary"])
        return risk
    risk = residual_risk(model, layers, sets["bulk"])
    if fam == "residual":
        if spec.beta_penalty > 0:
            _require(sets, "boundary", fam)
            risk = risk + spec.beta_penalty * boundary_penalty(model, layers, sets["boundary"])
        return risk
    if fam == "vanilla_composite":
        _require(sets, "boundary", fam)
        risk = risk + boundary_penalty(model, layers, sets["boundary"])
        if model.problem.has_time:
            _require(sets, "initial", fam)
            risk = risk + initial_penalty(model, layers, sets["initial"])
        return risk
    if fam == "boundary_included_composite":
        if model.problem.has_time:
            _require(sets, "initial", fam)
            risk = risk + initial_penalty(model, layers, sets["initial"])
        return risk
    # initial_included_composite
    _require(sets, "boundary", fam)
    return risk + boundary_penalty(model, layers, sets["boundary"])


def _require(sets: dict, role: str, fam: str) -> None:
    if role not in sets or sets[role] is None:
        raise ConfigurationError(f"family {fam!r} requires a {role} sample set")
