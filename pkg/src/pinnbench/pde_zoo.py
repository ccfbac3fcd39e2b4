"""Benchmark PDE instances: residual operators, exact solutions, boundary
and initial data, and domains.

All closed forms are written against the generic math layer so they accept
floats, numpy arrays, tape tensors, or jets. Evaluating them with jet inputs
yields their input derivatives, which is how the oracle predictors used in
tests get analytically exact derivative bundles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mathx
from .errors import (ContractError, NoInitialConditionError,
                     NotOnBoundaryError, SingularityError)
from .jets import Jet
from .tape import Tensor

BLOWUP_EPS = 1e-6

# kdv soliton data: each solution is f = sum c_j exp(a_j x + b_j t) and
# u = 2 (f f_xx - f_x^2) / f^2. The (c, a, b) rows below are the expanded
# Hirota sums for eta_i = k_i x - k_i^3 t + eta_i^0 with the fitted k_i,
# eta_i^0 and pair factors e^{A_ij} = ((k_i-k_j)/(k_i+k_j))^2.
_KDV2_K = (-2.0, 4.0)
_KDV2_ETA0 = (math.log(1.0 / 3.0), math.log(1.0 / 3.0))
_KDV3_K = (2.0, 4.0, -6.0)
_KDV3_ETA0 = (math.log(3.0 / 2.0), math.log(3.0 / 5.0), math.log(1.0 / 10.0))


def _hirota_terms(ks, eta0s):
    """Expand f for the given soliton parameters into (c, a, b) rows."""
    n = len(ks)
    cs = [math.exp(e) for e in eta0s]

    def pair(i, j):
        return ((ks[i] - ks[j]) / (ks[i] + ks[j])) ** 2

    terms = [(1.0, 0.0, 0.0)]
    for i in range(n):
        terms.append((cs[i], ks[i], -ks[i] ** 3))
    for i in range(n):
        for j in range(i + 1, n):
            c = cs[i] * cs[j] * pair(i, j)
            terms.append((c, ks[i] + ks[j], -(ks[i] ** 3 + ks[j] ** 3)))
    if n == 3:
        c = cs[0] * cs[1] * cs[2] * pair(0, 1) * pair(1, 2) * pair(2, 0)
        terms.append((c, sum(ks), -sum(k ** 3 for k in ks)))
    return tuple(terms)


_KDV_TERMS = {2: _hirota_terms(_KDV2_K, _KDV2_ETA0),
              3: _hirota_terms(_KDV3_K, _KDV3_ETA0)}

_KDV_DOMAINS = {1: ((0.0, 1.0), (0.0, 1.0)),
                2: ((-5.0, 5.0), (-1.0, 1.0)),
                3: ((-4.0, 4.0), (-0.5, 0.5))}


@dataclass(frozen=True)
class PdeProblem:
    """One benchmark instance; immutable after construction."""

    kind: str
    spatial_dim: int
    n_fields: int
    space_bounds: tuple
    time_bounds: tuple | None
    nu: float = 0.0
    x_c: float = 0.5
    alpha: float = 1.0
    beta_sol: float = 0.0
    soliton_count: int = 0
    main_text_boundary: bool = False

    @property
    def has_time(self) -> bool:
        return self.time_bounds is not None

    @property
    def input_dim(self) -> int:
        return self.spatial_dim + (1 if self.has_time else 0)

    def axis_bounds(self) -> list[tuple[float, float]]:
        bounds = list(self.space_bounds)
        if self.has_time:
            bounds.append(self.time_bounds)
        return bounds


def poisson(d: int) -> PdeProblem:
    return PdeProblem("poisson", d, 1, tuple([(0.0, 1.0)] * d), None)


def burgers1_inviscid(alpha: float = 1.0, beta_sol: float = 0.0) -> PdeProblem:
    return PdeProblem("burgers1_inviscid", 1, 1, ((0.0, 1.0),), (0.0, 1.0),
                      alpha=alpha, beta_sol=beta_sol)


def burgers1_viscid(nu: float, x_c: float = 0.5) -> PdeProblem:
    return PdeProblem("burgers1_viscid", 1, 1, ((0.0, 1.0),), (0.0, 1.0),
                      nu=nu, x_c=x_c)


def burgers2_inviscid(t_max: float = 0.5, main_text_boundary: bool = False) -> PdeProblem:
    return PdeProblem("burgers2_inviscid", 2, 2, ((0.0, 1.0), (0.0, 1.0)),
                      (0.0, t_max), main_text_boundary=main_text_boundary)


def burgers3_viscid(re: float = 100.0) -> PdeProblem:
    return PdeProblem("burgers3_viscid", 3, 3,
                      ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (0.0, 1.0),
                      nu=1.0 / re)


def kdv(soliton_count: int) -> PdeProblem:
    if soliton_count not in (1, 2, 3):
        raise ContractError(f"soliton count must be 1, 2 or 3, got {soliton_count}")
    xb, tb = _KDV_DOMAINS[soliton_count]
    return PdeProblem("kdv", 1, 1, (xb,), tb, soliton_count=soliton_count)


def _scalar(v):
    """Numeric value of a possibly jet/tensor coordinate, for domain checks."""
    if isinstance(v, Jet):
        v = v.coeffs[0]
    if isinstance(v, Tensor):
        v = v.value
    return np.asarray(v, dtype=float)


def _check_blowup(problem: PdeProblem, t) -> None:
    if problem.kind == "burgers2_inviscid":
        den = np.abs(1.0 - 2.0 * _scalar(t) ** 2)
        if np.any(den < BLOWUP_EPS):
            raise SingularityError(
                f"2D Burgers evaluation within {BLOWUP_EPS} of the blow-up time")


# exact solutions ----------------------------------------------------------

def exact_solution(problem: PdeProblem, point) -> list:
    """Closed-form reference fields at a space-time point.

    Accepts float, array, tensor, or jet coordinates; returns one entry per
    field component of the same numeric kind.
    """
    if len(point) != problem.input_dim:
        raise ContractError(
            f"{problem.kind} expects {problem.input_dim} coordinates, got {len(point)}")
    k = problem.kind
    if k == "poisson":
        u = mathx.sin(math.pi * point[0])
        for xi in point[1:]:
            u = u * mathx.sin(math.pi * xi)
        return [u]
    if k == "burgers1_inviscid":
        x, t = point
        return [(problem.alpha * x + problem.beta_sol) / (problem.alpha * t + 1.0)]
    if k == "burgers1_viscid":
        x, t = point
        return [1.0 - mathx.tanh((x - problem.x_c - t) / (2.0 * problem.nu))]
    if k == "burgers2_inviscid":
        x, y, t = point
        _check_blowup(problem, t)
        den = 1.0 - 2.0 * t * t
        return [(x + y - 2.0 * x * t) / den, (x - y - 2.0 * y * t) / den]
    if k == "burgers3_viscid":
        x, y, z, t = point
        # Cole-Hopf potential 1 + x + sin(x)sin(y)sin(z)e^{-3 nu t}; the decay
        # rate 3*nu (rather than 1) is what makes the heat equation hold, so
        # the residual vanishes for every Reynolds number.
        decay = mathx.exp(-3.0 * problem.nu * t)
        s = mathx.sin(x) * mathx.sin(y) * mathx.sin(z) * decay
        den = 1.0 + x + s
        pre = -2.0 * problem.nu
        u = pre * ((1.0 + mathx.cos(x) * mathx.sin(y) * mathx.sin(z) * decay) / den)
        v = pre * ((mathx.sin(x) * mathx.cos(y) * mathx.sin(z) * decay) / den)
        w = pre * ((mathx.sin(x) * mathx.sin(y) * mathx.cos(z) * decay) / den)
        return [u, v, w]
    if k == "kdv":
        x, t = point
        if problem.soliton_count == 1:
            return [2.0 * mathx.sech2(x - 4.0 * t)]
        f = fx = fxx = None
        for c, a, b in _KDV_TERMS[problem.soliton_count]:
            e = c * mathx.exp(a * x + b * t)
            f = e if f is None else f + e
            fx = a * e if fx is None else fx + a * e
            fxx = a * a * e if fxx is None else fxx + a * a * e
        return [2.0 * (f * fxx - fx * fx) / (f * f)]
    raise ContractError(f"unknown problem kind {k!r}")


def source_term(problem: PdeProblem, x) -> object:
    """Poisson source f(x) = d pi^2 prod sin(pi x_i)."""
    if problem.kind != "poisson":
        raise ContractError("source_term is defined for the poisson problem only")
    d = problem.spatial_dim
    f = mathx.sin(math.pi * x[0])
    for xi in x[1:]:
        f = f * mathx.sin(math.pi * xi)
    return d * math.pi ** 2 * f


# boundary and initial data ------------------------------------------------

def boundary_g(problem: PdeProblem, axis: int, side: int, point) -> object:
    """Face datum for the component constrained on face (axis, side).

    `point` holds the full coordinates with point[axis] ignored; the face
    coordinate is pinned to the exact bound. For every problem this equals
    the exact solution restricted to the face, except the 2D Burgers
    main-text variant kept behind the config flag.
    """
    lo, hi = problem.space_bounds[axis]
    pinned = list(point)
    pinned[axis] = hi if side else lo
    if problem.kind == "burgers2_inviscid" and problem.main_text_boundary and side == 1:
        x, y, t = pinned
        _check_blowup(problem, t)
        den = 1.0 - 2.0 * t * t
        if axis == 0:
            return (1.0 - y - 2.0 * t) / den
        return (x - 1.0 - 2.0 * t) / den
    comp = _face_component(problem, axis)
    return exact_solution(problem, pinned)[comp]


def _face_component(problem: PdeProblem, axis: int) -> int:
    """Which field component a spatial face constrains."""
    if problem.kind in ("burgers2_inviscid", "burgers3_viscid"):
        return axis
    return 0


def boundary_value(problem: PdeProblem, point) -> np.ndarray:
    """Field data on a boundary face; unconstrained components are nan."""
    coords = [float(_scalar(c)) for c in point]
    for axis, (lo, hi) in enumerate(problem.space_bounds):
        if coords[axis] == lo or coords[axis] == hi:
            side = int(coords[axis] == hi)
            out = np.full(problem.n_fields, np.nan)
            out[_face_component(problem, axis)] = float(
                _scalar(boundary_g(problem, axis, side, point)))
            return out
    raise NotOnBoundaryError(f"{coords} lies on no spatial face of {problem.kind}")


def initial_value(problem: PdeProblem, x) -> list:
    """Fields at t=0, from the exact solution restricted to the slice."""
    if not problem.has_time:
        raise NoInitialConditionError(f"{problem.kind} has no time axis")
    return exact_solution(problem, list(x) + [0.0])


# residual operators -------------------------------------------------------

@dataclass
class DerivativeBundle:
    """Exactly the derivatives a problem's residual needs, per field.

    dx/dxx index as [field][spatial coordinate]; dxxx is the pure third
    x-derivative used only by kdv. Entries may be arrays or tensors.
    """

    kind: str
    point: list
    values: list
    dt: list | None = None
    dx: list = field(default_factory=list)
    dxx: list = field(default_factory=list)
    dxxx: list | None = None


def residual(problem: PdeProblem, bundle: DerivativeBundle) -> list:
    """PDE left-minus-right side per field component."""
    if bundle.kind != problem.kind:
        raise ContractError(
            f"bundle for {bundle.kind!r} used with {problem.kind!r}")
    k = problem.kind
    if k == "poisson":
        lap = bundle.dxx[0][0]
        for term in bundle.dxx[0][1:]:
            lap = lap + term
        return [-lap - source_term(problem, bundle.point)]
    if k in ("burgers1_inviscid", "burgers1_viscid"):
        u = bundle.values[0]
        r = bundle.dt[0] + u * bundle.dx[0][0]
        if problem.nu:
            r = r - problem.nu * bundle.dxx[0][0]
        return [r]
    if k == "burgers2_inviscid":
        u, v = bundle.values
        return [bundle.dt[i] + u * bundle.dx[i][0] + v * bundle.dx[i][1]
                for i in range(2)]
    if k == "burgers3_viscid":
        u, v, w = bundle.values
        out = []
        for i in range(3):
            r = (bundle.dt[i] + u * bundle.dx[i][0] + v * bundle.dx[i][1]
                 + w * bundle.dx[i][2])
            lap = bundle.dxx[i][0] + bundle.dxx[i][1] + bundle.dxx[i][2]
            out.append(r - problem.nu * lap)
        return out
    if k == "kdv":
        u = bundle.values[0]
        return [bundle.dt[0] + bundle.dxxx[0] + 6.0 * u * bundle.dx[0][0]]
    raise ContractError(f"unknown problem kind {k!r}")


def required_orders(problem: PdeProblem) -> tuple[int, int]:
    """(max spatial order, max time order) the residual needs."""
    k = problem.kind
    if k == "poisson":
        return 2, 0
    if k == "burgers1_inviscid" or k == "burgers2_inviscid":
        return 1, 1
    if k in ("burgers1_viscid", "burgers3_viscid"):
        return 2, 1
    if k == "kdv":
        return 3, 1
    raise ContractError(f"unknown problem kind {k!r}")
