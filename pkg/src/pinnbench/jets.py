"""Truncated Taylor jets in one seed direction, orders 0 through 3.

A jet carries coefficients c_0..c_K with c_k = f^(k)/k!. Coefficients may be
plain floats, numpy arrays (batched evaluation) or tape tensors (so that a
reverse sweep over the jet graph yields exact parameter gradients).
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import tape
from .errors import (InvalidOrderError, OrderMismatchError,
                     UnsupportedActivationError)
from .tape import Tensor

MAX_ORDER = 3

Coef = "float | np.ndarray | Tensor"


def _check_order(order: int) -> None:
    if not 0 <= order <= MAX_ORDER:
        raise InvalidOrderError(f"jet order must be in [0, {MAX_ORDER}], got {order}")


class Jet:
    """Taylor coefficients of a scalar quantity along one seed direction."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(coeffs)
        _check_order(len(coeffs) - 1)
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self) -> str:
        return f"Jet(order={self.order})"

    def value(self):
        return self.coeffs[0]

    def derivative(self, k: int):
        """k-th derivative along the seed direction (k! times coefficient k)."""
        if not 0 <= k <= self.order:
            raise InvalidOrderError(f"derivative order {k} beyond jet order {self.order}")
        return float(math.factorial(k)) * self.coeffs[k]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other, self.order)
        _check_match(self, other)
        return Jet([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.order)
        _check_match(self, other)
        return Jet([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return _coerce(other, self.order) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            # scalar scaling, no truncation involved
            return Jet([other * c for c in self.coeffs])
        return jet_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return Jet([-c for c in self.coeffs])

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([c / other for c in self.coeffs])
        return jet_mul(self, jet_reciprocal(other))

    def __rtruediv__(self, other):
        return _coerce(other, self.order) / self


def _coerce(x, order: int) -> Jet:
    return x if isinstance(x, Jet) else jet_constant(x, order)


def _check_match(a: Jet, b: Jet) -> None:
    if a.order != b.order:
        raise OrderMismatchError(f"jet orders differ: {a.order} vs {b.order}")


def lift_seed(x, order: int) -> Jet:
    """Jet of the seed coordinate itself: value x, first coefficient 1."""
    _check_order(order)
    coeffs = [x] + ([1.0] if order >= 1 else []) + [0.0] * max(order - 1, 0)
    return Jet(coeffs)


def jet_constant(x, order: int) -> Jet:
    _check_order(order)
    return Jet([x] + [0.0] * order)


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the shared order."""
    if not isinstance(a, Jet) or not isinstance(b, Jet):
        raise OrderMismatchError("jet_mul expects two jets")
    _check_match(a, b)
    k = a.order
    ca, cb = a.coeffs, b.coeffs
    out = []
    for n in range(k + 1):
        acc = ca[0] * cb[n]
        for i in range(1, n + 1):
            acc = acc + ca[i] * cb[n - i]
        out.append(acc)
    return Jet(out)


def jet_reciprocal(b: Jet) -> Jet:
    k = b.order
    r = [1.0 / b.coeffs[0]]
    for n in range(1, k + 1):
        acc = b.coeffs[1] * r[n - 1]
        for i in range(2, n + 1):
            acc = acc + b.coeffs[i] * r[n - i]
        r.append(-r[0] * acc)
    return Jet(r)


# univariate composition ---------------------------------------------------

def _is_tensor(x) -> bool:
    return isinstance(x, Tensor)


def _sigmoid_derivs(x, order: int) -> list:
    s = tape.sigmoid(x) if _is_tensor(x) else 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))
    d = [s]
    if order >= 1:
        d.append(s * (1.0 - s))
    if order >= 2:
        d.append(d[1] * (1.0 - 2.0 * s))
    if order >= 3:
        d.append(d[2] * (1.0 - 2.0 * s) - 2.0 * d[1] * d[1])
    if order >= 4:
        d.append(d[3] * (1.0 - 2.0 * s) - 6.0 * d[1] * d[2])
    return d


def _tanh_derivs(x, order: int) -> list:
    t = tape.tanh(x) if _is_tensor(x) else np.tanh(x)
    d = [t]
    if order >= 1:
        d.append(1.0 - t * t)
    if order >= 2:
        d.append(-2.0 * t * d[1])
    if order >= 3:
        d.append(-2.0 * d[1] * d[1] - 2.0 * t * d[2])
    if order >= 4:
        d.append(-6.0 * d[1] * d[2] - 2.0 * t * d[3])
    return d


def _sin_derivs(x, order: int) -> list:
    if _is_tensor(x):
        s, c = tape.sin(x), tape.cos(x)
    else:
        s, c = np.sin(x), np.cos(x)
    cycle = [s, c, -s, -c]
    return [cycle[k % 4] for k in range(order + 1)]


def _exp_derivs(x, order: int) -> list:
    e = tape.exp(x) if _is_tensor(x) else np.exp(x)
    return [e] * (order + 1)


ACTIVATIONS: dict[str, Callable] = {
    "sigmoid": _sigmoid_derivs,
    "tanh": _tanh_derivs,
    "sin": _sin_derivs,
}

_COMPOSABLE = dict(ACTIVATIONS, exp=_exp_derivs)


def jet_compose(a: Jet, derivs: Callable) -> Jet:
    """Compose a univariate function (given by its derivative chain) with a jet.

    Taylor recomposition up to order 3:
        b0 = g
        b1 = g' c1
        b2 = g' c2 + g''/2 c1^2
        b3 = g' c3 + g'' c1 c2 + g'''/6 c1^3
    """
    k = a.order
    d = derivs(a.coeffs[0], k)
    out = [d[0]]
    if k >= 1:
        c1 = a.coeffs[1]
        out.append(d[1] * c1)
    if k >= 2:
        c2 = a.coeffs[2]
        out.append(d[1] * c2 + 0.5 * d[2] * c1 * c1)
    if k >= 3:
        c3 = a.coeffs[3]
        out.append(d[1] * c3 + d[2] * c1 * c2 + (1.0 / 6.0) * d[3] * c1 * c1 * c1)
    return Jet(out)


def jet_activation(a: Jet, act: str) -> Jet:
    """Apply a named univariate function to a jet."""
    if act not in _COMPOSABLE:
        raise UnsupportedActivationError(f"unsupported activation {act!r}")
    return jet_compose(a, _COMPOSABLE[act])


# finite-difference oracle -------------------------------------------------

def finite_diff(f: Callable[[float], float], x: float, order: int, h: float) -> float:
    """Central-difference derivative estimate, 2nd-order accurate stencils."""
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    if order == 3:
        return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h ** 3)
    raise InvalidOrderError(f"finite_diff supports orders 1..3, got {order}")
