"""Reverse-mode automatic differentiation over numpy arrays.

Every primitive builds a `Tensor` node holding its value, its parents and a
vjp closure. The resulting DAG is the tape: nodes are appended as the forward
pass runs and `grad` sweeps them exactly once in reverse topological order.
All arithmetic is float64.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import MissingTapeError, NonFiniteGradientError

Array = np.ndarray


def _unbroadcast(g: Array, shape: tuple[int, ...]) -> Array:
    """Sum a broadcast gradient back down to `shape`."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


class Tensor:
    """A recorded intermediate value.

    Constants are tensors with no parents; anything derived from a parameter
    tensor stays connected to it so the reverse sweep can reach every
    parameter that influenced a loss.
    """

    __slots__ = ("value", "parents", "_vjp", "_fwd")
    __array_priority__ = 1000
    __array_ufunc__ = None

    def __init__(self, value, parents: tuple["Tensor", ...] = (),
                 vjp: Callable[[Array], tuple[Array, ...]] | None = None,
                 fwd: Callable[[], Array] | None = None):
        self.value = np.asarray(value, dtype=np.float64)
        self.parents = parents
        self._vjp = vjp
        self._fwd = fwd

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.value.shape}, leaf={not self.parents})"

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        if not isinstance(p, (int, np.integer)) or p < 0:
            raise ValueError("only non-negative integer powers are recorded")
        out = constant(np.ones_like(self.value))
        for _ in range(int(p)):
            out = mul(out, self)
        return out

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, idx):
        return take(self, idx)

    def sum(self):
        return tsum(self)

    def mean(self):
        return tmean(self)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])


def constant(value) -> Tensor:
    return Tensor(value)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _binary(a, b, f, vjp_a, vjp_b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = f(a.value, b.value)

    def vjp(g: Array) -> tuple[Array, Array]:
        return (_unbroadcast(vjp_a(g, a.value, b.value), a.value.shape),
                _unbroadcast(vjp_b(g, a.value, b.value), b.value.shape))

    return Tensor(out, (a, b), vjp, fwd=lambda: f(a.value, b.value))


def add(a, b) -> Tensor:
    return _binary(a, b, np.add, lambda g, x, y: g, lambda g, x, y: g)


def sub(a, b) -> Tensor:
    return _binary(a, b, np.subtract, lambda g, x, y: g, lambda g, x, y: -g)


def mul(a, b) -> Tensor:
    return _binary(a, b, np.multiply,
                   lambda g, x, y: g * y, lambda g, x, y: g * x)


def div(a, b) -> Tensor:
    return _binary(a, b, np.divide,
                   lambda g, x, y: g / y, lambda g, x, y: -g * x / (y * y))


def _unary(a, f, dfdx) -> Tensor:
    a = as_tensor(a)

    def vjp(g: Array) -> tuple[Array]:
        return (g * dfdx(a.value),)

    return Tensor(f(a.value), (a,), vjp, fwd=lambda: f(a.value))


def neg(a) -> Tensor:
    return _unary(a, np.negative, lambda x: -np.ones_like(x))


def sin(a) -> Tensor:
    return _unary(a, np.sin, np.cos)


def cos(a) -> Tensor:
    return _unary(a, np.cos, lambda x: -np.sin(x))


def tanh(a) -> Tensor:
    return _unary(a, np.tanh, lambda x: 1.0 - np.tanh(x) ** 2)


def exp(a) -> Tensor:
    return _unary(a, np.exp, np.exp)


def sigmoid(a) -> Tensor:
    def f(x):
        return 1.0 / (1.0 + np.exp(-x))

    return _unary(a, f, lambda x: f(x) * (1.0 - f(x)))


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def vjp(g: Array) -> tuple[Array, Array]:
        return g @ b.value.T, a.value.T @ g

    return Tensor(a.value @ b.value, (a, b), vjp,
                  fwd=lambda: a.value @ b.value)


def take(a, idx) -> Tensor:
    a = as_tensor(a)

    def vjp(g: Array) -> tuple[Array]:
        out = np.zeros_like(a.value)
        out[idx] = g
        return (out,)

    return Tensor(a.value[idx], (a,), vjp, fwd=lambda: a.value[idx])


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)

    def vjp(g: Array) -> tuple[Array]:
        return (g.reshape(a.value.shape),)

    return Tensor(a.value.reshape(shape), (a,), vjp,
                  fwd=lambda: a.value.reshape(shape))


def tsum(a) -> Tensor:
    a = as_tensor(a)

    def vjp(g: Array) -> tuple[Array]:
        return (np.broadcast_to(g, a.value.shape).copy(),)

    return Tensor(a.value.sum(), (a,), vjp, fwd=lambda: a.value.sum())


def tmean(a) -> Tensor:
    a = as_tensor(a)
    n = a.value.size

    def vjp(g: Array) -> tuple[Array]:
        return (np.broadcast_to(g / n, a.value.shape).copy(),)

    return Tensor(a.value.mean(), (a,), vjp, fwd=lambda: a.value.mean())


def _topo_order(root: Tensor) -> list[Tensor]:
    """Iterative post-order over the DAG rooted at `root`."""
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def grad(output: Tensor, inputs: Sequence[Tensor], *,
         check_finite: bool = True,
         epoch: int | None = None) -> list[Array]:
    """Adjoints of a scalar `output` with respect to `inputs`.

    Unused inputs get exact zeros. Raises NonFiniteGradientError if any
    adjoint touching an input goes non-finite.
    """
    if not isinstance(output, Tensor):
        raise MissingTapeError("loss was not recorded on a tape")
    if output.value.size != 1:
        raise ValueError("grad expects a scalar output")

    adj: dict[int, Array] = {id(output): np.ones_like(output.value)}
    for node in reversed(_topo_order(output)):
        g = adj.get(id(node))
        if g is None or node._vjp is None:
            continue
        for parent, pg in zip(node.parents, node._vjp(g)):
            acc = adj.get(id(parent))
            adj[id(parent)] = pg if acc is None else acc + pg
    out = []
    for p in inputs:
        g = adj.get(id(p))
        if g is None:
            g = np.zeros_like(p.value)
        elif check_finite and not np.all(np.isfinite(g)):
            raise NonFiniteGradientError("non-finite parameter adjoint", epoch=epoch)
        out.append(g)
    return out


def replay(output: Tensor) -> None:
    """Re-execute the recorded forward pass in place.

    Used by tests to assert that the tape reproduces its primal values
    bit-for-bit.
    """
    for node in _topo_order(output):
        if node._fwd is not None:
            node.value = np.asarray(node._fwd(), dtype=np.float64)
