"""Uniform-width feed-forward nets: sizing, initialization, jet forward pass."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractError
from .jets import ACTIVATIONS, Jet, jet_activation
from .tape import Tensor

Array = np.ndarray


@dataclass(frozen=True)
class NetSpec:
    """Architecture of a depth-m net with m affine maps and uniform width."""

    input_dim: int
    output_dim: int
    depth: int
    width: int
    activation: str = "tanh"

    def __post_init__(self):
        if self.depth < 2 or self.width < 1 or self.input_dim < 1 or self.output_dim < 1:
            raise ContractError(f"invalid net spec: {self}")
        if self.activation not in ACTIVATIONS:
            raise ContractError(f"unknown activation {self.activation!r}")

    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per affine map."""
        dims = [(self.input_dim, self.width)]
        dims += [(self.width, self.width)] * (self.depth - 2)
        dims.append((self.width, self.output_dim))
        return dims


def param_count(spec: NetSpec) -> int:
    p, q, m, n = spec.input_dim, spec.output_dim, spec.depth, spec.width
    return (p * n + n) + (m - 2) * (n * n + n) + (n * q + q)


def solve_width(target: int, input_dim: int, output_dim: int, depth: int) -> int:
    """Width giving exactly `target` parameters at the given depth."""
    for n in range(1, 4096):
        spec = NetSpec(input_dim, output_dim, depth, n)
        c = param_count(spec)
        if c == target:
            return n
        if c > target:
            break
    raise ConfigurationError(
        f"no width hits {target} parameters at depth {depth} "
        f"for dims {input_dim}->{output_dim}")


def init_xavier(spec: NetSpec, seed: int, *, uniform: bool = False) -> Array:
    """Xavier-initialized flat parameter vector; biases zero; deterministic."""
    rng = np.random.default_rng(np.uint64(seed) if seed >= 0 else seed)
    parts = []
    for fan_in, fan_out in spec.layer_dims():
        if uniform:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        else:
            w = rng.normal(0.0, np.sqrt(2.0 / (fan_in + fan_out)), size=(fan_out, fan_in))
        parts.append(w.ravel())
        parts.append(np.zeros(fan_out))
    return np.concatenate(parts)


def unpack(spec: NetSpec, flat: Array) -> list[tuple[Array, Array]]:
    """Split a flat vector into per-layer (W, b) with W shaped (out, in)."""
    if flat.shape != (param_count(spec),):
        raise ContractError(
            f"parameter vector length {flat.shape} != {param_count(spec)}")
    out, i = [], 0
    for fan_in, fan_out in spec.layer_dims():
        w = flat[i:i + fan_out * fan_in].reshape(fan_out, fan_in)
        i += fan_out * fan_in
        b = flat[i:i + fan_out]
        i += fan_out
        out.append((w, b))
    return out


def param_tensors(spec: NetSpec, flat: Array) -> list[tuple[Tensor, Tensor]]:
    """Leaf tensors per layer; weights stored transposed for right-matmul."""
    return [(Tensor(w.T.copy()), Tensor(b.copy())) for w, b in unpack(spec, flat)]


def flatten_grads(spec: NetSpec, grads: list[Array]) -> Array:
    """Inverse of param_tensors for the gradient list returned by tape.grad."""
    parts = []
    for k in range(0, len(grads), 2):
        parts.append(grads[k].T.ravel())
        parts.append(grads[k + 1].ravel())
    return np.concatenate(parts)


def _affine(h: Jet, wt, b) -> Jet:
    coeffs = [c @ wt for c in h.coeffs]
    coeffs[0] = coeffs[0] + b
    return Jet(coeffs)


def forward_batch(spec: NetSpec, layers, x: Jet) -> Jet:
    """Forward pass over a batch jet with coefficients shaped (N, input_dim).

    `layers` is either the output of `param_tensors` (recorded evaluation) or
    a list of (W_transposed, b) ndarrays (plain evaluation).
    """
    h = x
    for k, (wt, b) in enumerate(layers):
        h = _affine(h, wt, b)
        if k < len(layers) - 1:
            h = jet_activation(h, spec.activation)
    return h


def _stack_inputs(xs: list[Jet]) -> Jet:
    orders = {j.order for j in xs}
    if len(orders) != 1:
        raise ContractError("input jets must share one order")
    order = orders.pop()
    n = 1
    for j in xs:
        for c in j.coeffs:
            if isinstance(c, np.ndarray):
                n = max(n, c.shape[0])
    channels = []
    for k in range(order + 1):
        cols = [np.broadcast_to(np.asarray(j.coeffs[k], dtype=float), (n,)) for j in xs]
        channels.append(np.column_stack(cols))
    return Jet(channels)


def numpy_layers(spec: NetSpec, flat: Array) -> list[tuple[Array, Array]]:
    return [(w.T.copy(), b.copy()) for w, b in unpack(spec, flat)]


def forward(spec: NetSpec, params: Array, x) -> list:
    """Evaluate the net at one point given as p jets or p reals.

    Returns q jets (or q floats when the input was plain reals).
    """
    plain = not any(isinstance(v, Jet) for v in x)
    if len(x) != spec.input_dim:
        raise ContractError(
            f"expected {spec.input_dim} input coordinates, got {len(x)}")
    xs = [v if isinstance(v, Jet) else Jet([v]) for v in x]
    if plain:
        xs = [Jet([float(v)]) for v in x]
    out = forward_batch(spec, numpy_layers(spec, params), _stack_inputs(xs))
    result = []
    for j in range(spec.output_dim):
        coeffs = [np.asarray(c)[0, j] for c in out.coeffs]
        result.append(float(coeffs[0]) if plain else Jet([float(c) for c in coeffs]))
    return result


# checkpoints --------------------------------------------------------------

def save_checkpoint(path: str | Path, spec: NetSpec, seed: int, flat: Array,
                    extra: dict | None = None) -> None:
    """Portable text checkpoint; floats at 17 significant digits."""
    lines = ["pinnbench-checkpoint v1",
             f"input_dim: {spec.input_dim}",
             f"output_dim: {spec.output_dim}",
             f"depth: {spec.depth}",
             f"width: {spec.width}",
             f"activation: {spec.activation}",
             f"seed: {seed}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    lines.append(f"params: {flat.size}")
    lines.extend(format(v, ".17g") for v in flat)
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path: str | Path) -> tuple[NetSpec, int, Array, dict]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "pinnbench-checkpoint v1":
        raise ConfigurationError(f"{path} is not a pinnbench checkpoint")
    fields: dict[str, str] = {}
    i = 1
    while not lines[i].startswith("params:"):
        key, _, val = lines[i].partition(":")
        fields[key.strip()] = val.strip()
        i += 1
    count = int(lines[i].partition(":")[2])
    flat = np.array([float(v) for v in lines[i + 1:i + 1 + count]])
    spec = NetSpec(int(fields.pop("input_dim")), int(fields.pop("output_dim")),
                   int(fields.pop("depth")), int(fields.pop("width")),
                   fields.pop("activation"))
    seed = int(fields.pop("seed"))
    return spec, seed, flat, fields
