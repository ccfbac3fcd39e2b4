"""Elementwise math that works uniformly on floats, arrays, tensors and jets.

Closed-form solutions and boundary data are written once against these
functions and can then be evaluated numerically, under the tape, or with
jet inputs (yielding their input derivatives for free).
"""

from __future__ import annotations

import numpy as np

from . import tape
from .jets import Jet, jet_compose, _exp_derivs, _sin_derivs, _tanh_derivs, _sigmoid_derivs
from .tape import Tensor


def exp(x):
    if isinstance(x, Jet):
        return jet_compose(x, _exp_derivs)
    if isinstance(x, Tensor):
        return tape.exp(x)
    return np.exp(x)


def sin(x):
    if isinstance(x, Jet):
        return jet_compose(x, _sin_derivs)
    if isinstance(x, Tensor):
        return tape.sin(x)
    return np.sin(x)


def _cos_derivs(v, order):
    if isinstance(v, Tensor):
        s, c = tape.sin(v), tape.cos(v)
    else:
        s, c = np.sin(v), np.cos(v)
    cycle = [c, -s, -c, s]
    return [cycle[k % 4] for k in range(order + 1)]


def cos(x):
    if isinstance(x, Jet):
        return jet_compose(x, _cos_derivs)
    if isinstance(x, Tensor):
        return tape.cos(x)
    return np.cos(x)


def tanh(x):
    if isinstance(x, Jet):
        return jet_compose(x, _tanh_derivs)
    if isinstance(x, Tensor):
        return tape.tanh(x)
    return np.tanh(x)


def sigmoid(x):
    if isinstance(x, Jet):
        return jet_compose(x, _sigmoid_derivs)
    if isinstance(x, Tensor):
        return tape.sigmoid(x)
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def sech2(x):
    """sech^2 via 1 - tanh^2, jet/tensor safe."""
    t = tanh(x)
    return 1.0 - t * t
