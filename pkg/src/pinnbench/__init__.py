"""PDE benchmark suite for constraint-included physics-informed networks.

Library layers, bottom up: tape (reverse-mode autodiff), jets (truncated
Taylor arithmetic), network (uniform-width nets), pde_zoo (problems and
exact solutions), sampling, models (predictor transforms), losses,
training, presets, harness, cli.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import PinnbenchError  # noqa: F401
