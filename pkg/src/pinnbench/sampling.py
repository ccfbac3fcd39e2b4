"""Seeded generation of collocation sets and evaluation meshes.

All randomness goes through numpy's default PCG64 generator so that a
(problem, role, counts, seed) tuple pins the point set on any platform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError
from .pde_zoo import BLOWUP_EPS, PdeProblem

Array = np.ndarray


@dataclass(frozen=True)
class SampleSet:
    """Immutable point set; points has shape (count, input_dim)."""

    points: Array
    role: str
    seed: int
    per_face: tuple | None = None

    def __len__(self) -> int:
        return self.points.shape[0]


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample_bulk(problem: PdeProblem, n: int, seed: int) -> SampleSet:
    """n uniform points in the open space-time box."""
    if n < 1:
        raise ContractError("bulk sample count must be positive")
    rng = _rng(seed)
    bounds = problem.axis_bounds()
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def draw(count):
        return lo + (hi - lo) * rng.random((count, len(bounds)))

    pts = draw(n)
    while True:
        bad = np.any((pts == lo) | (pts == hi), axis=1)
        if problem.kind == "burgers2_inviscid":
            bad |= np.abs(1.0 - 2.0 * pts[:, -1] ** 2) < BLOWUP_EPS
        if not bad.any():
            break
        pts[bad] = draw(int(bad.sum()))
    return SampleSet(pts, "bulk", seed)


def face_list(problem: PdeProblem) -> list[tuple[int, int]]:
    """(axis, side) pairs for every spatial face, in axis-major order."""
    return [(axis, side) for axis in range(problem.spatial_dim) for side in (0, 1)]


def sample_boundary(problem: PdeProblem, per_face, seed: int) -> SampleSet:
    """Uniform points per spatial face with the face coordinate pinned exactly."""
    faces = face_list(problem)
    if isinstance(per_face, int):
        counts = [per_face] * len(faces)
    else:
        counts = list(per_face)
        if len(counts) != len(faces):
            raise ContractError(
                f"expected {len(faces)} per-face counts, got {len(counts)}")
    rng = _rng(seed)
    bounds = problem.axis_bounds()
    blocks = []
    for (axis, side), count in zip(faces, counts):
        if count == 0:
            continue
        pts = np.empty((count, problem.input_dim))
        for j, (lo, hi) in enumerate(bounds):
            pts[:, j] = lo + (hi - lo) * rng.random(count)
        pts[:, axis] = bounds[axis][side]
        blocks.append(pts)
    pts = np.concatenate(blocks) if blocks else np.empty((0, problem.input_dim))
    return SampleSet(pts, "boundary", seed, per_face=tuple(counts))


def sample_initial(problem: PdeProblem, n: int, seed: int) -> SampleSet:
    """n uniform spatial points with t pinned to exactly 0."""
    if not problem.has_time:
        raise ContractError(f"{problem.kind} has no initial slice")
    rng = _rng(seed)
    pts = np.empty((n, problem.input_dim))
    for j, (lo, hi) in enumerate(problem.space_bounds):
        pts[:, j] = lo + (hi - lo) * rng.random(n)
    pts[:, -1] = 0.0
    return SampleSet(pts, "initial", seed)


def test_mesh(problem: PdeProblem, resolution) -> SampleSet:
    """Tensor-product uniform grid including endpoints."""
    if isinstance(resolution, int):
        resolution = [resolution] * problem.input_dim
    if len(resolution) != problem.input_dim or any(r < 2 for r in resolution):
        raise ContractError(f"bad mesh resolution {resolution}")
    axes = [np.linspace(lo, hi, r)
            for (lo, hi), r in zip(problem.axis_bounds(), resolution)]
    if problem.kind == "burgers2_inviscid":
        t = axes[-1]
        axes[-1] = t[np.abs(1.0 - 2.0 * t ** 2) >= BLOWUP_EPS]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return SampleSet(pts, "test", 0)


def export_csv(sample_set: SampleSet, path) -> None:
    """One row per point, coordinates at full precision."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(sample_set.points.shape[1])])
        for row in sample_set.points:
            writer.writerow([format(v, ".17g") for v in row])
