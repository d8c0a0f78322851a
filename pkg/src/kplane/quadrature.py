"""Quadrature settings and tensor Gauss-Legendre rules on parameter boxes."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

THREADS_ENV = "KPLANE_NUM_THREADS"


@dataclass(frozen=True)
class QuadratureRule:
    """Discretization settings shared by every integral in the package.

    order
        Gauss-Legendre nodes per parameter axis.
    plane_trunc_radius
        Plane integrals run over the cube ``[-R, R]^k`` in plane coordinates.
    plane_points_per_axis
        Uniform (trapezoid) samples per plane axis.
    window
        ``"raised_cosine"`` tapers the outer 10% of the cube.  Diagnostic
        only: a windowed integral is not the transform.
    """

    order: int = 64
    plane_trunc_radius: float = 30.0
    plane_points_per_axis: int = 512
    window: str = "none"

    def __post_init__(self):
        if self.order < 8:
            raise ValueError("quadrature order must be at least 8")
        if not self.plane_trunc_radius > 0:
            raise ValueError("plane_trunc_radius must be positive")
        if self.plane_points_per_axis < 8:
            raise ValueError("plane_points_per_axis must be at least 8")
        if self.window not in ("none", "raised_cosine"):
            raise ValueError(f"unknown window {self.window!r}")

    def refined(self, factor: int = 2) -> "QuadratureRule":
        """Same truncation, ``factor`` times the nodes and plane samples."""
        return replace(self, order=self.order * factor,
                       plane_points_per_axis=self.plane_points_per_axis * factor)

    def as_dict(self) -> dict:
        return asdict(self)


# desk-scale presets; n=3 runs get a smaller plane grid
PRESET_N2 = QuadratureRule()
PRESET_N3 = QuadratureRule(order=64, plane_trunc_radius=15.0, plane_points_per_axis=128)


@lru_cache(maxsize=None)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_box(lower, upper, order: int):
    """Tensor Gauss-Legendre nodes ``(order**k, k)`` and weights on a box."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    x, w = _leggauss(order)
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    axes = [mid[j] + half[j] * x for j in range(len(lower))]
    wts = [half[j] * w for j in range(len(lower))]
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
    weights = wts[0]
    for extra in wts[1:]:
        weights = np.multiply.outer(weights, extra)
    return nodes, np.asarray(weights).reshape(-1)


def trapezoid_axis(radius: float, points: int):
    """Uniform samples on ``[-radius, radius]`` with trapezoid weights."""
    c = np.linspace(-radius, radius, points)
    h = c[1] - c[0]
    w = np.full(points, h)
    w[0] = w[-1] = 0.5 * h
    return c, w


def num_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Map ``fn`` over ``items`` on a thread pool; results keep input order."""
    items = list(items)
    nt = min(num_threads(), len(items))
    if nt <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=nt) as pool:
        return list(pool.map(fn, items))


def compensated_sum(values) -> float:
    """Order-insensitive float sum (``math.fsum``) of an array of any shape."""
    return math.fsum(np.asarray(values, dtype=float).reshape(-1).tolist())
