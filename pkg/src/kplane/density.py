"""Densities on parameter domains.

A :class:`SurfaceDensity` is the parametrized density ``f`` on the box ``U``
of each piece.  The surface density ``g`` on S is tied to it by
``f(xi) = J(xi) g(sigma(xi))`` with ``J`` the surface Jacobian, so that
``int |g|^2 dsigma = int |f|^2 / J dxi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .manifold import surface_jacobian
from .quadrature import compensated_sum, gauss_legendre_box

KINDS = ("smooth_bump", "indicator", "gaussian_truncated", "custom")


def _unit_coords(piece, xi):
    """Affine map of the box onto [-1, 1]^k."""
    return (2.0 * xi - piece.lower - piece.upper) / piece.width


@dataclass(frozen=True, eq=False)
class SurfaceDensity:
    kind: str = "smooth_bump"
    params: dict = field(default_factory=dict)
    fn: Callable | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("a custom density needs fn")

    @property
    def smoothness_tag(self) -> str:
        return self.kind

    def __call__(self, piece, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float).reshape(-1, piece.k)
        amp = complex(self.params.get("amplitude", 1.0))
        if self.kind == "custom":
            return np.asarray(self.fn(xi), dtype=complex)
        s = _unit_coords(piece, xi)
        inside = np.all(np.abs(s) < 1.0, axis=1)
        if self.kind == "indicator":
            vals = np.where(np.all(np.abs(s) <= 1.0, axis=1), 1.0, 0.0)
        elif self.kind == "smooth_bump":
            with np.errstate(divide="ignore", over="ignore"):
                e = np.where(np.abs(s) < 1.0, 1.0 - 1.0 / (1.0 - np.minimum(s * s, 1.0)), -np.inf)
            vals = np.where(inside, np.exp(e.sum(axis=1)), 0.0)
        else:
            width = float(self.params.get("width", 0.35))
            vals = np.where(np.all(np.abs(s) <= 1.0, axis=1),
                            np.exp(-0.5 * np.sum(s * s, axis=1) / width**2), 0.0)
        return amp * vals.astype(complex)

    def scaled(self, c) -> "SurfaceDensity":
        p = dict(self.params)
        p["amplitude"] = complex(p.get("amplitude", 1.0)) * c
        return SurfaceDensity(self.kind, p, self.fn)


def smooth_bump(amplitude=1.0) -> SurfaceDensity:
    """exp(1 - 1/(1 - s^2)) per axis in unit box coordinates; peak value 1."""
    return SurfaceDensity("smooth_bump", {"amplitude": amplitude})


def indicator(amplitude=1.0) -> SurfaceDensity:
    return SurfaceDensity("indicator", {"amplitude": amplitude})


def gaussian_truncated(width=0.35, amplitude=1.0) -> SurfaceDensity:
    return SurfaceDensity("gaussian_truncated", {"width": width, "amplitude": amplitude})


def build_density(kind: str, params: dict | None = None) -> SurfaceDensity:
    params = dict(params or {})
    if kind == "custom" or kind not in KINDS:
        raise KeyError(f"unknown density family {kind!r}; known: {list(KINDS[:-1])}")
    return SurfaceDensity(kind, params)


def param_norm_sq(M, f: SurfaceDensity, order: int = 128) -> float:
    """||f||^2 in L^2(U, dxi), summed over pieces."""
    total = []
    for piece in M.pieces:
        xi, w = gauss_legendre_box(piece.lower, piece.upper, order)
        total.append(w * np.abs(f(piece, xi)) ** 2)
    return compensated_sum(np.concatenate(total))


def surface_norm_sq(M, f: SurfaceDensity, order: int = 128) -> float:
    """||g||^2 in L^2(S, dsigma) = int |f|^2 / J dxi."""
    total = []
    for piece in M.pieces:
        xi, w = gauss_legendre_box(piece.lower, piece.upper, order)
        total.append(w * np.abs(f(piece, xi)) ** 2 / surface_jacobian(piece, xi))
    return compensated_sum(np.concatenate(total))
