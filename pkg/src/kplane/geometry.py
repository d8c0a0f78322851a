"""Linear and affine subspaces, orthogonal projection and the wedge |V ^ W|.

Subspaces are stored through an orthonormal frame (the columns of an
``(n, d)`` array).  Every constructor re-orthonormalizes, so the wedge of two
complementary subspaces is just the absolute determinant of the two frames
placed side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateSpan, DimensionMismatch

DEGENERACY_RTOL = 1e-10


def _as_frame(vectors) -> np.ndarray:
    """Stack a list of vectors as the columns of a 2-d float array."""
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DimensionMismatch("expected a non-empty list of vectors")
    return arr.T.copy()


def _gram_schmidt(frame: np.ndarray) -> np.ndarray:
    # modified Gram-Schmidt with one reorthogonalization pass ("twice is enough")
    q = frame.copy()
    for j in range(q.shape[1]):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


@dataclass(frozen=True, eq=False)
class Subspace:
    """A ``d``-dimensional linear subspace of R^n held by an orthonormal frame.

    Build one with :func:`orthonormalize` (or :meth:`Subspace.span`); the
    plain constructor trusts that ``basis`` already has orthonormal columns.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        if b.ndim != 2 or not 0 < b.shape[1] <= b.shape[0]:
            raise DimensionMismatch(f"basis of shape {b.shape} is not (n, d) with 0 < d <= n")

    @classmethod
    def span(cls, vectors) -> "Subspace":
        return orthonormalize(vectors)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, j].copy() for j in range(self.dim)]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def complement(self) -> "Subspace":
        """Orthogonal complement, or raise ``DimensionMismatch`` if it is {0}."""
        n, d = self.basis.shape
        if d == n:
            raise DimensionMismatch("the complement of the whole space is {0}")
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(_gram_schmidt(u[:, d:]))

    def coordinates(self, x) -> np.ndarray:
        """Coordinates of (the projection of) ``x`` in this frame."""
        return np.asarray(x, dtype=float) @ self.basis

    def __repr__(self):
        return f"Subspace(n={self.ambient_dim}, d={self.dim})"


def orthonormalize(vectors) -> Subspace:
    """Orthonormal basis of ``span(vectors)`` by Gram-Schmidt.

    The input order is respected: the first output vector is the normalized
    first input, and so on.  Raises ``DegenerateSpan`` when the smallest
    singular value of the frame is below ``1e-10`` times the largest.
    """
    frame = _as_frame(vectors)
    n, d = frame.shape
    if d > n:
        raise DegenerateSpan(f"{d} vectors in R^{n} cannot be independent")
    s = np.linalg.svd(frame, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= DEGENERACY_RTOL * s[0]:
        raise DegenerateSpan(f"frame is rank deficient (singular values {s})")
    return Subspace(_gram_schmidt(frame))


def coordinate_subspace(n: int, axes) -> Subspace:
    """span{e_i : i in axes} in R^n (0-based axes)."""
    return Subspace(np.eye(n)[:, list(axes)])


def line(direction) -> Subspace:
    return orthonormalize([direction])


@dataclass(frozen=True, eq=False)
class AffinePlane:
    """The affine plane ``direction + {offset}`` with ``offset`` in direction^perp."""

    direction: Subspace
    offset: np.ndarray

    def __post_init__(self):
        off = np.array(self.offset, dtype=float).reshape(-1)
        if off.shape[0] != self.direction.ambient_dim:
            raise DimensionMismatch("offset and direction live in different ambient spaces")
        if np.linalg.norm(self.direction.coordinates(off)) > 1e-12 * max(1.0, np.linalg.norm(off)):
            raise DimensionMismatch("offset must lie in the orthogonal complement of the direction")
        off.setflags(write=False)
        object.__setattr__(self, "offset", off)

    @classmethod
    def through(cls, direction: Subspace, point) -> "AffinePlane":
        """The translate of ``direction`` passing through ``point``."""
        p = np.asarray(point, dtype=float)
        return cls(direction, p - project_onto(p, direction))

    @property
    def dim(self) -> int:
        return self.direction.dim


def _check_complementary(V: Subspace, W: Subspace):
    if V.ambient_dim != W.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {V.ambient_dim} vs {W.ambient_dim}")
    if V.dim + W.dim != V.ambient_dim:
        raise DimensionMismatch(
            f"dimensions {V.dim} + {W.dim} are not complementary in R^{V.ambient_dim}"
        )


def wedge_abs(V: Subspace, W: Subspace) -> float:
    """|V ^ W|: absolute determinant of the two orthonormal frames side by side.

    Equals 1 for orthogonal complements and 0 when V and W share a direction.
    """
    _check_complementary(V, W)
    return float(abs(np.linalg.det(np.hstack([V.basis, W.basis]))))


def wedge_abs_batch(frames: np.ndarray, W: Subspace) -> np.ndarray:
    """wedge_abs for a stack of orthonormal frames ``(N, n, d)`` against one W."""
    frames = np.asarray(frames, dtype=float)
    N, n, d = frames.shape
    if n != W.ambient_dim or d + W.dim != n:
        raise DimensionMismatch("frames are not complementary to W")
    full = np.concatenate([frames, np.broadcast_to(W.basis, (N, n, W.dim))], axis=2)
    return np.abs(np.linalg.det(full))


def orthonormal_frames(frames: np.ndarray) -> np.ndarray:
    """Orthonormalize each ``(n, d)`` frame of a stack (reduced QR)."""
    q, _ = np.linalg.qr(np.asarray(frames, dtype=float))
    return q


def project_onto(x, V: Subspace) -> np.ndarray:
    """Orthogonal projection of ``x`` (or rows of ``x``) onto V."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != V.ambient_dim:
        raise DimensionMismatch(f"vector of length {x.shape[-1]} projected onto a subspace of R^{V.ambient_dim}")
    return (x @ V.basis) @ V.basis.T


@lru_cache(maxsize=None)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def wedge_gaussian_oracle(V: Subspace, W: Subspace, quad_order: int = 32, radius: float = 6.0) -> float:
    r"""Numerically integrate ``\int_V \int_W exp(-pi |u + w|^2) du dw``.

    The integrand is written in the coordinates ``z = (a, b)`` of the two
    frames, ``u + w = [V W] z``, and integrated one coordinate at a time with
    ``quad_order`` Gauss-Legendre nodes.  Each coordinate's window is centred
    on the conditional mode of the Gaussian given the outer coordinates and
    spans ``radius`` conditional standard deviations either side.  The window
    placement uses the pivots of the quadratic form; the value itself comes
    only from summing the integrand at the nodes.

    The result is ``1 / wedge_abs(V, W)``.
    """
    _check_complementary(V, W)
    if quad_order < 8:
        raise ValueError("quad_order must be at least 8")
    M = np.hstack([V.basis, W.basis])
    G = M.T @ M
    n = G.shape[0]

    # Schur complements: level j sees the quadratic form in z_0..z_j with the
    # inner coordinates z_{j+1}.. eliminated.
    forms = [None] * n
    S = G.copy()
    for j in range(n - 1, -1, -1):
        forms[j] = S
        if j:
            S = S[:j, :j] - np.outer(S[:j, j], S[j, :j]) / S[j, j]

    x, w = _leggauss(quad_order)
    nodes = np.zeros((1, 0))
    weights = np.ones(1)
    for j in range(n):
        S = forms[j]
        kappa = S[j, j]
        centre = -(nodes @ S[:j, j]) / kappa
        half = radius / np.sqrt(2.0 * np.pi * kappa)
        zj = centre[:, None] + half * x[None, :]
        nodes = np.concatenate(
            [np.repeat(nodes, quad_order, axis=0), zj.reshape(-1, 1)], axis=1
        )
        weights = (weights[:, None] * (half * w)[None, :]).reshape(-1)
    quad = np.einsum("pi,ij,pj->p", nodes, G, nodes)
    return float(np.sum(weights * np.exp(-np.pi * quad)))
