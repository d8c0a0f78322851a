"""Extension operators, k-plane transforms of |Ef|^2 and the two closed forms.

Three routes to the same number are kept deliberately independent:

* :func:`plane_integral_squared` integrates ``|Ef|^2`` over a truncated
  affine plane by brute force (Gauss-Legendre in the parameters, trapezoid
  on the plane);
* :func:`rhs_tangent_integral` integrates ``|f|^2 / |D sigma ^ plane^perp|``
  over the parameter box;
* :func:`composed_adjoint_transform` sums the pairing ``1 / |theta ^ plane|``
  over the atoms of a discrete measure on normal planes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .density import SurfaceDensity
from .errors import DimensionMismatch, OscillationBudgetWarning, TransversalityViolation
from .geometry import AffinePlane, Subspace, project_onto, wedge_abs, wedge_abs_batch
from .manifold import (
    check_transversality_GT,
    check_transversality_T,
    normal_frames,
    surface_jacobian,
    tangent_wedges,
)
from .quadrature import (
    QuadratureRule,
    compensated_sum,
    gauss_legendre_box,
    parallel_map,
    trapezoid_axis,
)

WEDGE_FLOOR = 1e-10
SHELL_FRACTION = 0.1
SHELL_FACTOR = 3.0


def _nodes(piece, f: SurfaceDensity, order: int):
    xi, w = gauss_legendre_box(piece.lower, piece.upper, order)
    return xi, piece(xi), w * f(piece, xi)


def image_diameter(M, res: int = 33) -> float:
    pts = np.concatenate([p(p.grid(res if p.k == 1 else 9)) for p in M.pieces])
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    return float(d.max())


def oscillation_budget(M, max_abs_x: float) -> float:
    """Gauss-Legendre order needed before Ef(x) is trusted for |x| <= max_abs_x."""
    return 4.0 * max_abs_x * image_diameter(M)


def _check_budget(M, q: QuadratureRule, max_abs_x: float) -> bool:
    need = oscillation_budget(M, max_abs_x)
    if q.order <= need:
        warnings.warn(
            f"quadrature order {q.order} does not exceed the oscillation budget {need:.0f} "
            f"for |x| <= {max_abs_x:.3g}",
            OscillationBudgetWarning, stacklevel=3,
        )
        return False
    return True


def extension_eval(M, f: SurfaceDensity, x, q: QuadratureRule | None = None):
    """Ef(x) = sum over pieces of int_U exp(-2 pi i x . sigma(xi)) f(xi) dxi.

    ``x`` may be one point or an ``(P, n)`` array.  Emits an
    :class:`OscillationBudgetWarning` (and still returns) when the order is
    too low for the largest ``|x|``.
    """
    q = q or QuadratureRule()
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x.reshape(-1, M.n)
    _check_budget(M, q, float(np.max(np.linalg.norm(X, axis=1))))
    out = np.zeros(len(X), dtype=complex)
    for piece in M.pieces:
        _, pts, vals = _nodes(piece, f, q.order)
        out += np.exp(-2j * np.pi * (X @ pts.T)) @ vals
    return out[0] if single else out


def extension_on_grid(M, f: SurfaceDensity, basis: np.ndarray, offset, axes, order: int) -> np.ndarray:
    """Ef on the tensor grid ``offset + sum_j axes[j][i_j] basis[:, j]``.

    The phase factorizes over grid axes, so each piece costs one matrix
    product per axis rather than a dense points-by-nodes exponential.
    Returns an array of shape ``tuple(len(a) for a in axes)``.
    """
    basis = np.asarray(basis, dtype=float)
    offset = np.asarray(offset, dtype=float)
    shape = tuple(len(a) for a in axes)
    k = len(axes)
    out = np.zeros(shape, dtype=complex)
    for piece in M.pieces:
        _, pts, vals = _nodes(piece, f, order)
        c = vals * np.exp(-2j * np.pi * (pts @ offset))
        proj = pts @ basis
        mats = [None] + [np.exp(-2j * np.pi * np.outer(axes[j], proj[:, j])) for j in range(1, k)]

        def rows(chunk, proj=proj, c=c, mats=mats):
            lead = np.exp(-2j * np.pi * np.outer(chunk, proj[:, 0])) * c
            if k == 1:
                return lead.sum(axis=1)
            for j in range(1, k - 1):
                lead = (lead[:, None, :] * mats[j][None, :, :]).reshape(-1, lead.shape[-1])
            return (lead @ mats[k - 1].T).reshape((len(chunk),) + shape[1:])

        chunks = np.array_split(np.asarray(axes[0], dtype=float), max(1, min(len(axes[0]), 16)))
        out += np.concatenate(parallel_map(rows, chunks), axis=0)
    return out


def _taper(c: np.ndarray, radius: float) -> np.ndarray:
    a = np.abs(c)
    start = (1 - SHELL_FRACTION) * radius
    t = np.clip((a - start) / (radius - start), 0.0, 1.0)
    return 0.5 * (1 + np.cos(np.pi * t))


@dataclass(frozen=True)
class PlaneIntegral:
    """A truncated plane integral with its tail estimate."""

    value: float
    tail_bound: float
    budget_ok: bool

    def __float__(self):
        return self.value


def grid_integral(values: np.ndarray, axis_weights, shell_masks=None) -> tuple[float, float]:
    """Weighted sum of ``values`` on a tensor grid plus the shell tail estimate."""
    W = axis_weights[0]
    for w in axis_weights[1:]:
        W = np.multiply.outer(W, w)
    terms = values * W
    total = compensated_sum(terms)
    tail = 0.0
    if shell_masks is not None:
        shell = np.zeros(values.shape, dtype=bool)
        for j, m in enumerate(shell_masks):
            idx = [None] * len(shell_masks)
            idx[j] = slice(None)
            shell |= m[tuple(idx)]
        tail = SHELL_FACTOR * abs(compensated_sum(terms[shell]))
    return total, tail


def plane_integral_squared(M, f: SurfaceDensity, plane: AffinePlane, q: QuadratureRule | None = None) -> PlaneIntegral:
    """T_{k,n}(|Ef|^2)(pi, y) by direct integration over the truncated plane.

    Integrates over the cube ``[-R, R]^k`` of plane coordinates with
    ``q.plane_points_per_axis`` trapezoid samples per axis.  ``tail_bound``
    is three times the contribution of the outermost 10% shell.
    """
    q = q or QuadratureRule()
    if plane.dim != M.k or plane.direction.ambient_dim != M.n:
        raise DimensionMismatch(f"need a {M.k}-plane in R^{M.n}")
    R = q.plane_trunc_radius
    c, w = trapezoid_axis(R, q.plane_points_per_axis)
    max_x = math.sqrt(M.k * R * R + float(plane.offset @ plane.offset))
    ok = _check_budget(M, q, max_x)
    E = extension_on_grid(M, f, plane.direction.basis, plane.offset, [c] * M.k, q.order)
    vals = np.abs(E) ** 2
    if q.window == "raised_cosine":
        taper = _taper(c, R)
        for j in range(M.k):
            idx = [None] * M.k
            idx[j] = slice(None)
            vals = vals * taper[tuple(idx)]
    shell = np.abs(c) > (1 - SHELL_FRACTION) * R
    value, tail = grid_integral(vals, [w] * M.k, [shell] * M.k)
    return PlaneIntegral(value, tail, ok)


def rhs_tangent_integral(M, f: SurfaceDensity, plane: Subspace, q: QuadratureRule | None = None) -> float:
    """int_U |f|^2 / (J |T S ^ plane^perp|) dxi, the tangent-wedge closed form.

    Since ``J |T S ^ plane^perp|`` is the wedge of the unnormalized frame
    ``d sigma/d xi_1 ^ ... ^ d sigma/d xi_k`` with plane^perp, this is
    the parametrized right-hand side directly.
    """
    q = q or QuadratureRule()
    terms = []
    for piece in M.pieces:
        xi, w = gauss_legendre_box(piece.lower, piece.upper, q.order)
        wedge = tangent_wedges(piece, xi, plane)
        if np.min(wedge) < WEDGE_FLOOR:
            bad = xi[np.argmin(wedge)]
            raise TransversalityViolation(f"tangent space meets plane^perp near xi={bad}")
        terms.append(w * np.abs(f(piece, xi)) ** 2 / (surface_jacobian(piece, xi) * wedge))
    return compensated_sum(np.concatenate(terms))


def plane_pair_weight(theta: Subspace, plane: Subspace) -> float:
    """int delta_{plane + y} delta_{theta + z} dx = 1 / |theta ^ plane|."""
    w = wedge_abs(theta, plane)
    if w <= WEDGE_FLOOR:
        raise TransversalityViolation(f"planes are not transverse (|theta ^ pi| = {w:.1e})")
    return 1.0 / w


# --------------------------------------------------------------------------
# discrete plane measures


@dataclass(frozen=True, eq=False)
class DiscretePlaneMeasure:
    """Weighted affine (n-k)-planes ``theta_i + {z_i}``.

    ``directions`` is the ``(N, n, n-k)`` stack of orthonormal frames,
    ``offsets`` the ``(N, n)`` translations (each orthogonal to its frame).
    When the measure was pushed forward from the tangent bundle,
    ``source_xi`` / ``source_piece`` / ``tangent_offsets`` record where each
    atom came from.
    """

    directions: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray
    source_xi: np.ndarray | None = None
    source_piece: np.ndarray | None = None
    tangent_offsets: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.asarray(self.weights) < 0):
            raise ValueError("plane measure weights must be nonnegative")
        if len(self.directions) != len(self.weights) or len(self.offsets) != len(self.weights):
            raise DimensionMismatch("directions, offsets and weights must align")

    @classmethod
    def from_atoms(cls, atoms) -> "DiscretePlaneMeasure":
        atoms = list(atoms)
        if not atoms:
            raise ValueError("use DiscretePlaneMeasure.empty(n, d) for the zero measure")
        dirs = np.stack([a.direction.basis for a, _ in atoms])
        offs = np.stack([a.offset for a, _ in atoms])
        return cls(dirs, offs, np.array([float(w) for _, w in atoms]))

    @classmethod
    def empty(cls, n: int, d: int) -> "DiscretePlaneMeasure":
        return cls(np.zeros((0, n, d)), np.zeros((0, n)), np.zeros(0))

    @property
    def atoms(self) -> list[tuple[AffinePlane, float]]:
        return [(AffinePlane(Subspace(d), o), float(w))
                for d, o, w in zip(self.directions, self.offsets, self.weights)]

    @property
    def total_mass(self) -> float:
        return compensated_sum(self.weights)

    def __len__(self):
        return len(self.weights)


def _tangent_offsets(rule, piece, xi, D):
    if callable(rule):
        y = np.asarray(rule(piece, xi), dtype=float).reshape(len(xi), piece.n)
    elif rule == "zero":
        return np.zeros((len(xi), piece.n))
    elif rule == "through_point":
        y = piece(xi)
    else:
        raise ValueError(f"unknown tangent offset rule {rule!r}")
    # keep only the tangential part so each atom's offset is orthogonal to its normal plane
    q, _ = np.linalg.qr(D)
    return np.einsum("nij,nj->ni", q, np.einsum("nji,nj->ni", q, y))


def pushforward_measure(M, f: SurfaceDensity, q: QuadratureRule | None = None,
                        tangent_offsets="zero") -> DiscretePlaneMeasure:
    """Discretize nu on the tangent bundle and push it to normal planes.

    Atom ``i`` sits at a Gauss-Legendre node ``xi_i`` with mass
    ``|f(xi_i)|^2 w_i / J(xi_i)`` (so the masses add up to
    ``int |g|^2 dsigma``) on the plane ``(T_xi S)^perp + {y_i}``.  The
    tangent offset ``y_i`` is ``0`` (rule ``"zero"``), the tangential part of
    ``sigma(xi_i)`` (rule ``"through_point"``: the normal plane through the
    point itself), or the tangential part of a user callable's output.
    """
    q = q or QuadratureRule()
    dirs, offs, wts, src, owner, toffs = [], [], [], [], [], []
    for i, piece in enumerate(M.pieces):
        xi, w = gauss_legendre_box(piece.lower, piece.upper, q.order)
        mass = w * np.abs(f(piece, xi)) ** 2 / surface_jacobian(piece, xi)
        keep = mass > 0
        xi, mass = xi[keep], mass[keep]
        D = piece.derivative(xi)
        y = _tangent_offsets(tangent_offsets, piece, xi, D)
        dirs.append(normal_frames(piece, xi))
        offs.append(y)
        toffs.append(y)
        wts.append(mass)
        src.append(xi)
        owner.append(np.full(len(xi), i))
    if not np.concatenate(wts).size:
        empty = DiscretePlaneMeasure.empty(M.n, M.n - M.k)
        return empty
    return DiscretePlaneMeasure(
        np.concatenate(dirs), np.concatenate(offs), np.concatenate(wts),
        np.concatenate(src), np.concatenate(owner), np.concatenate(toffs),
        {"rule": tangent_offsets if isinstance(tangent_offsets, str) else "custom"},
    )


def composed_adjoint_transform(mu: DiscretePlaneMeasure, plane: Subspace, y=None) -> float:
    """T_{k,n} T*_{n-k,n} mu at (plane, y) = sum_i w_i / |theta_i ^ plane|.

    ``y`` is accepted for symmetry with the other two routes and ignored:
    the pairing of transverse planes does not depend on translations.
    """
    if len(mu) == 0:
        return 0.0
    if mu.directions.shape[1] != plane.ambient_dim or mu.directions.shape[2] + plane.dim != plane.ambient_dim:
        raise DimensionMismatch("atom directions are not complementary to the plane")
    wedge = wedge_abs_batch(mu.directions, plane)
    if np.min(wedge) <= WEDGE_FLOOR:
        raise TransversalityViolation("an atom direction is not transverse to the plane")
    return compensated_sum(mu.weights / wedge)


# --------------------------------------------------------------------------
# the identity check


@dataclass
class IdentityReport:
    rhs: float
    lhs: list
    adjoint: float
    y_samples: list
    identity_error: float
    y_spread: float
    tail_bound: float
    margin_T: float
    margin_GT: float
    budget_ok: bool


def affine_plane(plane: Subspace, y) -> AffinePlane:
    """plane + {y}, with ``y`` replaced by its component in plane^perp
    (the two describe the same affine plane)."""
    y = np.asarray(y, dtype=float)
    return AffinePlane(plane, y - project_onto(y, plane))


def verify_identity(M, f: SurfaceDensity, plane: Subspace, y_samples, q: QuadratureRule | None = None,
                    grid_res: int | None = None) -> IdentityReport:
    """Compare the plane integrals at each offset with the closed forms.

    Refuses to run (``TransversalityViolation``) unless both grid checks
    pass.  ``identity_error`` is ``max_j |L_j - rhs| / rhs`` and
    ``y_spread`` is ``(max L - min L) / rhs``; both are 0 when everything
    vanishes.
    """
    q = q or QuadratureRule()
    t = check_transversality_T(M, plane, grid_res)
    gt = check_transversality_GT(M, plane, grid_res)
    if not t.passed:
        raise TransversalityViolation(f"(T) fails against the plane (margin {t.margin:.3e})")
    if not gt.passed:
        raise TransversalityViolation(f"(GT) fails against the plane (margin {gt.margin:.3e})")
    rhs = rhs_tangent_integral(M, f, plane, q)
    adj = composed_adjoint_transform(pushforward_measure(M, f, q), plane)
    results = [plane_integral_squared(M, f, affine_plane(plane, y), q) for y in y_samples]
    lhs = [r.value for r in results]
    if rhs == 0.0:
        err = max((abs(v) for v in lhs), default=0.0)
        spread = (max(lhs) - min(lhs)) if lhs else 0.0
    else:
        err = max(abs(v - rhs) / rhs for v in lhs) if lhs else 0.0
        spread = (max(lhs) - min(lhs)) / rhs if lhs else 0.0
    return IdentityReport(
        rhs, lhs, adj, [np.asarray(y, dtype=float).tolist() for y in y_samples], err, spread,
        max((r.tail_bound for r in results), default=0.0), t.margin, gt.margin,
        all(r.budget_ok for r in results),
    )
