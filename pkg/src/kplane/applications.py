"""Consequences of the plane-transform identity, each reduced to numerics.

* Schrodinger energy conservation (the paraboloid over horizontal planes);
* the n-linear convolution identity for hypersurfaces;
* rank-one restriction-Brascamp-Lieb: the basis-hull feasibility LP and the
  multilinear L^2 ratio it reduces to;
* the weighted L^2 identity for weights in the image of the adjoint
  k-plane transform;
* the two-cap scan showing y-dependence once (GT) fails.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .density import SurfaceDensity, param_norm_sq
from .errors import (
    DimensionMismatch,
    NormalWedgeDegenerate,
    TooManyMaps,
    TransversalityViolation,
    WrongScenario,
)
from .geometry import AffinePlane, Subspace, coordinate_subspace, orthonormalize, wedge_abs, wedge_abs_batch
from .lp import find_feasible_point
from .manifold import (
    check_transversality_GT,
    check_transversality_T,
    normal_frames,
    paraboloid,
    surface_jacobian,
    unit_normal,
)
from .quadrature import QuadratureRule, compensated_sum, gauss_legendre_box, trapezoid_axis
from .transform import (
    WEDGE_FLOOR,
    _check_budget,
    affine_plane,
    extension_on_grid,
    grid_integral,
    plane_integral_squared,
)

NORMAL_WEDGE_FLOOR = 1e-6
MAX_MAPS = 12


def _rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a - b)


# --------------------------------------------------------------------------
# Schrodinger


def schrodinger_energy_scan(f: SurfaceDensity, t_samples, q: QuadratureRule | None = None,
                            dim: int = 1, lower=-1.0, upper=1.0):
    """Energy ``int |u(x, t)|^2 dx`` of u = Ef for the paraboloid (xi, |xi|^2).

    u solves the free Schrodinger equation with u(., 0) the Fourier transform
    of f, so the energies should all equal ``||f||_2^2``.  Returns a list of
    ``(t, energy)`` pairs.
    """
    q = q or QuadratureRule()
    M = paraboloid(dim, lower, upper)
    horizontal = coordinate_subspace(dim + 1, range(dim))
    out = []
    for t in t_samples:
        y = np.zeros(dim + 1)
        y[-1] = float(t)
        out.append((float(t), plane_integral_squared(M, f, AffinePlane(horizontal, y), q).value))
    return out


# --------------------------------------------------------------------------
# convolution identity


@dataclass
class ConvolutionReport:
    x_samples: list
    lhs: list
    rhs: float
    rel_errors: list
    spread: float
    min_normal_wedge: float
    tail_bound: float
    budget_ok: bool

    @property
    def max_rel_error(self) -> float:
        return max(self.rel_errors, default=0.0)


def _hypersurface_nodes(M, f, order):
    (piece,) = M.pieces
    xi, w = gauss_legendre_box(piece.lower, piece.upper, order)
    mass = w * np.abs(f(piece, xi)) ** 2 / surface_jacobian(piece, xi)
    return mass, unit_normal(piece, xi)


def convolution_rhs(manifolds, densities, order: int) -> tuple[float, float]:
    """int |g_1|^2 |g_2|^2 / |v_1 ^ v_2| dsigma_1 dsigma_2 and the smallest wedge."""
    (m1, v1), (m2, v2) = (_hypersurface_nodes(M, f, order) for M, f in zip(manifolds, densities))
    wedge = np.abs(v1[:, None, 0] * v2[None, :, 1] - v1[:, None, 1] * v2[None, :, 0])
    lo = float(wedge.min())
    if lo < NORMAL_WEDGE_FLOOR:
        raise NormalWedgeDegenerate(f"normals nearly parallel (|v1 ^ v2| = {lo:.1e})")
    return compensated_sum(np.outer(m1, m2) / wedge), lo


def convolution_identity_check(manifolds, densities, x_samples, q: QuadratureRule | None = None) -> ConvolutionReport:
    """Check that |E_1 g_1|^2 * |E_2 g_2|^2 is the constant predicted by the identity.

    The convolution at each sample is integrated over ``[-R, R]^2`` with
    ``q.plane_points_per_axis`` trapezoid points per axis.  Only n = 2.
    """
    q = q or QuadratureRule()
    if len(manifolds) != 2 or any(M.n != 2 or M.k != 1 for M in manifolds):
        raise DimensionMismatch("the convolution check is implemented for two curves in R^2")
    rhs, lo = convolution_rhs(manifolds, densities, q.order)
    R = q.plane_trunc_radius
    c, w = trapezoid_axis(R, q.plane_points_per_axis)
    xs = [np.asarray(x, dtype=float) for x in x_samples]
    far = math.sqrt(2) * R + max((float(np.linalg.norm(x)) for x in xs), default=0.0)
    ok = all([_check_budget(M, q, far) for M in manifolds])
    I = np.eye(2)
    first = np.abs(extension_on_grid(manifolds[0], densities[0], I, np.zeros(2), [c, c], q.order)) ** 2
    shell = np.abs(c) > 0.9 * R
    lhs, tails = [], []
    for x in xs:
        # |E_2 g_2(x - x')|^2 on the same x' grid
        second = np.abs(extension_on_grid(manifolds[1], densities[1], -I, x, [c, c], q.order)) ** 2
        v, t = grid_integral(first * second, [w, w], [shell, shell])
        lhs.append(v)
        tails.append(t)
    errs = [_rel(v, rhs) for v in lhs]
    spread = (max(lhs) - min(lhs)) / rhs if lhs and rhs else 0.0
    return ConvolutionReport([x.tolist() for x in xs], lhs, rhs, errs, spread, lo,
                             max(tails, default=0.0), ok)


def diagonal_zero_sum_plane(n: int) -> Subspace:
    """{(x_1, ..., x_n) in (R^n)^n : x_1 + ... + x_n = 0}."""
    S = np.hstack([np.eye(n)] * n)
    _, _, vt = np.linalg.svd(S)
    return orthonormalize(vt[n:])


def product_wedge_factor(normals) -> tuple[float, float]:
    """Both sides of |(T S)^perp ^ pi| = n^(-n/2) |v_1 ^ ... ^ v_n|.

    ``S`` is a product of hypersurfaces with unit normals ``v_j``, so its
    normal space in R^(n^2) is spanned by the block vectors carrying ``v_j``
    in slot ``j``; ``pi`` is the zero-sum plane.  The first value is the
    n^2 x n^2 determinant, the second the n x n formula.
    """
    V = np.asarray(normals, dtype=float)
    n = V.shape[0]
    if V.shape != (n, n):
        raise DimensionMismatch("need n unit normals in R^n")
    if not np.allclose(np.linalg.norm(V, axis=1), 1.0, atol=1e-12):
        raise ValueError("normals must be unit vectors")
    blocks = np.zeros((n, n * n))
    for j in range(n):
        blocks[j, j * n:(j + 1) * n] = V[j]
    normal_space = Subspace(blocks.T)  # block vectors are already orthonormal
    direct = wedge_abs(normal_space, diagonal_zero_sum_plane(n))
    return direct, n ** (-n / 2) * abs(float(np.linalg.det(V)))


# --------------------------------------------------------------------------
# Brascamp-Lieb


@dataclass(frozen=True)
class BLInstance:
    vectors: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        p = np.asarray(self.p, dtype=float).reshape(-1)
        if len(p) != len(v):
            raise DimensionMismatch("one exponent per map")
        if not np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12):
            raise ValueError("BL data vectors must be unit vectors")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("exponents must lie in [0, 1]")
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def m(self) -> int:
        return self.vectors.shape[0]


@dataclass
class BLFeasibility:
    feasible: bool
    lambdas: dict
    bases: list
    farkas: np.ndarray | None = None

    def residual(self, inst: BLInstance) -> float:
        """max |sum lambda_J p^J - p|, |sum lambda_J - 1|."""
        acc = np.zeros(inst.m)
        for J, lam in self.lambdas.items():
            acc[list(J)] += lam
        return max(float(np.max(np.abs(acc - inst.p))), abs(sum(self.lambdas.values()) - 1.0))


def bl_feasibility(inst: BLInstance) -> BLFeasibility:
    """Is p in the convex hull of the indicator vectors of bases among the v_j?

    Solves ``sum lambda_J 1_J = p``, ``sum lambda_J = 1``, ``lambda >= 0``
    by phase-one simplex.  Feasible results carry the convex weights, keyed
    by index tuples; infeasible ones carry a Farkas vector ``y`` (first m
    entries against the exponent rows, last against the normalization).
    """
    if inst.m > MAX_MAPS:
        raise TooManyMaps(f"{inst.m} maps exceeds the enumeration cap of {MAX_MAPS}")
    bases = [J for J in itertools.combinations(range(inst.m), inst.n)
             if abs(np.linalg.det(inst.vectors[list(J)])) > 1e-10]
    if not bases:
        return BLFeasibility(False, {}, [], None)
    A = np.zeros((inst.m + 1, len(bases)))
    for col, J in enumerate(bases):
        A[list(J), col] = 1.0
    A[-1] = 1.0
    b = np.concatenate([inst.p, [1.0]])
    res = find_feasible_point(A, b)
    if not res.feasible:
        return BLFeasibility(False, {}, bases, res.farkas)
    lambdas = {J: float(x) for J, x in zip(bases, res.x) if x > 0}
    return BLFeasibility(True, lambdas, bases, None)


@dataclass
class L2Ratio:
    ratio: float
    numerator_sq: float
    denominator_sq: float
    predicted: float
    tail_bound: float
    budget_ok: bool


def multilinear_l2_ratio(manifolds, densities, q: QuadratureRule | None = None) -> L2Ratio:
    """||prod_j E_j g_j||_2 / prod_j ||g_j||_2 for n curves in R^n.

    The numerator is a brute-force integral over ``[-R, R]^n``.  ``predicted``
    is the value the change of variables (s_j) -> sum_j sigma_j(s_j) gives,
    ``(int prod |g_j|^2 / |det[sigma_j'(s_j)]| ds)^(1/2) / prod ||g_j||``,
    valid when that map is injective.
    """
    q = q or QuadratureRule()
    n = len(manifolds)
    if any(M.n != n or M.k != 1 for M in manifolds):
        raise DimensionMismatch("need n curves in R^n")
    centres = [M.pieces[0].lower + 0.5 * M.pieces[0].width for M in manifolds]
    T0 = np.stack([M.derivative(c)[:, 0] for M, c in zip(manifolds, centres)])
    T0 /= np.linalg.norm(T0, axis=1, keepdims=True)
    if abs(np.linalg.det(T0)) < NORMAL_WEDGE_FLOOR:
        raise NormalWedgeDegenerate("tangents at the base points do not form a basis")

    R = q.plane_trunc_radius
    c, w = trapezoid_axis(R, q.plane_points_per_axis)
    ok = all([_check_budget(M, q, math.sqrt(n) * R) for M in manifolds])
    prod = np.ones((len(c),) * n)
    for M, f in zip(manifolds, densities):
        prod = prod * np.abs(extension_on_grid(M, f, np.eye(n), np.zeros(n), [c] * n, q.order)) ** 2
    shell = np.abs(c) > 0.9 * R
    num, tail = grid_integral(prod, [w] * n, [shell] * n)
    norms = [param_norm_sq(M, f, q.order) for M, f in zip(manifolds, densities)]
    den = float(np.prod(norms))
    return L2Ratio(math.sqrt(num / den) if den else 0.0, num, den,
                   _predicted_ratio(manifolds, densities, q.order, den), tail, ok)


def _predicted_ratio(manifolds, densities, order, den):
    if not den or len(manifolds) != 2:
        return math.nan
    parts = []
    for M, f in zip(manifolds, densities):
        (piece,) = M.pieces
        xi, w = gauss_legendre_box(piece.lower, piece.upper, order)
        parts.append((w * np.abs(f(piece, xi)) ** 2, piece.derivative(xi)[:, :, 0]))
    (m1, t1), (m2, t2) = parts
    det = np.abs(t1[:, None, 0] * t2[None, :, 1] - t1[:, None, 1] * t2[None, :, 0])
    return math.sqrt(compensated_sum(np.outer(m1, m2) / det) / den)


# --------------------------------------------------------------------------
# weighted identity


@dataclass(frozen=True)
class KPlaneWeight:
    """Finite nonnegative combination ``u`` of affine k-planes; the weight
    ``w = T*_{k,n} u`` is the corresponding sum of plane measures."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((plane, float(u)) for plane, u in self.atoms)
        if any(u < 0 for _, u in atoms):
            raise ValueError("k-plane weights must be nonnegative")
        object.__setattr__(self, "atoms", atoms)


@dataclass
class WeightedReport:
    lhs: float
    rhs: float
    rel_error: float
    atom_lhs: list = field(default_factory=list)
    tail_bound: float = 0.0


def weighted_identity_check(M, f: SurfaceDensity, u: KPlaneWeight, q: QuadratureRule | None = None,
                            grid_res: int | None = None) -> WeightedReport:
    """Both sides of int |Ef|^2 w = int |g|^2 T_{n-k,n} w((T S)^perp, .) dsigma.

    The left side is ``sum_i u_i T(|Ef|^2)(atom_i)`` by brute-force plane
    integration; the right side sums ``|g|^2 dsigma`` over Gauss-Legendre
    nodes against ``sum_i u_i / |pi_i ^ (T S)^perp|``, which is the (constant
    in y) value of the inner transform under (T) and (GT).
    """
    q = q or QuadratureRule()
    for plane, _ in u.atoms:
        if plane.dim != M.k:
            raise DimensionMismatch("weight atoms must be k-planes")
        for check in (check_transversality_T, check_transversality_GT):
            res = check(M, plane.direction, grid_res)
            if not res.passed:
                raise TransversalityViolation(
                    f"a weight atom violates {check.__name__[-2:].lstrip('_')} (margin {res.margin:.2e})")
    active = [(plane, ui) for plane, ui in u.atoms if ui > 0]
    results = [plane_integral_squared(M, f, plane, q) for plane, _ in active]
    lhs = compensated_sum([ui * r.value for (_, ui), r in zip(active, results)])

    terms = []
    for piece in M.pieces:
        xi, w = gauss_legendre_box(piece.lower, piece.upper, q.order)
        mass = w * np.abs(f(piece, xi)) ** 2 / surface_jacobian(piece, xi)
        normals = normal_frames(piece, xi)
        pairing = np.zeros(len(xi))
        for plane, ui in active:
            wedge = wedge_abs_batch(normals, plane.direction)
            if np.min(wedge) <= WEDGE_FLOOR:
                raise TransversalityViolation("a weight atom is tangent to the normal planes")
            pairing += ui / wedge
        terms.append(mass * pairing)
    rhs = compensated_sum(np.concatenate(terms)) if terms else 0.0
    return WeightedReport(lhs, rhs, _rel(lhs, rhs), [r.value for r in results],
                          compensated_sum([ui * r.tail_bound for (_, ui), r in zip(active, results)]))


# --------------------------------------------------------------------------
# failure of (GT)


@dataclass
class GTScanReport:
    y: list
    values: list
    variation: float
    variation_floor: float
    passed: bool
    direction: list
    margin_GT: float
    margin_T: float
    witness: tuple
    tail_bound: float


def gt_violation_scan(M, f: SurfaceDensity, plane: Subspace, y_range, q: QuadratureRule | None = None,
                      variation_floor: float = 0.1, grid_res: int | None = None) -> GTScanReport:
    """Scan T(|Ef|^2)(plane, y d) along the chord direction d that breaks (GT).

    ``passed`` means the relative variation ``(max - min) / mean`` exceeds
    ``variation_floor``, i.e. the transform visibly depends on y.  Raises
    ``WrongScenario`` if (GT) holds on the grid, and
    ``TransversalityViolation`` if (T) fails (the transform would be infinite).
    """
    q = q or QuadratureRule()
    gt = check_transversality_GT(M, plane, grid_res)
    if gt.passed:
        raise WrongScenario(f"(GT) holds (margin {gt.margin:.3e}); nothing to demonstrate")
    t = check_transversality_T(M, plane, grid_res)
    if not t.passed:
        raise TransversalityViolation("(T) fails, the plane integrals diverge")
    (pa, xa), (pb, xb) = gt.witness
    chord = M.pieces[pa](xa) - M.pieces[pb](xb)
    chord = chord - plane.basis @ (plane.basis.T @ chord)
    d = chord / np.linalg.norm(chord)
    ys = [float(y) for y in y_range]
    results = [plane_integral_squared(M, f, affine_plane(plane, y * d), q) for y in ys]
    vals = [r.value for r in results]
    mean = float(np.mean(vals))
    variation = (max(vals) - min(vals)) / mean if mean else 0.0
    return GTScanReport(ys, vals, variation, variation_floor, variation > variation_floor,
                        d.tolist(), gt.margin, t.margin,
                        ((pa, xa.tolist()), (pb, xb.tolist())),
                        max(r.tail_bound for r in results))


def two_caps_profile(y, separation: float = 1.0):
    """|1 + exp(-2 pi i s y)|^2 = 2 + 2 cos(2 pi s y), the modulation of
    T(|Ef|^2) for two translated copies of one cap carrying equal densities."""
    return 2.0 + 2.0 * np.cos(2 * np.pi * separation * np.asarray(y, dtype=float))
