"""Parametrized submanifolds, their frames, and transversality against a plane.

A :class:`ParametrizedManifold` is a map ``sigma`` from an axis-aligned box
``U`` in R^k into R^n.  Maps are vectorized: ``sigma`` takes an ``(N, k)``
array of parameters and returns ``(N, n)`` points; the optional ``dsigma``
returns the ``(N, n, k)`` stack of derivative matrices.

Disjoint unions (needed for the two-cap configuration) are represented by
:class:`DisjointUnion`; everything in this package that integrates over a
manifold walks ``M.pieces``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    RankDeficient,
    RootFindFailure,
    TransversalityViolation,
)
from .geometry import (
    Subspace,
    orthonormal_frames,
    wedge_abs_batch,
)

FD_REL_STEP = 1e-5
RANK_TOL = 1e-10
DEFAULT_GRID_RES = 201


@dataclass(frozen=True, eq=False)
class ParametrizedManifold:
    n: int
    k: int
    lower: np.ndarray
    upper: np.ndarray
    sigma: Callable[[np.ndarray], np.ndarray]
    dsigma: Callable[[np.ndarray], np.ndarray] | None = None
    family_tag: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != (self.k,) or hi.shape != (self.k,):
            raise DimensionMismatch(f"domain box must have {self.k} axes")
        if np.any(hi <= lo):
            raise ValueError("empty parameter box")
        if not 0 < self.k <= self.n:
            raise DimensionMismatch(f"intrinsic dimension {self.k} not in (0, {self.n}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def pieces(self) -> tuple["ParametrizedManifold", ...]:
        return (self,)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim < 2
        out = self.sigma(xi.reshape(-1, self.k))
        return out[0] if single else out

    def derivative(self, xi, analytic: bool = True) -> np.ndarray:
        """D sigma at ``xi``: ``(n, k)`` for one point, ``(N, n, k)`` for many.

        Falls back to central differences with step ``1e-5 * width`` when no
        analytic derivative was supplied (or ``analytic=False``).
        """
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim < 2
        pts = xi.reshape(-1, self.k)
        if analytic and self.dsigma is not None:
            D = self.dsigma(pts)
        else:
            D = np.empty((pts.shape[0], self.n, self.k))
            for j in range(self.k):
                h = FD_REL_STEP * self.width[j]
                step = np.zeros(self.k)
                step[j] = h
                D[:, :, j] = (self.sigma(pts + step) - self.sigma(pts - step)) / (2 * h)
        return D[0] if single else D

    def grid(self, res: int) -> np.ndarray:
        """Tensor grid of ``res`` points per axis (endpoints included), ``(res**k, k)``."""
        axes = [np.linspace(a, b, res) for a, b in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def contains(self, xi) -> bool:
        xi = np.asarray(xi, dtype=float)
        return bool(np.all(xi >= self.lower - 1e-14) and np.all(xi <= self.upper + 1e-14))

    def validate(self, grid_res: int = 41):
        """Check the rank and injectivity invariants on a sample grid."""
        xi = self.grid(grid_res)
        J = surface_jacobian(self, xi)
        if np.min(J) <= RANK_TOL:
            raise RankDeficient(f"{self.family_tag}: D sigma drops rank at {xi[np.argmin(J)]}")
        pts = self(xi)
        d = _min_pair_distance(pts)
        if d <= 0.0:
            raise ValueError(f"{self.family_tag}: parametrization is not injective on the grid")
        return self


@dataclass(frozen=True, eq=False)
class DisjointUnion:
    """Finite disjoint union of parametrized pieces of equal dimensions."""

    components: tuple
    family_tag: str = "union"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("empty union")
        if len({(c.n, c.k) for c in comps}) != 1:
            raise DimensionMismatch("all pieces of a union must share n and k")
        object.__setattr__(self, "components", comps)

    @property
    def pieces(self):
        return self.components

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def k(self) -> int:
        return self.components[0].k


def _min_pair_distance(pts: np.ndarray, block: int = 2048) -> float:
    best = math.inf
    N = len(pts)
    for s in range(0, N, block):
        a = pts[s:s + block]
        d = np.linalg.norm(a[:, None, :] - pts[None, :, :], axis=2)
        idx = np.arange(s, s + len(a))
        d[np.arange(len(a)), idx] = np.inf
        best = min(best, float(d.min()))
    return best


# --------------------------------------------------------------------------
# frames and Jacobians


def tangent_frame(M: ParametrizedManifold, xi) -> list[np.ndarray]:
    """The columns of D sigma(xi), i.e. the coordinate tangent vectors."""
    D = M.derivative(xi)
    if np.linalg.matrix_rank(D, tol=RANK_TOL * max(1.0, np.abs(D).max())) < M.k:
        raise RankDeficient(f"tangent frame at {xi} has rank < {M.k}")
    return [D[:, j].copy() for j in range(M.k)]


def surface_jacobian(M: ParametrizedManifold, xi) -> np.ndarray | float:
    """sqrt(det(D^T D)), the k-volume of the coordinate tangent parallelepiped."""
    D = M.derivative(xi)
    gram = np.swapaxes(D, -1, -2) @ D
    return np.sqrt(np.abs(np.linalg.det(gram)))


def tangent_space(M: ParametrizedManifold, xi) -> Subspace:
    return Subspace.span(tangent_frame(M, xi))


def normal_frame(M: ParametrizedManifold, xi) -> Subspace:
    """Orthonormal basis of the normal space (T_xi S)^perp."""
    return tangent_space(M, xi).complement()


def normal_frames(M: ParametrizedManifold, xi: np.ndarray) -> np.ndarray:
    """Stack of orthonormal normal frames ``(N, n, n-k)`` at many points."""
    D = M.derivative(np.asarray(xi).reshape(-1, M.k))
    q, _ = np.linalg.qr(D, mode="complete")
    return q[:, :, M.k:]


def tangent_wedges(M: ParametrizedManifold, xi: np.ndarray, plane: Subspace) -> np.ndarray:
    """|T_xi S ^ plane^perp| at each row of ``xi``."""
    if plane.dim != M.k or plane.ambient_dim != M.n:
        raise DimensionMismatch(f"plane must be a {M.k}-dimensional subspace of R^{M.n}")
    frames = orthonormal_frames(M.derivative(np.asarray(xi).reshape(-1, M.k)))
    return wedge_abs_batch(frames, plane.complement())


# --------------------------------------------------------------------------
# transversality


@dataclass(frozen=True)
class TransversalityResult:
    passed: bool
    margin: float
    witness: tuple


def check_transversality_T(M, plane: Subspace, grid_res: int | None = None, tol: float = 1e-6):
    """Grid check of T_xi S cap plane^perp = {0}.

    The margin is the smallest tangent wedge found; the witness is
    ``(piece_index, xi)`` where it occurs.
    """
    best = (math.inf, None)
    for i, piece in enumerate(M.pieces):
        xi = piece.grid(grid_res or _default_res(piece.k))
        w = tangent_wedges(piece, xi, plane)
        j = int(np.argmin(w))
        if w[j] < best[0]:
            best = (float(w[j]), (i, xi[j].copy()))
    margin, witness = best
    return TransversalityResult(margin > tol, margin, witness)


def _default_res(k: int) -> int:
    # keeps the O(N^2) chord scan near 4e4 points at most
    return DEFAULT_GRID_RES if k == 1 else max(9, int(round(2000 ** (1.0 / k))))


def check_transversality_GT(M, plane: Subspace, grid_res: int | None = None,
                            tol: float = 1e-6, h_merge: float = 1e-8):
    """Grid check that no chord of S lies in plane^perp.

    margin = min |P_plane(d)| / |d| over chords ``d`` between distinct grid
    samples (chords shorter than ``h_merge`` are skipped).  The witness is the
    pair ``((piece, xi), (piece, eta))`` realizing it.
    """
    if plane.dim != M.k or plane.ambient_dim != M.n:
        raise DimensionMismatch(f"plane must be a {M.k}-dimensional subspace of R^{M.n}")
    params, owners, pts = [], [], []
    for i, piece in enumerate(M.pieces):
        xi = piece.grid(grid_res or _default_res(piece.k))
        params.append(xi)
        owners.append(np.full(len(xi), i))
        pts.append(piece(xi))
    params = np.concatenate(params)
    owners = np.concatenate(owners)
    pts = np.concatenate(pts)
    coords = pts @ plane.basis

    best, arg = math.inf, None
    N = len(pts)
    block = max(1, 4_000_000 // max(N, 1))
    for s in range(0, N, block):
        d = pts[s:s + block, None, :] - pts[None, :, :]
        c = coords[s:s + block, None, :] - coords[None, :, :]
        dn = np.linalg.norm(d, axis=2)
        ratio = np.linalg.norm(c, axis=2) / np.where(dn < h_merge, 1.0, dn)
        ratio[dn < h_merge] = np.inf
        a, b = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[a, b] < best:
            best, arg = float(ratio[a, b]), (s + a, b)
    if arg is None:
        return TransversalityResult(True, math.inf, ())
    a, b = arg
    witness = ((int(owners[a]), params[a].copy()), (int(owners[b]), params[b].copy()))
    return TransversalityResult(best > tol, best, witness)


# --------------------------------------------------------------------------
# graph over a plane


@dataclass(frozen=True, eq=False)
class GraphChart:
    """S written as {u + phi(u)} over sampled points u of the plane.

    ``u`` holds plane coordinates (in the frame of ``plane``); ``points`` the
    same samples as vectors of R^n, ``phi`` the values in plane^perp, ``xi``
    the parameters hit, and ``jacobian`` the area factor of u -> u + phi(u).
    """

    manifold: ParametrizedManifold
    plane: Subspace
    u: np.ndarray
    points: np.ndarray
    phi: np.ndarray
    xi: np.ndarray
    jacobian: np.ndarray
    residual: np.ndarray

    def solve(self, u, xi0=None) -> np.ndarray:
        """Parameter xi with P_plane sigma(xi) = u (plane coordinates)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if xi0 is None:
            xi0 = self.xi[np.argmin(np.linalg.norm(self.u - u, axis=1))]
        xi, res = _solve_projection(self.manifold, self.plane, u, xi0)
        if res > 1e-10:
            raise RootFindFailure(f"no parameter projects onto u={u} (residual {res:.2e})")
        return xi

    def phi_at(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        x = self.manifold(self.solve(u))
        return x - self.plane.basis @ u

    def lift(self, u) -> np.ndarray:
        """u + phi(u) as a point of R^n."""
        return self.plane.basis @ np.atleast_1d(u) + self.phi_at(u)

    def induced_jacobian_fd(self, u, h: float | None = None) -> float:
        """Area factor of u -> u + phi(u) by central differences of the chart."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        k = self.plane.dim
        if h is None:
            span = np.ptp(self.u, axis=0)
            h = FD_REL_STEP * float(np.max(span))
        xi0 = self.solve(u)

        def lift(v):
            try:
                return self.manifold(self.solve(v, xi0))
            except RootFindFailure:
                return None

        D = np.empty((self.manifold.n, k))
        for j in range(k):
            e = np.zeros(k)
            e[j] = h
            plus, minus = lift(u + e), lift(u - e)
            if plus is not None and minus is not None:
                D[:, j] = (plus - minus) / (2 * h)
            elif plus is not None:
                # one-sided second-order stencil at the edge of the image
                D[:, j] = (-3 * self.manifold(xi0) + 4 * plus - lift(u + 2 * e)) / (2 * h)
            elif minus is not None:
                D[:, j] = (3 * self.manifold(xi0) - 4 * minus + lift(u - 2 * e)) / (2 * h)
            else:
                raise RootFindFailure(f"chart is not defined around u={u}")
        return float(np.sqrt(abs(np.linalg.det(D.T @ D))))


def _solve_projection(M: ParametrizedManifold, plane: Subspace, u: np.ndarray, xi0,
                      max_iter: int = 50):
    """Damped Newton for B^T sigma(xi) = u, clamped to the parameter box."""
    B = plane.basis
    xi = np.clip(np.asarray(xi0, dtype=float), M.lower, M.upper)

    def resid(z):
        return B.T @ M(z) - u

    r = resid(xi)
    rn = np.linalg.norm(r)
    for _ in range(max_iter):
        if rn < 1e-15 * max(1.0, np.linalg.norm(u)):
            break
        A = B.T @ M.derivative(xi)
        try:
            step = np.linalg.solve(A, r)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while True:
            cand = np.clip(xi - t * step, M.lower, M.upper)
            rc = resid(cand)
            if np.linalg.norm(rc) < rn or t < 1e-6:
                break
            t *= 0.5
        if np.linalg.norm(rc) >= rn:
            break
        xi, r, rn = cand, rc, np.linalg.norm(rc)

    if rn > 1e-10 and M.k == 1:
        xi, rn = _bisect_projection(M, B[:, 0], float(u[0]))
    return xi, float(rn)


def _bisect_projection(M, b, u):
    a, c = float(M.lower[0]), float(M.upper[0])
    fa = b @ M(np.array([a])) - u
    fc = b @ M(np.array([c])) - u
    if fa * fc > 0:
        return np.array([a]), math.inf
    for _ in range(200):
        m = 0.5 * (a + c)
        fm = b @ M(np.array([m])) - u
        if fm == 0.0 or c - a < 1e-16 * max(1.0, abs(m)):
            a = c = m
            break
        if fa * fm < 0:
            c = m
        else:
            a, fa = m, fm
    xi = np.array([0.5 * (a + c)])
    return xi, abs(b @ M(xi) - u)


def graph_reparametrize(M: ParametrizedManifold, plane: Subspace,
                        grid_res: int | None = None, verify: bool = True) -> GraphChart:
    """Write S as a graph over ``plane``.

    For ``k == 1`` the samples are a uniform grid across the projected image,
    solved by marching from one end with warm starts; for ``k >= 2`` they are
    projections of an interior parameter grid, each solved from its
    lexicographic neighbour.  The area factor is computed as
    ``1 / |T S ^ plane^perp|``.
    """
    if len(M.pieces) != 1:
        raise TransversalityViolation("a disjoint union is not a graph over a single chart")
    if verify:
        for check in (check_transversality_T, check_transversality_GT):
            res = check(M, plane, grid_res)
            if not res.passed:
                raise TransversalityViolation(
                    f"{check.__name__[len('check_transversality_'):]} fails (margin {res.margin:.3e})"
                )
    res_n = grid_res or _default_res(M.k)
    B = plane.basis
    if M.k == 1:
        xg = M.grid(res_n)
        proj = M(xg) @ B
        lo, hi = proj.min(), proj.max()
        us = np.linspace(lo, hi, res_n)[:, None]
        seed = xg[np.argmin(proj[:, 0])]
    else:
        inner = M.grid(res_n + 2).reshape(*(res_n + 2,) * M.k, M.k)
        inner = inner[(slice(1, -1),) * M.k].reshape(-1, M.k)
        us = M(inner) @ B
        seed = M.lower + 0.5 * M.width

    xis = np.empty((len(us), M.k))
    resid = np.empty(len(us))
    prev = seed
    for i, u in enumerate(us):
        xi, r = _solve_projection(M, plane, u, prev)
        if r > 1e-10:
            raise RootFindFailure(f"projection root-finding failed at u={u} (residual {r:.2e})")
        xis[i], resid[i] = xi, r
        prev = xi
    pts = M(xis)
    upts = us @ B.T
    jac = 1.0 / tangent_wedges(M, xis, plane)
    return GraphChart(M, plane, us, upts, pts - upts, xis, jac, resid)


# --------------------------------------------------------------------------
# built-in families


def _rot2(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def segment(lower=-0.5, upper=0.5, angle=0.0, offset=(0.0, 0.0)) -> ParametrizedManifold:
    """Straight segment xi -> xi (cos a, sin a) + offset in R^2."""
    d = np.array([math.cos(angle), math.sin(angle)])
    off = np.asarray(offset, dtype=float)
    return ParametrizedManifold(
        2, 1, [lower], [upper],
        sigma=lambda xi: xi[:, :1] * d + off,
        dsigma=lambda xi: np.broadcast_to(d[None, :, None], (len(xi), 2, 1)).copy(),
        family_tag="segment",
        params=dict(lower=lower, upper=upper, angle=angle, offset=list(off)),
    ).validate()


def parabola(lower=-1.0, upper=1.0, curvature=1.0, angle=0.0, offset=(0.0, 0.0)) -> ParametrizedManifold:
    """xi -> R_angle (xi, c xi^2) + offset."""
    R = _rot2(angle)
    off = np.asarray(offset, dtype=float)
    c = float(curvature)

    def sigma(xi):
        t = xi[:, 0]
        return np.stack([t, c * t * t], axis=1) @ R.T + off

    def dsigma(xi):
        t = xi[:, 0]
        D = np.stack([np.ones_like(t), 2 * c * t], axis=1) @ R.T
        return D[:, :, None]

    return ParametrizedManifold(
        2, 1, [lower], [upper], sigma, dsigma, "parabola",
        dict(lower=lower, upper=upper, curvature=c, angle=angle, offset=list(off)),
    ).validate()


def circle_arc(lower=math.pi / 4, upper=3 * math.pi / 4, radius=1.0, center=(0.0, 0.0)) -> ParametrizedManifold:
    """theta -> center + r (cos theta, sin theta)."""
    ctr = np.asarray(center, dtype=float)
    r = float(radius)
    return ParametrizedManifold(
        2, 1, [lower], [upper],
        sigma=lambda th: ctr + r * np.stack([np.cos(th[:, 0]), np.sin(th[:, 0])], axis=1),
        dsigma=lambda th: (r * np.stack([-np.sin(th[:, 0]), np.cos(th[:, 0])], axis=1))[:, :, None],
        family_tag="circle_arc",
        params=dict(lower=lower, upper=upper, radius=r, center=list(ctr)),
    ).validate()


def helix(lower=0.0, upper=4 * math.pi, pitch=1.0 / (2 * math.pi)) -> ParametrizedManifold:
    """xi -> (cos xi, sin xi, pitch * xi) in R^3."""
    c = float(pitch)
    return ParametrizedManifold(
        3, 1, [lower], [upper],
        sigma=lambda t: np.stack([np.cos(t[:, 0]), np.sin(t[:, 0]), c * t[:, 0]], axis=1),
        dsigma=lambda t: np.stack(
            [-np.sin(t[:, 0]), np.cos(t[:, 0]), np.full(len(t), c)], axis=1)[:, :, None],
        family_tag="helix",
        params=dict(lower=lower, upper=upper, pitch=c),
    ).validate()


def helicoid(r_lower=1.0, r_upper=2.0, s_lower=0.0, s_upper=4 * math.pi,
             pitch=1.0 / (2 * math.pi)) -> ParametrizedManifold:
    """(r, s) -> (r cos s, r sin s, pitch * s): a helical surface in R^3.

    Against the horizontal plane it satisfies (T) (for r > 0) but fails (GT):
    (r, s) and (r, s + 2 pi) sit on the same vertical line.
    """
    c = float(pitch)

    def sigma(p):
        r, s = p[:, 0], p[:, 1]
        return np.stack([r * np.cos(s), r * np.sin(s), c * s], axis=1)

    def dsigma(p):
        r, s = p[:, 0], p[:, 1]
        dr = np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], axis=1)
        ds = np.stack([-r * np.sin(s), r * np.cos(s), np.full_like(s, c)], axis=1)
        return np.stack([dr, ds], axis=2)

    return ParametrizedManifold(
        3, 2, [r_lower, s_lower], [r_upper, s_upper], sigma, dsigma, "helicoid",
        dict(r_lower=r_lower, r_upper=r_upper, s_lower=s_lower, s_upper=s_upper, pitch=c),
    ).validate(grid_res=21)


def paraboloid(dim=1, lower=-1.0, upper=1.0, curvature=1.0) -> ParametrizedManifold:
    """xi -> (xi, c |xi|^2) for xi in a box of R^dim; the Schrodinger surface."""
    k = int(dim)
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (k,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (k,)).copy()
    c = float(curvature)

    def sigma(xi):
        return np.concatenate([xi, c * np.sum(xi * xi, axis=1, keepdims=True)], axis=1)

    def dsigma(xi):
        N = len(xi)
        D = np.zeros((N, k + 1, k))
        D[:, :k, :] = np.eye(k)
        D[:, k, :] = 2 * c * xi
        return D

    return ParametrizedManifold(
        k + 1, k, lo, hi, sigma, dsigma, "paraboloid",
        dict(dim=k, lower=lo.tolist(), upper=hi.tolist(), curvature=c),
    ).validate(grid_res=41 if k == 1 else 11)


def graph(coeffs=(0.0, 0.0, 1.0), lower=-1.0, upper=1.0) -> ParametrizedManifold:
    """Graph xi -> (xi, h(xi)) of the polynomial h = sum coeffs[i] xi^i."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    dp = p.deriv()
    return ParametrizedManifold(
        2, 1, [lower], [upper],
        sigma=lambda xi: np.stack([xi[:, 0], p(xi[:, 0])], axis=1),
        dsigma=lambda xi: np.stack([np.ones(len(xi)), dp(xi[:, 0])], axis=1)[:, :, None],
        family_tag="graph",
        params=dict(coeffs=list(map(float, coeffs)), lower=lower, upper=upper),
    ).validate()


def product(*factors: ParametrizedManifold) -> ParametrizedManifold:
    """Cartesian product S_1 x ... x S_m in R^(n_1 + ... + n_m)."""
    ns = [f.n for f in factors]
    ks = [f.k for f in factors]
    n_off = np.cumsum([0] + ns)
    k_off = np.cumsum([0] + ks)

    def sigma(xi):
        return np.concatenate(
            [f(xi[:, k_off[i]:k_off[i + 1]]).reshape(len(xi), -1) for i, f in enumerate(factors)], axis=1)

    def dsigma(xi):
        D = np.zeros((len(xi), n_off[-1], k_off[-1]))
        for i, f in enumerate(factors):
            Di = f.derivative(xi[:, k_off[i]:k_off[i + 1]]).reshape(len(xi), ns[i], ks[i])
            D[:, n_off[i]:n_off[i + 1], k_off[i]:k_off[i + 1]] = Di
        return D

    return ParametrizedManifold(
        int(n_off[-1]), int(k_off[-1]),
        np.concatenate([f.lower for f in factors]),
        np.concatenate([f.upper for f in factors]),
        sigma, dsigma, "product",
        dict(factors=[{"family": f.family_tag, "params": f.params} for f in factors]),
    )


def two_caps(separation=1.0, half_width=0.5) -> DisjointUnion:
    """Two parallel horizontal segments at heights 0 and ``separation``.

    Over the x-axis every vertical chord between the caps lies in the
    complement, so (GT) fails while (T) holds on each cap.
    """
    lower = segment(-half_width, half_width, 0.0, (0.0, 0.0))
    upper = segment(-half_width, half_width, 0.0, (0.0, float(separation)))
    return DisjointUnion((lower, upper), "two_caps",
                         dict(separation=float(separation), half_width=float(half_width)))


FAMILIES: dict[str, Callable] = {
    "segment": segment,
    "parabola": parabola,
    "circle_arc": circle_arc,
    "helix": helix,
    "helicoid": helicoid,
    "paraboloid": paraboloid,
    "graph": graph,
    "product": None,  # built from a list of factor specs, see build_manifold
    "two_caps": two_caps,
}


def build_manifold(family: str, params: dict | None = None):
    """Construct a built-in family from its name and keyword parameters."""
    params = dict(params or {})
    if family not in FAMILIES:
        raise KeyError(f"unknown manifold family {family!r}; known: {sorted(FAMILIES)}")
    if family == "product":
        specs = params.pop("factors", None)
        if not specs or params:
            raise TypeError("product takes exactly one parameter, 'factors'")
        return product(*(build_manifold(s["family"], s.get("params")) for s in specs))
    return FAMILIES[family](**params)


def unit_normal(M: ParametrizedManifold, xi) -> np.ndarray:
    """Unit normal(s) of a hypersurface (k = n - 1)."""
    if M.k != M.n - 1:
        raise DimensionMismatch("unit_normal needs a hypersurface")
    return normal_frames(M, xi)[:, :, 0]


__all__ = [
    "ParametrizedManifold", "DisjointUnion", "GraphChart", "TransversalityResult",
    "tangent_frame", "tangent_space", "surface_jacobian", "normal_frame", "normal_frames",
    "tangent_wedges", "check_transversality_T", "check_transversality_GT",
    "graph_reparametrize", "build_manifold", "FAMILIES", "unit_normal",
    "segment", "parabola", "circle_arc", "helix", "helicoid", "paraboloid",
    "graph", "product", "two_caps",
]
