import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from kplane import (
    AffinePlane,
    BLInstance,
    KPlaneWeight,
    NormalWedgeDegenerate,
    QuadratureRule,
    TooManyMaps,
    TransversalityViolation,
    WrongScenario,
    bl_feasibility,
    convolution_identity_check,
    coordinate_subspace,
    gt_violation_scan,
    line,
    multilinear_l2_ratio,
    param_norm_sq,
    product_wedge_factor,
    schrodinger_energy_scan,
    verify_identity,
    weighted_identity_check,
)
from kplane.applications import diagonal_zero_sum_plane, two_caps_profile
from kplane.density import indicator, smooth_bump, surface_norm_sq
from kplane.manifold import parabola, paraboloid, segment, two_caps

X_AXIS = coordinate_subspace(2, [0])
Q = QuadratureRule(order=256)
S2 = math.sqrt(0.5)


# Schrodinger

def test_energy_constant_in_time():
    f = smooth_bump()
    norm = param_norm_sq(paraboloid(1), f, 256)
    scan = schrodinger_energy_scan(f, [0.0, 0.25, 0.5, 1.0], Q)
    e = np.array([v for _, v in scan])
    assert (e.max() - e.min()) / norm <= 1e-3
    assert abs(e[0] - norm) / norm <= 1e-3


def test_energy_of_zero():
    scan = schrodinger_energy_scan(smooth_bump(0.0), [0.0, 1.0], Q)
    assert [v for _, v in scan] == [0.0, 0.0]


# convolution identity

def test_convolution_orthogonal_segments_factor():
    Ms = [segment(), segment(angle=math.pi / 2)]
    fs = [smooth_bump(), smooth_bump()]
    r = convolution_identity_check(Ms, fs, [[0, 0], [0.4, -0.3]], QuadratureRule(order=192))
    expect = surface_norm_sq(Ms[0], fs[0]) * surface_norm_sq(Ms[1], fs[1])
    assert r.rhs == pytest.approx(expect, rel=1e-12)
    assert r.max_rel_error <= 0.02


def test_convolution_constant_wedge():
    Ms = [segment(), segment(angle=math.pi / 3)]
    fs = [smooth_bump(), smooth_bump()]
    r = convolution_identity_check(Ms, fs, [[0, 0], [0.5, 0.5], [-0.3, 1.0]], QuadratureRule(order=192))
    expect = surface_norm_sq(Ms[0], fs[0]) * surface_norm_sq(Ms[1], fs[1]) / math.sin(math.pi / 3)
    assert r.rhs == pytest.approx(expect, rel=1e-12)
    assert r.max_rel_error <= 0.02
    assert r.spread <= 0.02


def test_convolution_rejects_parallel_normals():
    with pytest.raises(NormalWedgeDegenerate):
        convolution_identity_check([segment(), segment(offset=(0, 1))], [smooth_bump()] * 2, [[0, 0]], Q)


# product wedge

def test_product_wedge_examples():
    d, f = product_wedge_factor([[0, 1], [1, 0]])
    assert d == pytest.approx(0.5, abs=1e-14) and f == pytest.approx(0.5, abs=1e-14)
    d, f = product_wedge_factor([[1, 0], [1, 0]])
    assert d == pytest.approx(0, abs=1e-14) and f == pytest.approx(0, abs=1e-14)
    d, f = product_wedge_factor([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert d == pytest.approx(3**-1.5, abs=1e-14) and f == pytest.approx(0.19245008972987526, abs=1e-14)


def test_zero_sum_plane():
    P = diagonal_zero_sum_plane(3)
    assert P.dim == 6 and P.ambient_dim == 9
    ones = np.tile(np.eye(3), 3)
    np.testing.assert_allclose(ones @ P.basis, 0.0, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 3]))
def test_product_wedge_random(seed, n):
    v = np.random.default_rng(seed).normal(size=(n, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    d, f = product_wedge_factor(v)
    assert abs(d - f) <= 1e-10


# Brascamp-Lieb feasibility

def test_bl_single_basis():
    r = bl_feasibility(BLInstance([[1, 0], [0, 1]], [1, 1]))
    assert r.feasible and r.lambdas == {(0, 1): pytest.approx(1.0)}


def test_bl_three_directions_feasible():
    inst = BLInstance([[1, 0], [0, 1], [S2, S2]], [2 / 3] * 3)
    r = bl_feasibility(inst)
    assert r.feasible
    assert set(r.lambdas) == {(0, 1), (0, 2), (1, 2)}
    for lam in r.lambdas.values():
        assert lam == pytest.approx(1 / 3, abs=1e-12)
    assert r.residual(inst) <= 1e-9


def test_bl_three_directions_infeasible():
    inst = BLInstance([[1, 0], [0, 1], [S2, S2]], [0.5] * 3)
    r = bl_feasibility(inst)
    assert not r.feasible
    A = np.zeros((4, len(r.bases)))
    for c, J in enumerate(r.bases):
        A[list(J), c] = 1
    A[-1] = 1
    b = np.array([0.5, 0.5, 0.5, 1.0])
    assert np.all(r.farkas @ A <= 1e-9) and r.farkas @ b > 1e-9


def test_bl_cap():
    v = np.tile([[1.0, 0.0]], (13, 1))
    with pytest.raises(TooManyMaps):
        bl_feasibility(BLInstance(v, np.full(13, 0.1)))


def test_bl_rejects_non_unit():
    with pytest.raises(ValueError):
        BLInstance([[2, 0], [0, 1]], [1, 1])


def random_bl(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    m = int(rng.integers(n, 7))
    v = rng.normal(size=(m, n))
    if rng.random() < 0.3:
        v[1] = v[0]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    p = rng.uniform(0, 1, size=m)
    if rng.random() < 0.5:
        p *= n / p.sum()
    return BLInstance(v, np.clip(p, 0, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_bl_agrees_with_scipy(seed):
    inst = random_bl(seed)
    r = bl_feasibility(inst)
    bases = [J for J in itertools.combinations(range(inst.m), inst.n)
             if abs(np.linalg.det(inst.vectors[list(J)])) > 1e-10]
    if bases:
        A = np.zeros((inst.m + 1, len(bases)))
        for c, J in enumerate(bases):
            A[list(J), c] = 1
        A[-1] = 1
        res = linprog(np.zeros(len(bases)), A_eq=A, b_eq=np.append(inst.p, 1), bounds=(0, None), method="highs")
        assert r.feasible == (res.status == 0)
    else:
        assert not r.feasible
    if r.feasible:
        assert r.residual(inst) <= 1e-9
        assert all(lam >= -1e-12 for lam in r.lambdas.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.randoms(use_true_random=False))
def test_bl_permutation_invariant(seed, rnd):
    inst = random_bl(seed)
    perm = list(range(inst.m))
    rnd.shuffle(perm)
    other = BLInstance(inst.vectors[perm], inst.p[perm])
    assert bl_feasibility(inst).feasible == bl_feasibility(other).feasible


# multilinear ratio

def test_ratio_orthogonal_segments():
    Ms = [segment(), segment(angle=math.pi / 2)]
    r = multilinear_l2_ratio(Ms, [smooth_bump(), smooth_bump()], QuadratureRule(order=384))
    assert r.ratio == pytest.approx(1.0, abs=1e-3)


def test_ratio_scale_invariant():
    Ms = [parabola(-0.5, 0.5, 0.5), parabola(-0.5, 0.5, 0.5, angle=math.pi / 2)]
    q = QuadratureRule(order=192, plane_points_per_axis=256)
    a = multilinear_l2_ratio(Ms, [smooth_bump(), smooth_bump()], q).ratio
    b = multilinear_l2_ratio(Ms, [smooth_bump(3.0), smooth_bump(0.2)], q).ratio
    assert a == pytest.approx(b, rel=1e-10)


def test_ratio_rejects_parallel_tangents():
    with pytest.raises(NormalWedgeDegenerate):
        multilinear_l2_ratio([segment(), segment(offset=(0, 1))], [smooth_bump()] * 2, Q)


# weighted identity

def test_weighted_single_atom_is_the_identity():
    u = KPlaneWeight([(AffinePlane(X_AXIS, [0, 0.5]), 1.0)])
    w = weighted_identity_check(parabola(), smooth_bump(), u, Q)
    v = verify_identity(parabola(), smooth_bump(), X_AXIS, [[0, 0.5]], Q)
    assert w.rel_error <= 1e-3
    assert w.rhs == pytest.approx(v.rhs, rel=1e-12)


def test_weighted_two_atoms():
    tilted = line([math.cos(0.3), math.sin(0.3)])
    atoms = [(AffinePlane(X_AXIS, [0, 0.3]), 1.0),
             (AffinePlane.through(tilted, [0.2, -0.5]), 2.0)]
    w = weighted_identity_check(parabola(), smooth_bump(), KPlaneWeight(atoms), Q)
    assert w.rel_error <= 1e-3


def test_weighted_zero_weights():
    w = weighted_identity_check(parabola(), smooth_bump(), KPlaneWeight([(AffinePlane(X_AXIS, [0, 0]), 0.0)]), Q)
    assert w.lhs == 0.0 and w.rhs == 0.0


def test_weighted_rejects_bad_atom():
    with pytest.raises(TransversalityViolation):
        weighted_identity_check(two_caps(), smooth_bump(), KPlaneWeight([(AffinePlane(X_AXIS, [0, 0]), 1.0)]), Q)
    with pytest.raises(ValueError):
        KPlaneWeight([(AffinePlane(X_AXIS, [0, 0]), -1.0)])


# failure of the global hypothesis

def test_two_caps_scan_matches_closed_form():
    ys = np.round(np.arange(6) * 0.1, 12)
    r = gt_violation_scan(two_caps(), indicator(), X_AXIS, ys, Q)
    assert r.passed and r.variation > 0.5
    np.testing.assert_allclose(np.abs(r.direction), [0, 1], atol=1e-12)
    model = two_caps_profile(ys) / 4
    assert np.max(np.abs(np.array(r.values) / r.values[0] - model)) <= 0.05


def test_two_caps_smooth_variation():
    r = gt_violation_scan(two_caps(), smooth_bump(), X_AXIS, [0, 0.1, 0.2, 0.3, 0.4, 0.5], Q)
    assert r.variation > 0.5


def test_scan_refuses_when_GT_holds():
    with pytest.raises(WrongScenario):
        gt_violation_scan(segment(), smooth_bump(), X_AXIS, [0, 0.5], Q)


@pytest.mark.parametrize("M", [two_caps(), parabola(), segment(), two_caps(separation=0.6)])
def test_scan_and_identity_are_exclusive(M):
    accepted = 0
    try:
        verify_identity(M, smooth_bump(), X_AXIS, [[0, 0]], Q)
        accepted += 1
    except TransversalityViolation:
        pass
    try:
        gt_violation_scan(M, smooth_bump(), X_AXIS, [0, 0.25], Q)
        accepted += 1
    except WrongScenario:
        pass
    assert accepted == 1
