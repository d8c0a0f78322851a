import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kplane import (
    AffinePlane,
    DiscretePlaneMeasure,
    OscillationBudgetWarning,
    QuadratureRule,
    TransversalityViolation,
    affine_plane,
    composed_adjoint_transform,
    coordinate_subspace,
    extension_eval,
    line,
    param_norm_sq,
    plane_integral_squared,
    pushforward_measure,
    rhs_tangent_integral,
    verify_identity,
)
from kplane.density import gaussian_truncated, indicator, smooth_bump, surface_norm_sq
from kplane.manifold import circle_arc, parabola, paraboloid, segment, two_caps
from kplane.transform import plane_pair_weight

X_AXIS = coordinate_subspace(2, [0])
Q = QuadratureRule(order=256)
ZERO = smooth_bump(0.0)

# int_{-1}^{1} exp(2 - 2/(1 - s^2)) ds, by adaptive mpmath quadrature at 30 digits
BUMP_SQ_UNIT = 0.983380812912726463628539655389
ASINH2 = 1.44363547517881034249327674027


# extension operator

def test_extension_of_indicator_segment():
    M, f = segment(), indicator()
    assert extension_eval(M, f, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-14)
    assert abs(extension_eval(M, f, [1.0, 0.0])) < 1e-14
    assert extension_eval(M, f, [0.0, 7.3]) == pytest.approx(1.0, abs=1e-14)
    x = np.array([[0.3, 0.0], [1.7, 0.4], [2.5, -1.0]])
    np.testing.assert_allclose(np.abs(extension_eval(M, f, x)), np.abs(np.sinc(x[:, 0])), atol=1e-13)


def test_extension_budget_warning():
    with pytest.warns(OscillationBudgetWarning):
        extension_eval(parabola(), smooth_bump(), [400.0, 0.0], QuadratureRule(order=64))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extension_eval(parabola(), smooth_bump(), [4.0, 0.0], QuadratureRule(order=64))


def test_extension_modulation():
    # translating S multiplies Ef by a unimodular phase
    x = np.array([[0.4, -1.3], [2.0, 0.5]])
    a = extension_eval(parabola(), smooth_bump(), x)
    b = extension_eval(parabola(offset=(0.3, -0.2)), smooth_bump(), x)
    np.testing.assert_allclose(np.abs(a), np.abs(b), atol=1e-13)


# plane integrals

def test_plancherel_indicator_tail():
    r = plane_integral_squared(segment(), indicator(), AffinePlane(X_AXIS, [0.0, 0.0]), Q)
    # the missing mass of sinc^2 beyond R is about 1 / (pi^2 R)
    assert abs(r.value - 1.0) < 0.02
    assert abs((1.0 - r.value) - 1 / (math.pi**2 * 30)) < 2e-3


def test_plancherel_smooth_segment():
    r = plane_integral_squared(segment(), smooth_bump(), AffinePlane(X_AXIS, [0.0, 0.4]), Q)
    assert r.value == pytest.approx(BUMP_SQ_UNIT / 2, abs=1e-6)
    assert r.tail_bound < 1e-6


def test_plane_integral_of_zero():
    assert plane_integral_squared(parabola(), ZERO, AffinePlane(X_AXIS, [0, 0]), Q).value == 0.0


def test_raised_cosine_window_is_flagged_diagnostic():
    q = QuadratureRule(order=256, window="raised_cosine")
    r = plane_integral_squared(segment(), smooth_bump(), AffinePlane(X_AXIS, [0, 0]), q)
    assert r.value == pytest.approx(BUMP_SQ_UNIT / 2, abs=1e-6)


# closed forms of the tangent side

def test_rhs_segment_and_parabola():
    assert rhs_tangent_integral(segment(), indicator(), X_AXIS, Q) == pytest.approx(1.0, abs=1e-12)
    assert rhs_tangent_integral(parabola(), indicator(), X_AXIS, Q) == pytest.approx(2.0, abs=1e-12)
    assert rhs_tangent_integral(parabola(), ZERO, X_AXIS, Q) == 0.0


def test_rhs_rejects_tangency():
    with pytest.raises(TransversalityViolation):
        rhs_tangent_integral(circle_arc(-math.pi / 4, math.pi / 4), indicator(), X_AXIS, QuadratureRule(order=9))


def test_plane_pair_weight():
    assert plane_pair_weight(line([0, 1]), X_AXIS) == pytest.approx(1.0)
    a = math.pi / 6
    assert plane_pair_weight(line([math.cos(a), math.sin(a)]), X_AXIS) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(TransversalityViolation):
        plane_pair_weight(line([1.0, 1e-12]), X_AXIS)


# plane measures

def test_pushforward_segment_atoms():
    mu = pushforward_measure(segment(), indicator(), QuadratureRule(order=16), "through_point")
    assert mu.total_mass == pytest.approx(1.0, abs=1e-14)
    for (plane, _), xi in zip(mu.atoms, mu.source_xi):
        assert abs(plane.direction.basis[1, 0]) == pytest.approx(1.0)
        np.testing.assert_allclose(plane.offset, [xi[0], 0.0], atol=1e-15)
    zero_rule = pushforward_measure(segment(), indicator(), QuadratureRule(order=16))
    np.testing.assert_allclose(zero_rule.offsets, 0.0)


def test_pushforward_parabola_mass():
    mu = pushforward_measure(parabola(), indicator(), Q)
    assert mu.total_mass == pytest.approx(ASINH2, abs=1e-12)
    assert mu.total_mass == pytest.approx(surface_norm_sq(parabola(), indicator(), 256), abs=1e-12)


def test_pushforward_of_zero_is_empty():
    mu = pushforward_measure(parabola(), ZERO, Q)
    assert len(mu) == 0 and mu.total_mass == 0.0
    assert composed_adjoint_transform(mu, X_AXIS) == 0.0


def test_adjoint_single_atom():
    mu = DiscretePlaneMeasure.from_atoms([(AffinePlane(line([0, 1]), [0.5, 0.0]), 1.0)])
    assert composed_adjoint_transform(mu, X_AXIS) == pytest.approx(1.0)


def test_adjoint_equals_tangent_form():
    mu = pushforward_measure(parabola(), smooth_bump(), Q)
    rhs = rhs_tangent_integral(parabola(), smooth_bump(), X_AXIS, Q)
    assert composed_adjoint_transform(mu, X_AXIS) == pytest.approx(rhs, rel=1e-10)


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_adjoint_exactly_independent_of_y(y):
    mu = pushforward_measure(parabola(), smooth_bump(), QuadratureRule(order=32), "through_point")
    assert composed_adjoint_transform(mu, X_AXIS, np.array(y)) == composed_adjoint_transform(mu, X_AXIS)


# the identity itself

def test_flat_identity():
    r = verify_identity(segment(), smooth_bump(), X_AXIS, [[0, 0], [0, 1], [0, -2]], Q)
    assert r.identity_error <= 1e-4 and r.y_spread <= 1e-4


def test_zero_density_identity():
    r = verify_identity(parabola(), ZERO, X_AXIS, [[0, 0], [0, 1]], Q)
    assert r.rhs == 0.0 and r.lhs == [0.0, 0.0] and r.identity_error == 0.0


def test_identity_refuses_without_GT():
    with pytest.raises(TransversalityViolation):
        verify_identity(two_caps(), smooth_bump(), X_AXIS, [[0, 0]], Q)


@settings(max_examples=12, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-0.6, 0.6), st.floats(-0.4, 0.4))
def test_three_way_identity_on_random_arcs(curvature, angle, tilt):
    M = parabola(-0.6, 0.6, curvature=curvature, angle=angle)
    plane = line([math.cos(tilt), math.sin(tilt)])
    perp = plane.complement().basis[:, 0]
    ys = [t * perp for t in (-1.0, -0.4, 0.0, 0.5, 1.2)]
    if not check_both(M, plane):
        return
    r = verify_identity(M, smooth_bump(), plane, ys, QuadratureRule(order=256))
    assert r.identity_error <= 1e-3
    assert r.y_spread <= 1e-3
    assert abs(r.adjoint - r.rhs) <= 1e-3 * r.rhs


def check_both(M, plane):
    from kplane import check_transversality_GT, check_transversality_T
    return check_transversality_T(M, plane, 101).margin > 0.05 and check_transversality_GT(M, plane, 101).passed


def test_identity_paraboloid_surface():
    # k = 2 in R^3 on the desk-scale preset
    q = QuadratureRule(order=112, plane_trunc_radius=12.0, plane_points_per_axis=128)
    M = paraboloid(2, -0.5, 0.5)
    plane = coordinate_subspace(3, [0, 1])
    r = verify_identity(M, smooth_bump(), plane, [[0, 0, 0], [0, 0, 0.7]], q, grid_res=21)
    assert r.identity_error <= 1e-3 and r.y_spread <= 1e-3


def test_quadrature_convergence():
    ys = [[0, 0], [0, 0.5]]
    a = verify_identity(parabola(), gaussian_truncated(), X_AXIS, ys, QuadratureRule(order=256))
    b = verify_identity(parabola(), gaussian_truncated(), X_AXIS, ys, QuadratureRule(order=256).refined())
    assert max(abs(x - y) for x, y in zip(a.lhs, b.lhs)) / a.rhs < 1e-3
    assert abs(a.rhs - b.rhs) / a.rhs < 1e-10


def test_affine_plane_discards_in_plane_component():
    P = affine_plane(X_AXIS, [3.0, -1.0])
    np.testing.assert_allclose(P.offset, [0.0, -1.0])


def test_param_norm_matches_oracle():
    assert param_norm_sq(parabola(), smooth_bump(), 256) == pytest.approx(BUMP_SQ_UNIT, abs=1e-12)


def test_default_order_is_below_budget_at_default_radius():
    # the package-wide default order aliases at R = 30; runs must raise the order
    with pytest.warns(OscillationBudgetWarning):
        r = plane_integral_squared(parabola(), smooth_bump(), AffinePlane(X_AXIS, [0, 0]), QuadratureRule())
    assert not r.budget_ok
    assert abs(r.value - BUMP_SQ_UNIT) / BUMP_SQ_UNIT > 0.1
