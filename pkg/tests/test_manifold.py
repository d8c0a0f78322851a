import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kplane import (
    DimensionMismatch,
    RootFindFailure,
    TransversalityViolation,
    build_manifold,
    check_transversality_GT,
    check_transversality_T,
    coordinate_subspace,
    graph_reparametrize,
    line,
    normal_frame,
    orthonormalize,
    tangent_space,
    wedge_abs,
)
from kplane.manifold import (
    FAMILIES,
    circle_arc,
    helicoid,
    helix,
    paraboloid,
    parabola,
    product,
    segment,
    surface_jacobian,
    tangent_frame,
    tangent_wedges,
    two_caps,
)

X_AXIS = coordinate_subspace(2, [0])
INV_SQRT5 = 0.4472135954999579

ALL_FAMILIES = {
    "segment": segment(),
    "parabola": parabola(),
    "circle_arc": circle_arc(),
    "helix": helix(),
    "helicoid": helicoid(),
    "paraboloid": paraboloid(2),
    "graph": build_manifold("graph", {"coeffs": [0.1, -0.3, 0.5, 0.2]}),
    "product": product(segment(), parabola()),
}


# frames

def test_tangent_frames():
    np.testing.assert_allclose(tangent_frame(segment(), [0.2])[0], [1.0, 0.0])
    np.testing.assert_allclose(tangent_frame(parabola(), [1.0])[0], [1.0, 2.0])
    c = 1 / (2 * math.pi)
    np.testing.assert_allclose(tangent_frame(helix(), [0.0])[0], [0.0, 1.0, c], atol=1e-15)


def test_surface_jacobians():
    assert surface_jacobian(circle_arc(), np.array([1.0])) == pytest.approx(1.0, abs=1e-14)
    assert surface_jacobian(parabola(), np.array([1.0])) == pytest.approx(math.sqrt(5), abs=1e-14)
    assert surface_jacobian(paraboloid(2), np.array([1.0, 0.0])) == pytest.approx(math.sqrt(5), abs=1e-14)


def test_normal_frames():
    e2 = np.array([0.0, 1.0])
    assert abs(normal_frame(segment(), [0.1]).basis[:, 0] @ e2) == pytest.approx(1.0)
    assert abs(normal_frame(parabola(), [0.0]).basis[:, 0] @ e2) == pytest.approx(1.0)
    v = normal_frame(parabola(), [1.0]).basis[:, 0]
    assert abs(v @ np.array([-2.0, 1.0]) / math.sqrt(5)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("name", sorted(ALL_FAMILIES))
def test_normal_and_tangent_fill_space(name):
    M = ALL_FAMILIES[name]
    for xi in M.grid(5)[::3]:
        assert wedge_abs(tangent_space(M, xi), normal_frame(M, xi)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", sorted(ALL_FAMILIES))
def test_finite_difference_matches_analytic(name):
    M = ALL_FAMILIES[name]
    xi = M.lower + M.width * np.random.default_rng(0).uniform(0.05, 0.95, size=(30, M.k))
    D = M.derivative(xi)
    Dfd = M.derivative(xi, analytic=False)
    scale = np.maximum(np.abs(D), 1.0)
    assert np.max(np.abs(D - Dfd) / scale) <= 1e-6


def test_families_registry_builds():
    for name in FAMILIES:
        if name == "product":
            M = build_manifold(name, {"factors": [{"family": "segment"}, {"family": "segment"}]})
        else:
            M = build_manifold(name, {})
        assert M.n >= 2


def test_build_manifold_rejects_bad_params():
    with pytest.raises(TypeError):
        build_manifold("parabola", {"curvatur": 1.0})


def test_validate_rank_and_injectivity():
    parabola().validate()
    flat = build_manifold("graph", {"coeffs": [0.0, 1.0]})
    flat.validate()


# transversality

def test_T_parabola_margin():
    r = check_transversality_T(parabola(), X_AXIS, 201)
    assert r.passed
    assert r.margin == pytest.approx(INV_SQRT5, abs=1e-12)
    assert abs(abs(r.witness[1][0]) - 1.0) < 1e-12


def test_T_segment_in_plane():
    r = check_transversality_T(segment(), X_AXIS, 51)
    assert r.passed and r.margin == pytest.approx(1.0)


def test_T_full_circle_fails():
    r = check_transversality_T(circle_arc(0.0, 2 * math.pi - 1e-3), X_AXIS, 401)
    assert not r.passed and r.margin < 1e-6


def test_GT_parabola_margin():
    # grid chords between distinct samples never reach xi + eta = 2 exactly
    res = 201
    r = check_transversality_GT(parabola(), X_AXIS, res)
    assert r.passed
    h = 2.0 / (res - 1)
    closest = 1 / math.sqrt(1 + (2 - h) ** 2)
    assert r.margin == pytest.approx(closest, abs=1e-12)
    assert r.margin - INV_SQRT5 < 2e-3


def test_GT_two_caps_vertical_witness():
    M = two_caps()
    r = check_transversality_GT(M, X_AXIS, 51)
    assert not r.passed and r.margin < 1e-12
    (pa, xa), (pb, xb) = r.witness
    chord = M.pieces[pa](xa) - M.pieces[pb](xb)
    np.testing.assert_allclose(np.abs(chord), [0.0, 1.0], atol=1e-12)


def test_helix_passes_both_against_axis():
    # one full turn moves along the axis, which lies in the plane, not its complement
    z = coordinate_subspace(3, [2])
    assert check_transversality_T(helix(), z).passed
    assert check_transversality_GT(helix(), z).passed


def test_helicoid_T_without_GT():
    xy = coordinate_subspace(3, [0, 1])
    t = check_transversality_T(helicoid(), xy, 41)
    gt = check_transversality_GT(helicoid(), xy, 41)
    assert t.passed and t.margin == pytest.approx(1 / math.sqrt(1 + (1 / (2 * math.pi)) ** 2), abs=1e-12)
    assert not gt.passed


def test_transversality_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        check_transversality_T(parabola(), coordinate_subspace(2, [0, 1]))
    with pytest.raises(DimensionMismatch):
        check_transversality_GT(parabola(), coordinate_subspace(3, [0]))


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.1, 2.0), st.floats(-1.2, 1.2))
def test_T_implies_GT_for_connected_curves(c, span, angle):
    M = parabola(-span / 2, span / 2, curvature=c)
    plane = line([math.cos(angle), math.sin(angle)])
    t = check_transversality_T(M, plane, 61)
    if t.passed and t.margin > 1e-3:
        assert check_transversality_GT(M, plane, 61).passed


# graph charts

def test_parabola_chart_closed_form():
    ch = graph_reparametrize(parabola(), X_AXIS, 101)
    u = ch.u[:, 0]
    np.testing.assert_allclose(ch.phi[:, 1], u**2, atol=1e-12)
    np.testing.assert_allclose(ch.phi[:, 0], 0.0, atol=1e-12)
    np.testing.assert_allclose(ch.jacobian, np.sqrt(1 + 4 * u**2), atol=1e-10)


def test_circle_chart_closed_form():
    ch = graph_reparametrize(circle_arc(), X_AXIS, 101)
    np.testing.assert_allclose(ch.phi_at([0.0]), [0.0, 1.0], atol=1e-10)
    u = ch.u[:, 0]
    np.testing.assert_allclose(ch.phi[:, 1], np.sqrt(1 - u**2), atol=1e-10)
    np.testing.assert_allclose(ch.jacobian, 1 / np.sqrt(1 - u**2), atol=1e-9)


def test_segment_chart_is_flat():
    ch = graph_reparametrize(segment(), X_AXIS, 21)
    np.testing.assert_allclose(ch.phi, 0.0, atol=1e-15)
    np.testing.assert_allclose(ch.jacobian, 1.0, atol=1e-14)


@pytest.mark.parametrize("M", [parabola(), circle_arc(), parabola(-0.5, 0.7, curvature=-0.8, angle=0.2)])
def test_chart_jacobian_is_induced_area_factor(M):
    ch = graph_reparametrize(M, X_AXIS, 41)
    fd = np.array([ch.induced_jacobian_fd(u) for u in ch.u])
    np.testing.assert_allclose(fd, ch.jacobian, atol=1e-6)
    np.testing.assert_allclose(ch.jacobian * tangent_wedges(M, ch.xi, X_AXIS), 1.0, atol=1e-12)


def test_paraboloid_chart_jacobian():
    M = paraboloid(2, -0.5, 0.5)
    ch = graph_reparametrize(M, coordinate_subspace(3, [0, 1]), 9)
    r2 = np.sum(ch.u**2, axis=1)
    np.testing.assert_allclose(ch.jacobian, np.sqrt(1 + 4 * r2), atol=1e-10)


def test_chart_outside_image_raises():
    ch = graph_reparametrize(parabola(), X_AXIS, 21)
    with pytest.raises(RootFindFailure):
        ch.solve([3.0])


def test_chart_refuses_without_transversality():
    with pytest.raises(TransversalityViolation):
        graph_reparametrize(circle_arc(0.0, math.pi), X_AXIS, 41)
    with pytest.raises(TransversalityViolation):
        graph_reparametrize(two_caps(), X_AXIS, 21)
