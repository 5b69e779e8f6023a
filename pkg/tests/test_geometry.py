import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lascat.geometry import (
    BoundaryShape,
    Circle,
    Kite,
    Pear,
    PriorKind,
    boundary_point,
    eval_q,
    hausdorff_distance,
    holder_norm,
    polygon_area,
    polygon_centroid,
    reference_curve,
    sample_boundary,
)

coeff_vectors = arrays(np.float64, 2 * 4 + 1, elements=st.floats(-2, 2))
kinds = st.sampled_from(list(PriorKind))
angles = st.floats(0, 2 * math.pi)


@pytest.mark.parametrize("kind", list(PriorKind))
def test_constant_term_only(kind):
    c = np.zeros(7)
    c[0] = math.sqrt(2 * math.pi)
    theta = np.linspace(0, 2 * np.pi, 9)
    q, dq, ddq = eval_q(BoundaryShape((0, 0), c, kind), theta)
    assert np.allclose(q, 1.0, atol=1e-15)
    assert np.allclose(dq, 0.0) and np.allclose(ddq, 0.0)


def test_qb_single_cosine_mode():
    c = np.zeros(21)
    c[1] = 1.0
    q, _, ddq = eval_q(BoundaryShape((0, 0), c, "qb"), 0.0)
    assert q == pytest.approx(-1 / math.sqrt(math.pi), rel=1e-15)
    # second-derivative series for q_b evaluated at theta = 0
    assert ddq == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_qb_second_derivative_series_term_by_term():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(21)
    s = BoundaryShape((0, 0), c, "qb")
    for theta in (0.0, math.pi / 2, 1.234):
        n = np.arange(1, 11)
        expected = np.sum(s.a[1:] * np.cos(n * theta) - s.b * np.sin(n * theta)) / math.sqrt(math.pi)
        assert eval_q(s, theta)[2] == pytest.approx(expected, rel=1e-12, abs=1e-14)


@given(c=coeff_vectors, kind=kinds, theta=angles)
def test_first_derivative_matches_central_difference(c, kind, theta):
    s = BoundaryShape((0, 0), c, kind)
    h = 1e-5
    fd = (eval_q(s, theta + h)[0] - eval_q(s, theta - h)[0]) / (2 * h)
    assert abs(eval_q(s, theta)[1] - fd) < 1e-6


@given(c=coeff_vectors, kind=kinds, theta=angles)
def test_second_derivative_matches_central_difference(c, kind, theta):
    s = BoundaryShape((0, 0), c, kind)
    h = 1e-4
    fd = (eval_q(s, theta + h)[1] - eval_q(s, theta - h)[1]) / (2 * h)
    assert abs(eval_q(s, theta)[2] - fd) < 1e-5


@given(c=coeff_vectors, kind=kinds)
def test_radius_positive_and_periodic(c, kind):
    s = BoundaryShape((0.3, -0.1), c, kind)
    theta = np.linspace(0, 2 * np.pi, 33)
    assert np.all(s.radius(theta) > 0)
    for curve in (s, Kite(), Pear()):
        for a, b in zip(curve.derivatives(theta), curve.derivatives(theta + 2 * np.pi)):
            assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@given(c=coeff_vectors, kind=kinds, theta=angles)
def test_star_shape_point_derivatives_match_finite_differences(c, kind, theta):
    s = BoundaryShape((0, 0), c * 0.3, kind)
    h = 1e-5
    x, dx, ddx = s.derivatives(theta)
    xp, dxp, _ = s.derivatives(theta + h)
    xm, dxm, _ = s.derivatives(theta - h)
    assert np.allclose(dx, (xp - xm) / (2 * h), atol=1e-6 * (1 + np.abs(dx).max()))
    assert np.allclose(ddx, (dxp - dxm) / (2 * h), atol=1e-5 * (1 + np.abs(ddx).max()))


def test_reference_points():
    assert np.allclose(Kite().derivatives(0.0)[0], [1.0, 0.0])
    assert np.allclose(Pear().derivatives(math.pi / 2)[0], [0.0, 2 / 3], atol=1e-15)


def test_unit_circle_frame():
    theta = np.linspace(0, 2 * np.pi, 17)
    x, t, nrm, jac = boundary_point(Circle(1.0), theta)
    assert np.allclose(jac, 1.0)
    assert np.allclose(nrm, [np.cos(theta), np.sin(theta)])


def test_circle_normal_points_outward():
    theta = np.linspace(0, 2 * np.pi, 50)
    c = Circle(0.7, (1.0, -2.0))
    x, _, nrm, _ = boundary_point(c, theta)
    assert np.all(np.sum(nrm * (x - np.array([[1.0], [-2.0]])), axis=0) > 0)


def test_initial_state():
    s = BoundaryShape.initial((0.2, 0.0), N=10)
    assert s.coeffs.size == 21 and s.coeffs[0] == 1.0 and not np.any(s.coeffs[1:])
    assert np.allclose(s.radius(np.linspace(0, 6, 5)), math.exp(1 / math.sqrt(2 * math.pi)))


def test_shape_validation():
    with pytest.raises(ValueError):
        BoundaryShape((0, 0), np.zeros(4))
    with pytest.raises(ValueError):
        BoundaryShape((0, 0), [1.0, np.nan, 0.0])
    with pytest.raises(ValueError, match="kite, pear, circle"):
        reference_curve("blob")


def test_polygon_measures_of_kite():
    # area pi*1.5 and x-centroid -0.325 follow from Green's theorem on the parametrization
    _, x, y = sample_boundary(Kite(), 2048)
    assert polygon_area(x, y) == pytest.approx(1.5 * math.pi, rel=1e-5)
    assert np.allclose(polygon_centroid(x, y), [-0.325, 0.0], atol=1e-5)


def test_hausdorff_of_concentric_circles():
    _, x1, y1 = sample_boundary(Circle(1.0), 256)
    _, x2, y2 = sample_boundary(Circle(1.2), 256)
    d = hausdorff_distance(np.column_stack([x1, y1]), np.column_stack([x2, y2]))
    assert d == pytest.approx(0.2, abs=1e-12)


def test_smoothness_ordering_of_kinds():
    rng = np.random.default_rng(11)
    theta = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    sup = {k: [] for k in PriorKind}
    for _ in range(1000):
        c = rng.standard_normal(21)
        for k in PriorKind:
            sup[k].append(np.abs(eval_q(BoundaryShape((0, 0), c, k), theta)[2]).max())
    m = {k: np.mean(v) for k, v in sup.items()}
    assert m[PriorKind.QA] <= m[PriorKind.QB] <= m[PriorKind.QC]


def test_holder_norm_is_finite_and_grows_with_roughness():
    c = np.zeros(21)
    c[5] = 1.0
    assert holder_norm(BoundaryShape((0, 0), c, "qa")) < holder_norm(BoundaryShape((0, 0), c, "qc"))
