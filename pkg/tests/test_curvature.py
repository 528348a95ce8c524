import numpy as np
import pytest

from minkcurv import (
    AsymptoticInput,
    Cylinder,
    Ellipsoid,
    EllipsoidNorm,
    EuclideanNorm,
    EuclideanSphere,
    QuarticNorm,
    Torus,
    asymptotic_directions,
    birkhoff_normal,
    conjugate_direction,
    curvature_report,
    fundamental_form,
    jet,
    minkowski_sphere_chart,
    normal_curvature,
    paraboloid,
    plane,
    principal_curvatures,
    saddle,
    shape_differential,
    sign_equivalences,
)
from minkcurv.curvature import ALL_DIRECTIONS, asymptotic_directions_from_form, conjugate_from_form

NORTH = [0.0, 0.0]  # pole chart of the unit sphere at (0, 0, 1)
ELL_NORM = EllipsoidNorm(np.diag([1.0, 1.0, 2.0]))
Q01 = QuarticNorm(0.1)
ETA_Z = 1.1 ** -0.25


def test_birkhoff_normal_examples():
    J = jet(paraboloid(), NORTH)
    assert np.allclose(birkhoff_normal(EuclideanNorm(), J), [0, 0, 1])
    assert np.allclose(birkhoff_normal(ELL_NORM, jet(plane(), NORTH)), [0, 0, 0.5])
    eta = birkhoff_normal(Q01, jet(plane(), NORTH))
    assert np.allclose(eta, [0, 0, ETA_Z])
    assert eta[2] == pytest.approx(0.976454, abs=1e-6)


def test_shape_differential_examples():
    d_eta, d_xi, tau = shape_differential(EuclideanNorm(), paraboloid(), NORTH)
    # the upward normal of the paraboloid turns against the chart directions
    assert np.allclose(d_eta, -np.eye(2), atol=1e-6) and np.allclose(d_xi, -np.eye(2), atol=1e-6)
    assert tau < 1e-8
    d_eta, _, _ = shape_differential(ELL_NORM, paraboloid(), NORTH)
    # du = 2 I at the pole of the ellipsoid norm
    assert np.allclose(d_eta, -2.0 * np.eye(2), atol=1e-6)
    d_eta, _, _ = shape_differential(Q01, plane(), [0.3, -0.2])
    assert np.allclose(d_eta, 0.0, atol=1e-12)


def test_fundamental_form_examples():
    assert np.allclose(fundamental_form(EuclideanNorm(), paraboloid(), NORTH), np.eye(2), atol=1e-10)
    assert np.allclose(fundamental_form(Q01, paraboloid(), NORTH), np.eye(2) / ETA_Z, atol=1e-10)
    assert np.allclose(fundamental_form(Q01, plane(), [0.2, 0.1]), 0.0)
    h = fundamental_form(EuclideanNorm(), Cylinder(1.0), [0.4, 0.2])
    assert np.allclose(h, [[-1.0, 0.0], [0.0, 0.0]], atol=1e-10)
    assert np.allclose(fundamental_form(EuclideanNorm(), saddle(), NORTH), np.diag([1.0, -1.0]))


@pytest.mark.parametrize("norm", [EuclideanNorm(), ELL_NORM, Q01], ids=["eu", "ell", "q"])
def test_report_invariants(norm):
    for chart in (Ellipsoid(1.0, 1.5, 2.0), Torus(2.0, 0.5), saddle()):
        for q in chart.grid(5, 5):
            if not chart.contains(q):
                continue
            rep = curvature_report(norm, chart, q)
            assert rep.tau_residual < 1e-5
            assert rep.selfadj_residual < 1e-5
            # chart-coordinate matrices grow near the pole of the ellipsoid chart
            assert rep.chain_residual <= 1e-5 * max(1.0, np.abs(rep.d_eta).max())
            # determinant identity det d_eta = det du . det d_xi
            det_xi = np.linalg.det(rep.d_xi)
            assert np.linalg.det(rep.d_eta) == pytest.approx(
                np.linalg.det(rep.du) * det_xi, abs=1e-5 * max(1.0, abs(det_xi))
            )
            assert rep.K == pytest.approx(rep.lambda1 * rep.lambda2, abs=1e-9)
            assert rep.H_mean == pytest.approx(0.5 * (rep.lambda1 + rep.lambda2), abs=1e-9)
            assert rep.lambda1 >= rep.lambda2 - 1e-12


def test_fd_and_chain_agree():
    chart = Ellipsoid(1.0, 1.5, 2.0)
    for q in chart.grid(4, 4):
        a = curvature_report(Q01, chart, q, method="fd")
        b = curvature_report(Q01, chart, q, method="chain")
        assert np.allclose(a.d_eta, b.d_eta, atol=1e-6)


def test_normal_curvature_examples():
    sph = EuclideanSphere(2.0)
    q = [1.0, 0.4]
    for X in ([1.0, 0.0], [0.0, 1.0], [0.3, -0.8]):
        assert normal_curvature(EuclideanNorm(), sph, q, X) == pytest.approx(0.5, abs=1e-7)
    cyl = Cylinder(1.0)
    ks = [normal_curvature(EuclideanNorm(), cyl, [0.1, 0.0], X) for X in ([1, 0], [0, 1])]
    assert sorted(ks) == pytest.approx([0.0, 1.0], abs=1e-6)
    assert normal_curvature(Q01, plane(), [0.1, 0.2], [1.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        normal_curvature(EuclideanNorm(), sph, q, [0.0, 0.0])


@pytest.mark.parametrize("norm", [EuclideanNorm(), ELL_NORM, Q01], ids=["eu", "ell", "q"])
def test_minkowski_sphere_is_umbilic(norm):
    chart = minkowski_sphere_chart(norm, 2.0)
    for q in chart.grid(5, 5):
        rep = principal_curvatures(norm, chart, q)
        l1, l2 = rep.lambda1, rep.lambda2
        assert l1 == pytest.approx(0.5, abs=1e-6) and l2 == pytest.approx(0.5, abs=1e-6)
        assert rep.umbilic


def test_normal_curvature_extrema_are_principal():
    chart = Ellipsoid(1.0, 1.5, 2.0)
    rep = curvature_report(Q01, chart, [0.9, 0.5])
    from minkcurv import normal_profile

    _, _, k = normal_profile(rep, 720)
    assert k.max() == pytest.approx(rep.lambda1, abs=1e-5)
    assert k.min() == pytest.approx(rep.lambda2, abs=1e-5)


def test_asymptotic_directions_examples():
    dirs = asymptotic_directions(EuclideanNorm(), saddle(), NORTH)
    assert len(dirs) == 2
    slopes = sorted(d[1] / d[0] for d in dirs)
    assert slopes == pytest.approx([-1.0, 1.0], abs=1e-8)
    assert asymptotic_directions(EuclideanNorm(), EuclideanSphere(), [1.0, 0.0]) == []
    assert len(asymptotic_directions(EuclideanNorm(), Cylinder(), [0.1, 0.1])) == 1
    assert asymptotic_directions(Q01, plane(), NORTH) is ALL_DIRECTIONS
    for d in asymptotic_directions(Q01, saddle(), [0.1, 0.05]):
        J = jet(saddle(), [0.1, 0.05])
        assert Q01.jet(J.frame @ d)[0] == pytest.approx(1.0)


def test_asymptotic_from_form():
    assert len(asymptotic_directions_from_form(np.diag([1.0, -4.0]))) == 2
    assert asymptotic_directions_from_form(np.diag([1.0, 4.0])) == []
    (d,) = asymptotic_directions_from_form(np.diag([1.0, 0.0]))
    assert np.allclose(np.abs(d), [0.0, 1.0])


def test_conjugate_directions():
    Y, res = conjugate_direction(EuclideanNorm(), paraboloid(), [0.0, 0.0], [1.0, 0.0])
    assert abs(Y[0]) < 1e-10 and res < 1e-6
    chart = Ellipsoid(1.0, 1.5, 2.0)
    q = [0.8, 0.6]
    rep = curvature_report(Q01, chart, q)
    X = np.array([1.0, 0.3])
    Y, res = conjugate_direction(Q01, chart, q, X, rep=rep)
    assert X @ rep.h_mat @ Y == pytest.approx(0.0, abs=1e-9)
    assert res < 1e-6
    with pytest.raises(AsymptoticInput):
        conjugate_from_form(np.diag([1.0, -1.0]), np.array([1.0, 1.0]))
    with pytest.raises(AsymptoticInput):
        conjugate_from_form(np.zeros((2, 2)), np.array([1.0, 0.0]))


def test_sign_equivalences_examples():
    s = sign_equivalences(Q01, EuclideanSphere(), [1.0, 0.5])
    assert s.K_pos and s.Ke_pos and s.h_definite and s.consistent
    s = sign_equivalences(Q01, saddle(), [0.1, 0.2])
    assert not s.K_pos and not s.Ke_pos and not s.h_definite and s.consistent
    s = sign_equivalences(Q01, plane(), [0.0, 0.0])
    assert s.indeterminate and s.consistent is None
    torus = Torus(2.0, 0.5)
    for q in torus.grid(6, 6):
        s = sign_equivalences(Q01, torus, q)
        if not s.indeterminate:
            assert s.consistent
