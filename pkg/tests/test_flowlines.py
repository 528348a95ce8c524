import numpy as np
import pytest

from minkcurv import (
    DefiniteRegion,
    Ellipsoid,
    EuclideanNorm,
    EuclideanSphere,
    OpenSurface,
    QuarticNorm,
    Torus,
    UmbilicPoint,
    UmbilicStart,
    coercivity_diagnostic,
    enclosing_ball_contact,
    integrate_asymptotic_curve,
    integrate_curvature_line,
    minkowski_sphere_chart,
    paraboloid,
    saddle,
)

EU = EuclideanNorm()
Q01 = QuarticNorm(0.1)
TORUS = Torus(2.0, 0.5)


def test_torus_curvature_lines_are_meridians_and_parallels():
    q0 = [0.3, 1.0]
    constant = set()
    for which in ("principal_1", "principal_2"):
        tr = integrate_curvature_line(EU, TORUS, q0, which=which, step=1e-2, max_length=0.5)
        pts = np.array(tr.points)
        assert tr.stop_reason == "length_reached"
        spread = np.ptp(pts, axis=0)
        k = int(np.argmin(spread))
        assert spread[k] < 1e-8
        assert spread[1 - k] > 0.1
        constant.add(k)
        assert tr.max_residual < 1e-3
    assert constant == {0, 1}


def test_sphere_is_umbilic_everywhere():
    for q in ([1.0, 0.0], [2.0, 1.5]):
        with pytest.raises(UmbilicStart):
            integrate_curvature_line(EU, EuclideanSphere(), q)
    with pytest.raises(ValueError):
        integrate_curvature_line(EU, TORUS, [0.0, 1.0], which="principal_3")


def test_curvature_line_residual_under_quartic_norm():
    tr = integrate_curvature_line(Q01, Ellipsoid(1.0, 1.0, 2.0), [1.0, 0.7], step=2e-3, max_length=0.3)
    assert len(tr.points) > 10
    assert tr.max_residual <= 1e-3
    assert len(tr.lambdas) == len(tr.points)


def test_saddle_asymptotic_lines_are_diagonals():
    slopes = []
    for branch in ("asymptotic_a", "asymptotic_b"):
        tr = integrate_asymptotic_curve(EU, saddle(), [0.0, 0.0], branch=branch, step=1e-2, max_length=0.5)
        pts = np.array(tr.points)
        assert np.allclose(np.abs(pts[:, 0]), np.abs(pts[:, 1]), atol=1e-8)
        slopes.append(np.sign(pts[-1, 0] * pts[-1, 1]))
        assert tr.max_residual <= 1e-3
    assert sorted(slopes) == [-1.0, 1.0]


def test_asymptotic_residual_under_quartic_norm():
    tr = integrate_asymptotic_curve(Q01, saddle(), [0.1, -0.05], step=5e-3, max_length=0.4)
    assert tr.max_residual <= 1e-3


def test_torus_inner_region_stops_at_parabolic_circle():
    tr = integrate_asymptotic_curve(EU, TORUS, [0.0, np.pi], step=1e-2, max_length=20.0)
    assert tr.stop_reason == "definite_region"
    v = np.mod(np.array(tr.points)[:, 1], 2 * np.pi)
    assert np.all(np.cos(v) <= 1e-2)


def test_definite_start_rejected():
    with pytest.raises(DefiniteRegion):
        integrate_asymptotic_curve(EU, paraboloid(), [0.0, 0.0])


def test_coercivity_examples():
    # on an oblate spheroid the profile meridians are symmetry lines
    rep = coercivity_diagnostic(EU, Ellipsoid(2.0, 2.0, 1.0), [0.4, 0.9])
    assert rep.applicable and abs(rep.proj) < 1e-6
    assert np.isfinite(rep.proj_derivative_along_V2)
    rep = coercivity_diagnostic(Q01, Ellipsoid(1.0, 1.5, 2.0), [0.7, 1.1])
    assert np.isfinite(rep.proj)
    if not rep.applicable:
        assert rep.proj_derivative_along_V2 is None
    with pytest.raises(UmbilicPoint):
        coercivity_diagnostic(EU, EuclideanSphere(), [1.0, 1.0])


def test_enclosing_ball_examples():
    rep = enclosing_ball_contact(EU, TORUS, grid=(24, 24))
    assert rep.r_star == pytest.approx(2.5, abs=1e-6)
    assert rep.K_at_p == pytest.approx(0.8, abs=1e-4)
    assert rep.holds
    rep = enclosing_ball_contact(Q01, minkowski_sphere_chart(Q01, 2.0), grid=(16, 16))
    assert rep.r_star == pytest.approx(2.0, abs=1e-9)
    assert rep.K_at_p == pytest.approx(0.25, abs=1e-5)
    assert rep.product == pytest.approx(1.0, abs=1e-3)
    rep = enclosing_ball_contact(Q01, Ellipsoid(1.0, 1.0, 2.0), grid=(24, 24))
    assert rep.product >= 1 - 1e-3 and rep.holds


def test_open_surface_rejected():
    with pytest.raises(OpenSurface):
        enclosing_ball_contact(EU, saddle())
