import numpy as np
import pytest

from minkcurv import (
    Cylinder,
    DegenerateChart,
    Ellipsoid,
    EllipsoidNorm,
    EuclideanNorm,
    EuclideanSphere,
    Graph,
    LinearImage,
    MinkowskiSphere,
    OutOfDomain,
    QuarticNorm,
    Torus,
    jet,
    minkowski_sphere_chart,
    paraboloid,
    plane,
    saddle,
)

CHARTS = [
    EuclideanSphere(1.5, center=(0.1, -0.2, 0.3)),
    Ellipsoid(1.0, 1.5, 2.0),
    MinkowskiSphere(QuarticNorm(0.1), 2.0),
    MinkowskiSphere(EllipsoidNorm(np.diag([1.0, 1.0, 2.0])), 1.0, pole="x"),
    Torus(2.0, 0.5),
    Cylinder(2.0),
    paraboloid(),
    saddle(),
    Graph({(3, 0): 0.2, (1, 2): -0.4, (0, 1): 0.3}),
    LinearImage([[1.0, 0.2, 0.0], [0.0, 1.0, 0.0], [0.0, 0.3, 2.0]], Torus()),
]


def _interior_points(chart, n=6):
    return [q for q in chart.grid(n, n) if chart.contains(q)]


@pytest.mark.parametrize("chart", CHARTS, ids=lambda c: type(c).__name__)
def test_partials_match_finite_differences(chart):
    h = 1e-5
    for q in _interior_points(chart):
        f, fu, fv, fuu, fuv, fvv = chart.evaluate(q)
        du, dv = np.array([h, 0.0]), np.array([0.0, h])
        assert np.allclose((chart.point(q + du) - chart.point(q - du)) / (2 * h), fu, atol=1e-8)
        assert np.allclose((chart.point(q + dv) - chart.point(q - dv)) / (2 * h), fv, atol=1e-8)
        assert np.allclose((chart.evaluate(q + du)[1] - chart.evaluate(q - du)[1]) / (2 * h), fuu, atol=1e-7)
        assert np.allclose((chart.evaluate(q + dv)[1] - chart.evaluate(q - dv)[1]) / (2 * h), fuv, atol=1e-7)
        assert np.allclose((chart.evaluate(q + dv)[2] - chart.evaluate(q - dv)[2]) / (2 * h), fvv, atol=1e-7)


@pytest.mark.parametrize("chart", CHARTS, ids=lambda c: type(c).__name__)
def test_normal_is_unit_and_orthogonal(chart):
    for q in _interior_points(chart):
        J = jet(chart, q)
        assert np.linalg.norm(J.xi) == pytest.approx(1.0)
        assert abs(J.xi @ J.f_u) <= 1e-10 * np.linalg.norm(J.f_u)
        assert abs(J.xi @ J.f_v) <= 1e-10 * np.linalg.norm(J.f_v)


def test_jet_examples():
    J = jet(EuclideanSphere(1.0), [np.pi / 2, 0.3])
    assert np.allclose(J.xi, [np.cos(0.3), np.sin(0.3), 0.0])
    J = jet(paraboloid(), [0.0, 0.0])
    assert np.allclose(J.f_u, [1, 0, 0]) and np.allclose(J.f_v, [0, 1, 0])
    assert np.allclose(J.xi, [0, 0, 1]) and np.allclose(J.f_uu, [0, 0, 1])
    J = jet(Torus(2.0, 0.5), [0.7, 0.0])
    assert np.allclose(J.xi, [np.cos(0.7), np.sin(0.7), 0.0])


@pytest.mark.parametrize("chart", [c for c in CHARTS if c.closed], ids=lambda c: type(c).__name__)
def test_closed_charts_point_outward(chart):
    for q in _interior_points(chart):
        J = jet(chart, q)
        centre = getattr(chart, "center", np.zeros(3))
        if isinstance(chart, Torus):
            ring = np.array([J.p[0], J.p[1], 0.0])
            centre = chart.R * ring / np.linalg.norm(ring)
        if isinstance(chart, LinearImage):
            continue
        assert J.xi @ (J.p - centre) > 0


def test_out_of_domain_and_wrap():
    with pytest.raises(OutOfDomain):
        jet(paraboloid(), [2.0, 0.0])
    with pytest.raises(OutOfDomain):
        jet(EuclideanSphere(), [0.0, 1.0])
    T = Torus()
    assert np.allclose(jet(T, [0.3 + 2 * np.pi, 0.1]).p, jet(T, [0.3, 0.1]).p)


def test_degenerate_chart():
    class Flat(Graph):
        def evaluate(self, q):
            f, fu, fv, *rest = super().evaluate(q)
            return (f, fu, fu.copy(), *rest)

    with pytest.raises(DegenerateChart):
        jet(Flat({}), [0.0, 0.0])


def test_minkowski_sphere_examples():
    round_ = minkowski_sphere_chart(EuclideanNorm(), 1.0)
    ref = EuclideanSphere(1.0)
    for q in round_.grid(7, 7):
        assert np.allclose(round_.point(q), ref.point(q))

    norm = QuarticNorm(0.1)
    chart = minkowski_sphere_chart(norm, 2.0, center=(0.5, -1.0, 0.2))
    rng = np.random.default_rng(0)
    (a, b), (c, d) = chart.domain
    qs = np.column_stack([rng.uniform(a, b, 1000), rng.uniform(c, d, 1000)])
    vals = [norm.jet(chart.point(q) - chart.center)[0] for q in qs]
    assert np.max(np.abs(np.array(vals) - 2.0)) <= 1e-10

    chart = minkowski_sphere_chart(EllipsoidNorm(np.diag([1.0, 1.0, 2.0])), 1.0)
    for q in chart.grid(7, 7):
        x, y, z = chart.point(q)
        assert x * x + y * y + 4 * z * z == pytest.approx(1.0)


@pytest.mark.parametrize("chart", [c for c in CHARTS if c.closed], ids=lambda c: type(c).__name__)
def test_atlas_covers_the_poles(chart):
    # every direction from the centre is reached by some chart of the atlas
    if isinstance(chart, (Torus, LinearImage)):
        assert len(chart.atlas()) >= 1
        return
    centre = chart.center
    pts = np.array([c.point(q) - centre for c in chart.atlas() for q in c.grid(40, 40)])
    dirs = pts / np.linalg.norm(pts, axis=1)[:, None]
    for axis in np.vstack([np.eye(3), -np.eye(3)]):
        # grid spacing is about pi/40, so the nearest sample is within ~0.08 rad
        assert np.max(dirs @ axis) > 0.99


def test_grid_is_row_major_and_skips_periodic_duplicates():
    T = Torus()
    g = T.grid(4, 3)
    assert len(g) == 12
    assert np.allclose(g[0], [0.0, -np.pi]) and np.allclose(g[1], [0.0, -np.pi + 2 * np.pi / 3])
    assert g[-1][0] < 2 * np.pi
    p = plane().grid(2, 2)
    assert np.allclose(p, [[-1, -1], [-1, 1], [1, -1], [1, 1]])


def test_constructor_validation():
    with pytest.raises(ValueError):
        Torus(1.0, 2.0)
    with pytest.raises(ValueError):
        EuclideanSphere(-1.0)
    with pytest.raises(ValueError):
        Cylinder(0.0)
    with pytest.raises(ValueError):
        EuclideanSphere(1.0, pole="w")
