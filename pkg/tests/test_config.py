import json
import textwrap

import numpy as np
import pytest

from minkcurv import ParseError, ValidationError, parse_config
from minkcurv.config import DEFAULT_OPTIONS, load_config
from minkcurv.harness import (
    run_check,
    run_curvature_field,
    run_lines,
    run_normal_profile,
    run_sections,
    to_csv,
    to_json,
)

MINIMAL = """
norm: {family: euclidean}
surface: {family: euclidean_sphere}
"""


def cfg(text):
    return parse_config(textwrap.dedent(text))


def test_minimal_config_has_defaults():
    c = cfg(MINIMAL)
    assert c.command == "curvatures"
    assert c.grid == (20, 20)
    assert c.options == DEFAULT_OPTIONS
    assert c.format == "csv" and c.out is None
    assert c.surface_spec == {"family": "euclidean_sphere", "r": 1.0, "center": [0.0, 0.0, 0.0]}


@pytest.mark.parametrize(
    "text,field",
    [
        ("norm: {family: quartic, eps: -1}\nsurface: {family: plane}", "eps"),
        ("norm: {family: quartic, eps: -1}\nsurface: {family: torus}", "eps"),
        ("norm: {family: lp}\nsurface: {family: torus}", "family"),
        ("norm: {family: euclidean}\nsurface: {family: klein_bottle}", "family"),
        ("norm: {family: ellipsoid, A: [[1, 0], [0, 1]]}\nsurface: {family: torus}", "A"),
        ("norm: {family: euclidean}\nsurface: {family: torus, R: 1, r: 2}", "r"),
        ("norm: {family: euclidean}\nsurface: {family: torus, grid: [1, 5]}", "grid"),
        ("norm: {family: euclidean}\nsurface: {family: torus}\noptions: {step: 0}", "step"),
        ("norm: {family: euclidean}\nsurface: {family: torus}\noptions: {speed: 3}", "speed"),
        ("norm: {family: euclidean}\nsurface: {family: graph}", "terms"),
        ("surface: {family: torus}", "norm"),
        ("command: draw\nnorm: {family: euclidean}\nsurface: {family: torus}", "command"),
    ],
)
def test_validation_names_the_field(text, field):
    with pytest.raises(ValidationError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_config("norm: {family: euclidean}\nsurface: [torus\noptions: {}\n")
    assert exc.value.line is not None and exc.value.line >= 2


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(MINIMAL)
    assert load_config(path).norm_spec == {"family": "euclidean"}


def test_minkowski_sphere_sweep():
    c = cfg("""
        norm: {family: quartic, eps: 0.1}
        surface: {family: minkowski_sphere, rho: 2, grid: [20, 20]}
    """)
    t = run_curvature_field(c)
    assert len(t.rows) == 400
    assert np.all(np.abs(np.array(t.column("K")) - 0.25) <= 1e-4)


def test_plane_sweep_is_flat():
    t = run_curvature_field(cfg("""
        norm: {family: quartic, eps: 0.1}
        surface: {family: graph, preset: plane, grid: [6, 6]}
    """))
    assert np.all(np.abs(t.column("K")) <= 1e-6) and np.all(np.abs(t.column("H_mean")) <= 1e-6)


def test_torus_sweep_matches_the_classical_formula():
    t = run_curvature_field(cfg("""
        norm: {family: euclidean}
        surface: {family: torus, R: 2, r: 0.5, grid: [8, 12]}
    """))
    v = np.array(t.column("v"))
    K = np.array(t.column("K"))
    assert np.allclose(K, np.cos(v) / (0.5 * (2 + 0.5 * np.cos(v))), atol=1e-5)
    assert all(e == "" for e in t.column("error"))


def test_sweep_isolates_point_errors():
    t = run_curvature_field(cfg("""
        norm: {family: euclidean}
        surface: {family: euclidean_sphere, grid: [5, 5]}
        options: {umbilic_tol: 0.001}
    """))
    assert len(t.rows) == 25
    assert all(isinstance(e, str) for e in t.column("error"))


def test_workers_do_not_change_the_output():
    text = """
        norm: {family: quartic, eps: 0.1}
        surface: {family: ellipsoid, a: 1, b: 1.5, c: 2, grid: [7, 9]}
        options: {workers: %d}
    """
    a = to_csv(run_curvature_field(cfg(text % 1)))
    b = to_csv(run_curvature_field(cfg(text % 3)))
    assert a == b


def test_csv_and_json_formats():
    t = run_curvature_field(cfg("""
        norm: {family: euclidean}
        surface: {family: euclidean_sphere, r: 3, grid: [3, 3]}
    """))
    lines = to_csv(t).splitlines()
    assert lines[0] == ",".join(t.columns)
    assert lines[0].startswith("u,v,p_x,p_y,p_z")
    first = lines[1].split(",")
    k = t.columns.index("K")
    assert float(first[k]) == t.rows[0][k]
    assert first[t.columns.index("umbilic")] in ("true", "false")
    doc = json.loads(to_json(t, "curvatures"))
    assert doc["command"] == "curvatures" and len(doc["rows"]) == 9
    assert set(doc["rows"][0]) == set(t.columns)


def test_other_commands_produce_tables():
    base = """
        norm: {family: quartic, eps: 0.1}
        surface: {family: ellipsoid, a: 1, b: 1.5, c: 2, grid: [4, 4]}
        options: {point: [0.9, 0.7], max_length: 0.05, step: 0.002, arc_extent: 0.024, n_directions: 16}
    """
    prof = run_normal_profile(cfg(base))
    assert len(prof.rows) == 16
    secs = run_sections(cfg(base))
    assert np.nanmax(np.abs(secs.column("discrepancy"))) <= 1e-3
    lines = run_lines(cfg(base))
    assert lines.meta["stop_reason"] == "length_reached"


def test_check_negative_control():
    base = """
        norm: {family: euclidean}
        surface: {family: minkowski_sphere, rho: 1.5, grid: [6, 6]}
        options: {umbilic_tol: %s}
    """
    assert run_check(cfg(base % "1.0e-6")).meta["passed"]
    bad = run_check(cfg(base % "0"))
    assert not bad.meta["passed"]
    assert "umbilic_classification" in {r[0] for r in bad.rows if not r[4]}


def test_quartic_with_zero_eps_reduces_to_euclidean():
    base = """
        norm: %s
        surface: {family: ellipsoid, a: 1, b: 1.5, c: 2, grid: [6, 6]}
    """
    a = run_curvature_field(cfg(base % "{family: euclidean}"))
    b = run_curvature_field(cfg(base % "{family: quartic, eps: 0}"))
    for col in ("K", "H_mean", "lambda1", "lambda2", "eta_x", "eta_z"):
        assert np.allclose(a.column(col), b.column(col), atol=1e-9, rtol=0)
