"""Config-driven runs: curvature sweeps, profiles, sections, lines and checks.

Every command returns a :class:`Table` (ordered columns plus rows) that the
writers serialize as CSV or JSON.  Sweeps isolate per-point failures in the
``error`` column and keep row-major order whatever the worker count.
"""
from __future__ import annotations

import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curvature import curvature_report, normal_curvature_from_report, normal_profile
from .errors import MinkowskiError
from .flowlines import integrate_asymptotic_curve, integrate_curvature_line
from .invariants import run_invariant_suite
from .norms import require_admissible
from .sections import oracle_normal_curvature

FIELD_COLUMNS = (
    "u",
    "v",
    "p_x",
    "p_y",
    "p_z",
    "xi_x",
    "xi_y",
    "xi_z",
    "eta_x",
    "eta_y",
    "eta_z",
    "lambda1",
    "lambda2",
    "K",
    "H_mean",
    "K_e",
    "umbilic",
    "tau_residual",
    "rank_h",
    "error",
)


@dataclass
class Table:
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _field_row(norm, chart, q, opts):
    try:
        rep = curvature_report(
            norm, chart, q, h_fd=opts["h_fd"], umbilic_tol=opts["umbilic_tol"], method=opts["method"]
        )
    except (MinkowskiError, np.linalg.LinAlgError) as exc:
        nan = [float("nan")] * (len(FIELD_COLUMNS) - 3)
        return [float(q[0]), float(q[1]), *nan, f"{type(exc).__name__}: {exc}"]
    return [
        float(rep.q[0]),
        float(rep.q[1]),
        *map(float, rep.p),
        *map(float, rep.xi),
        *map(float, rep.eta),
        rep.lambda1,
        rep.lambda2,
        rep.K,
        rep.H_mean,
        rep.K_e,
        rep.umbilic,
        rep.tau_residual,
        rep.rank_h,
        "",
    ]


def _sweep_chunk(config, points):
    norm = config.build_norm()
    chart = config.build_surface(norm)
    return [_field_row(norm, chart, q, config.options) for q in points]


def _chunks(seq, n):
    k, r = divmod(len(seq), n)
    out, start = [], 0
    for i in range(n):
        end = start + k + (1 if i < r else 0)
        out.append(seq[start:end])
        start = end
    return [c for c in out if c]


def preflight(config, norm=None):
    """Refuse inadmissible norms before any curvature is computed."""
    norm = config.build_norm() if norm is None else norm
    return require_admissible(
        norm, config.options["admissibility_samples"], config.options["admissibility_tol"]
    )


def run_curvature_field(config):
    """Curvature record for every grid point, row-major."""
    norm = config.build_norm()
    adm = preflight(config, norm)
    chart = config.build_surface(norm)
    points = chart.grid(*config.grid)
    workers = config.options["workers"]
    if workers <= 1:
        rows = [_field_row(norm, chart, q, config.options) for q in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_sweep_chunk, [config] * workers, _chunks(points, workers))
            rows = [row for part in parts for row in part]
    return Table(FIELD_COLUMNS, rows, {"admissibility": adm.as_dict()})


def _point(config, chart):
    q = config.options["point"]
    if q is None:
        q = [0.5 * (lo + hi) for lo, hi in chart.domain]
    return np.array(q, dtype=float)


def run_normal_profile(config):
    """Normal curvature around the tangent circle at the configured point."""
    norm = config.build_norm()
    preflight(config, norm)
    chart = config.build_surface(norm)
    o = config.options
    rep = curvature_report(norm, chart, _point(config, chart), h_fd=o["h_fd"], method=o["method"])
    t, dirs, k = normal_profile(rep, o["n_directions"])
    rows = [
        [float(a), float(kk), rep.lambda1, rep.lambda2, *map(float, d)]
        for a, kk, d in zip(t, k, dirs)
    ]
    cols = ("theta", "k", "lambda1", "lambda2", "X_x", "X_y", "X_z")
    return Table(cols, rows, {"q": rep.q.tolist(), "umbilic": rep.umbilic})


def run_sections(config):
    """Formula against section oracle for ``n_triples`` directions at one point."""
    norm = config.build_norm()
    preflight(config, norm)
    chart = config.build_surface(norm)
    o = config.options
    q = _point(config, chart)
    rep = curvature_report(norm, chart, q, h_fd=o["h_fd"], method=o["method"])
    rows = []
    for j in range(o["n_triples"]):
        theta = np.pi * j / o["n_triples"]
        X = np.cos(theta) * rep.basis[0] + np.sin(theta) * rep.basis[1]
        k_formula = normal_curvature_from_report(rep, X)
        try:
            k_ratio = oracle_normal_curvature(
                norm, chart, q, X, o["arc_extent"], o["step"], o["half_width"], method="ratio"
            )
            k_reparam = oracle_normal_curvature(
                norm, chart, q, X, o["arc_extent"], o["step"], o["half_width"], method="reparam"
            )
            err = ""
        except MinkowskiError as exc:
            k_ratio = k_reparam = float("nan")
            err = f"{type(exc).__name__}: {exc}"
        rows.append(
            [float(theta), k_formula, k_ratio, k_reparam, abs(k_formula - k_ratio), err]
        )
    cols = ("theta", "k_formula", "k_oracle", "k_oracle_reparam", "discrepancy", "error")
    return Table(cols, rows, {"q": rep.q.tolist()})


def run_lines(config):
    """One curvature line or asymptotic curve from the configured point."""
    norm = config.build_norm()
    preflight(config, norm)
    chart = config.build_surface(norm)
    o = config.options
    q = _point(config, chart)
    if o["which"].startswith("principal"):
        trace = integrate_curvature_line(
            norm, chart, q, o["which"], o["step"], o["max_length"], umbilic_tol=o["umbilic_tol"]
        )
        values = trace.lambdas
    else:
        trace = integrate_asymptotic_curve(norm, chart, q, o["which"], o["step"], o["max_length"])
        values = [float("nan")] * len(trace.points)
    residuals = [float("nan")] + list(trace.residuals)
    rows = []
    for i, (qq, (p, _)) in enumerate(zip(trace.points, trace.ambient)):
        rows.append(
            [i, float(qq[0]), float(qq[1]), *map(float, p), float(values[i]), residuals[i], trace.stop_reason]
        )
    cols = ("index", "u", "v", "p_x", "p_y", "p_z", "lambda", "residual", "stop_reason")
    return Table(cols, rows, {"stop_reason": trace.stop_reason, "length": trace.length})


def run_check(config):
    """Invariant suite; ``meta["passed"]`` is false if any check failed."""
    norm = config.build_norm()
    chart = config.build_surface(norm)
    records = run_invariant_suite(norm, chart, config.grid, config.options)
    cols = ("name", "witnesses", "worst", "threshold", "pass", "note")
    rows = [[r.name, r.witnesses, r.worst, r.threshold, r.passed, r.note] for r in records]
    return Table(cols, rows, {"passed": all(r.passed for r in records)})


COMMANDS = {
    "curvatures": run_curvature_field,
    "normal-profile": run_normal_profile,
    "sections": run_sections,
    "lines": run_lines,
    "check": run_check,
}


def _csv_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    s = str(x)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def to_csv(table):
    buf = io.StringIO()
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_csv_cell(x) for x in row) + "\n")
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    return x


def to_json(table, command=None):
    doc = {
        "command": command,
        "meta": table.meta,
        "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows],
    }
    return json.dumps(doc, indent=1, default=_json_value) + "\n"
