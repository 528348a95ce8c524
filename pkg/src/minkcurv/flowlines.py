"""Curvature lines, asymptotic curves and the rigidity diagnostics.

Direction fields are integrated in chart coordinates with classical RK4 at
unit Euclidean ambient speed.  Eigenvectors carry only a sign ambiguity away
from umbilics, so every evaluation is sign-aligned with the previous one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .charts import jet as chart_jet
from .curvature import (
    UMBILIC_TOL,
    asymptotic_directions_from_form,
    curvature_report,
    normal_curvature_from_report,
)
from .errors import (
    DefiniteRegion,
    MinkowskiError,
    OpenSurface,
    UmbilicPoint,
    UmbilicStart,
)
from .norms import support_point

PRINCIPAL = ("principal_1", "principal_2")
ASYMPTOTIC = ("asymptotic_a", "asymptotic_b")
STOP_REASONS = (
    "length_reached",
    "umbilic_encountered",
    "domain_exit",
    "direction_undefined",
    "definite_region",
)


@dataclass
class FlowlineTrace:
    which: str
    points: list = field(default_factory=list)  # chart coordinates
    ambient: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    stop_reason: str = "length_reached"
    length: float = 0.0

    @property
    def max_residual(self):
        return max(self.residuals) if self.residuals else 0.0


class _StopTrace(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def _in_box(chart, q):
    for k in range(2):
        lo, hi = chart.domain[k]
        if not chart.periodic[k] and not (lo <= q[k] <= hi):
            return False
    return True


def _unit_speed(rep, v):
    return v / np.linalg.norm(rep.frame @ v)


def _principal_field(norm, chart, index, umbilic_tol, method):
    def field_at(q, ref):
        if not _in_box(chart, q):
            raise _StopTrace("domain_exit")
        try:
            rep = curvature_report(norm, chart, q, umbilic_tol=umbilic_tol, method=method)
        except MinkowskiError:
            raise _StopTrace("direction_undefined")
        gap = rep.lambda1 - rep.lambda2
        if gap < 10.0 * umbilic_tol * max(1.0, abs(rep.lambda1) + abs(rep.lambda2)):
            raise _StopTrace("umbilic_encountered")
        v = rep.E1 if index == 0 else rep.E2
        v = _unit_speed(rep, v)
        if ref is not None and (rep.frame @ v) @ ref < 0:
            v = -v
        return v, rep

    return field_at


def _asymptotic_field(norm, chart, branch, method):
    def field_at(q, ref):
        if not _in_box(chart, q):
            raise _StopTrace("domain_exit")
        try:
            rep = curvature_report(norm, chart, q, method=method)
        except MinkowskiError:
            raise _StopTrace("direction_undefined")
        dirs = asymptotic_directions_from_form(rep.h_mat)
        if not isinstance(dirs, list):
            raise _StopTrace("direction_undefined")
        if len(dirs) < 2 or rep.rank_h < 2:
            raise _StopTrace("definite_region")
        amb = [rep.frame @ d for d in dirs]
        if ref is None:
            v = dirs[branch]
        else:
            k = int(np.argmax([abs(a @ ref) / np.linalg.norm(a) for a in amb]))
            v = dirs[k] if amb[k] @ ref > 0 else -dirs[k]
        return _unit_speed(rep, v), rep

    return field_at


def _rk4_trace(chart, field_at, q0, step, max_length, which, record):
    trace = FlowlineTrace(which=which)
    q = np.array(q0, dtype=float)
    v0, rep = field_at(q, None)
    record(trace, q, rep)
    ref = rep.frame @ v0
    n_steps = int(np.ceil(max_length / step - 1e-9))
    for _ in range(n_steps):
        try:
            k1, r1 = field_at(q, ref)
            a1 = r1.frame @ k1
            k2, _ = field_at(q + 0.5 * step * k1, a1)
            k3, _ = field_at(q + 0.5 * step * k2, a1)
            k4, _ = field_at(q + step * k3, a1)
            qn = q + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            _, repn = field_at(qn, a1)
        except _StopTrace as stop:
            trace.stop_reason = stop.reason
            return trace
        q = qn
        ref = a1
        trace.length += step
        record(trace, q, repn)
    trace.stop_reason = "length_reached"
    return trace


def _prop45_residual(trace, rep):
    # chord form of (eta o gamma)' = lambda gamma': component of the eta
    # increment orthogonal to the position increment, per unit length
    if len(trace.ambient) < 2:
        return
    p0, e0 = trace.ambient[-2]
    p1, e1 = trace.ambient[-1]
    df = p1 - p0
    de = e1 - e0
    lam = (de @ df) / (df @ df)
    trace.residuals.append(float(np.linalg.norm(de - lam * df) / np.linalg.norm(df)))


def integrate_curvature_line(
    norm,
    chart,
    q0,
    which="principal_1",
    step=1e-3,
    max_length=1.0,
    umbilic_tol=UMBILIC_TOL,
    method="chain",
):
    """Follow a principal direction field from ``q0``.

    ``max_length`` and ``step`` are Euclidean arc lengths on the surface.
    Each step records the eigenvalue along the line and the curvature-line
    residual: the part of ``Delta eta`` not parallel to ``Delta f``,
    divided by ``|Delta f|``, which vanishes exactly on curvature lines.
    """
    if which not in PRINCIPAL:
        raise ValueError(f"which must be one of {PRINCIPAL}")
    index = PRINCIPAL.index(which)
    rep0 = curvature_report(norm, chart, q0, umbilic_tol=umbilic_tol, method=method)
    if rep0.umbilic:
        raise UmbilicStart(f"q0={np.asarray(q0).tolist()} is umbilic")
    field_at = _principal_field(norm, chart, index, umbilic_tol, method)

    def record(trace, q, rep):
        trace.points.append(q.copy())
        trace.ambient.append((rep.p, rep.eta))
        trace.lambdas.append(rep.lambda1 if index == 0 else rep.lambda2)
        _prop45_residual(trace, rep)

    try:
        return _rk4_trace(chart, field_at, q0, step, max_length, which, record)
    except _StopTrace as stop:
        return FlowlineTrace(which=which, stop_reason=stop.reason)


def integrate_asymptotic_curve(
    norm, chart, q0, branch="asymptotic_a", step=1e-3, max_length=1.0, method="chain"
):
    """Follow one root branch of ``h(X, X) = 0`` from ``q0``.

    Residuals are ``|k(gamma')|``, the normal curvature along the tangent,
    which vanishes on asymptotic curves.  The trace stops with
    ``definite_region`` where ``h`` stops being indefinite.
    """
    if branch not in ASYMPTOTIC:
        raise ValueError(f"branch must be one of {ASYMPTOTIC}")
    rep0 = curvature_report(norm, chart, q0, method=method)
    if not (rep0.rank_h == 2 and not rep0.h_definite):
        raise DefiniteRegion(f"h is not indefinite at q0={np.asarray(q0).tolist()}")
    field_at = _asymptotic_field(norm, chart, ASYMPTOTIC.index(branch), method)

    def record(trace, q, rep):
        trace.points.append(q.copy())
        trace.ambient.append((rep.p, rep.eta))
        if len(trace.points) >= 2:
            tangent = rep.chart_coords(trace.ambient[-1][0] - trace.ambient[-2][0])
            trace.residuals.append(abs(normal_curvature_from_report(rep, tangent)))

    return _rk4_trace(chart, field_at, q0, step, max_length, branch, record)


def _principal_unit(norm, chart, q, index, ref, method):
    rep = curvature_report(norm, chart, q, method=method)
    if rep.umbilic:
        raise UmbilicPoint(f"umbilic at q={np.asarray(q).tolist()}")
    v = rep.frame @ (rep.E1 if index == 0 else rep.E2)
    v /= np.linalg.norm(v)
    if ref is not None and v @ ref < 0:
        v = -v
    return v, rep


def _short_trace(norm, chart, q, index, length, n_steps, method):
    """End point of a curvature line of Euclidean length ``length`` (signed)."""
    sign = 1.0 if length >= 0 else -1.0
    rep = curvature_report(norm, chart, q, method=method)
    start = rep.frame @ (rep.E1 if index == 0 else rep.E2)
    field_at = _principal_field(norm, chart, index, UMBILIC_TOL, method)
    qq = np.array(q, dtype=float)
    ref = sign * start / np.linalg.norm(start)
    h = abs(length) / n_steps
    for _ in range(n_steps):
        k1, r1 = field_at(qq, ref)
        a1 = r1.frame @ k1
        k2, _ = field_at(qq + 0.5 * h * k1, a1)
        k3, _ = field_at(qq + 0.5 * h * k2, a1)
        k4, _ = field_at(qq + h * k3, a1)
        qq = qq + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ref = a1
    return qq


def _v1_projection(norm, chart, q, delta, n_steps, method):
    v1, rep = _principal_unit(norm, chart, q, 0, None, method)
    v2, _ = _principal_unit(norm, chart, q, 1, None, method)
    qp = _short_trace(norm, chart, q, 0, delta, n_steps, method)
    qm = _short_trace(norm, chart, q, 0, -delta, n_steps, method)
    v2p, _ = _principal_unit(norm, chart, qp, 1, v2, method)
    v2m, _ = _principal_unit(norm, chart, qm, 1, v2, method)
    D = (v2p - v2m) / (2.0 * delta)
    a, _, _ = np.linalg.solve(np.column_stack([v1, v2, rep.eta]), D)
    return float(a), v1, v2


@dataclass
class CoercivityReport:
    proj: float
    proj_derivative_along_V2: float | None
    applicable: bool


def coercivity_diagnostic(
    norm, chart, q, coercivity_tol=1e-3, delta=1e-2, n_steps=4, method="chain"
):
    """V1-component of ``D_{V1} V2`` and its derivative along the V2 line.

    ``V1, V2`` are the Euclidean-unit principal fields.  The component is
    computed by differencing ``V2`` along a short V1 curvature line; when
    it vanishes (within ``coercivity_tol``) the derivative along the V2
    line is differenced the same way.  A negative derivative means the
    coercive-convexity hypothesis holds at ``q``.
    """
    rep = curvature_report(norm, chart, q, method=method)
    if rep.umbilic:
        raise UmbilicPoint(f"umbilic at q={np.asarray(q).tolist()}")
    f0, _, _ = _v1_projection(norm, chart, q, delta, n_steps, method)
    applicable = abs(f0) <= coercivity_tol
    deriv = None
    if applicable:
        qp = _short_trace(norm, chart, q, 1, delta, n_steps, method)
        qm = _short_trace(norm, chart, q, 1, -delta, n_steps, method)
        fp, _, _ = _v1_projection(norm, chart, qp, delta, n_steps, method)
        fm, _, _ = _v1_projection(norm, chart, qm, delta, n_steps, method)
        deriv = (fp - fm) / (2.0 * delta)
    return CoercivityReport(proj=f0, proj_derivative_along_V2=deriv, applicable=bool(applicable))


@dataclass
class ContactReport:
    p_star: np.ndarray
    q_star: np.ndarray
    chart_index: int
    r_star: float
    K_at_p: float
    product: float
    lemma_tol: float

    @property
    def holds(self):
        return self.product >= 1.0 - self.lemma_tol


def enclosing_ball_contact(norm, chart, grid=(40, 40), lemma_tol=1e-3, h_fd=None):
    """Contact point of the smallest origin-centred Minkowski ball containing the surface.

    ``r_star`` is the maximum of ``F`` over the surface (grid maximum over
    every chart of the atlas, refined by a local maximization) and
    ``K_at_p`` the Minkowski Gaussian curvature there.  The contact point
    satisfies ``K r_star^2 >= 1``.
    """
    if not chart.closed:
        raise OpenSurface(f"{chart.family} is not a closed surface")
    best = None
    for idx, c in enumerate(chart.atlas()):
        for q in c.grid(*grid):
            val = norm.jet(c.point(q))[0]
            if best is None or val > best[0]:
                best = (val, idx, q)
    _, idx, q0 = best
    c = chart.atlas()[idx]
    res = minimize(
        lambda q: -norm.jet(c.point(q))[0],
        q0,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000},
    )
    q_star = res.x if -res.fun >= best[0] and c.contains(res.x) else q0
    q_star = c.wrap(q_star)
    p_star = c.point(q_star)
    r_star = float(norm.jet(p_star)[0])
    rep = curvature_report(norm, c, q_star, h_fd=h_fd)
    return ContactReport(
        p_star=p_star,
        q_star=q_star,
        chart_index=idx,
        r_star=r_star,
        K_at_p=rep.K,
        product=rep.K * r_star**2,
        lemma_tol=lemma_tol,
    )


def birkhoff_normal_at(norm, chart, q):
    J = chart_jet(chart, q)
    return support_point(norm, J.xi).u
