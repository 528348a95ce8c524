"""Normal curvature from first principles: trace a normal section, measure it.

The section of the surface by the plane through ``p`` spanned by the
Birkhoff normal and a tangent direction is followed in chart coordinates
with a predictor-corrector march, projected to the plane, and its circular
curvature in the restricted norm is measured.  This is independent of the
closed formula in :mod:`minkcurv.curvature` and serves as its oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import jet as chart_jet
from .errors import PlaneDegenerate, TraceStall
from .norms import support_point
from .planar import (
    PlaneCurveSample,
    PlaneNormModel,
    circular_curvature_ratio,
    circular_curvature_reparam,
)

CORRECTOR_TOL = 1e-14
CORRECTOR_MAXITER = 25


@dataclass
class PlaneSectionCurve:
    p: np.ndarray
    eta: np.ndarray
    X: np.ndarray  # ambient unit tangent direction
    n_plane: np.ndarray
    plane_basis: tuple  # (b1, b2): b1 along X, b2 towards eta
    samples: np.ndarray  # ambient points, ordered along +X
    chart_points: np.ndarray
    base_index: int
    projected: np.ndarray  # plane coordinates relative to p
    plane_residual: float
    stopped_early: bool = False
    circ_curvature: float | None = None

    def plane_curve(self):
        return PlaneCurveSample(self.projected, self.base_index)

    def plane_norm(self, norm):
        b1, b2 = self.plane_basis
        return PlaneNormModel(b1=b1, b2=b2, parent=norm)


def _in_box(chart, q):
    for k in range(2):
        if chart.periodic[k]:
            continue
        lo, hi = chart.domain[k]
        if not (lo <= q[k] <= hi):
            return False
    return True


def _march(chart, norm, q0, p, n, direction, n_steps, step):
    pts, qs = [], []
    q = q0.copy()
    prev_t = None
    for _ in range(n_steps):
        _, fu, fv, *_ = chart.evaluate(q)
        g = np.array([fu @ n, fv @ n])
        gn = np.linalg.norm(g)
        if gn <= 1e-10 * max(np.linalg.norm(fu), np.linalg.norm(fv)):
            raise TraceStall(f"section tangent to the chart at q={q.tolist()}")
        t = np.array([-g[1], g[0]])
        ta = fu * t[0] + fv * t[1]
        ref = direction if prev_t is None else prev_t
        if (ta @ ref if prev_t is None else t @ ref) < 0:
            t, ta = -t, -ta
        t = t * (step / norm.jet(ta)[0])
        prev_t = t
        qn = q + t
        # corrector: 1D Newton along the transverse chart direction
        w = g / gn
        s = 0.0
        for _ in range(CORRECTOR_MAXITER):
            f, fu, fv, *_ = chart.evaluate(qn + s * w)
            G = (f - p) @ n
            if abs(G) <= CORRECTOR_TOL * max(1.0, np.linalg.norm(f - p)):
                break
            dG = (fu * w[0] + fv * w[1]) @ n
            if dG == 0.0:
                raise TraceStall("corrector derivative vanished")
            s -= G / dG
        else:
            raise TraceStall(f"corrector failed near q={qn.tolist()} (residual {G:.3e})")
        qn = qn + s * w
        if not _in_box(chart, qn):
            return pts, qs, True
        q = qn
        qs.append(q.copy())
        pts.append(f)
    return pts, qs, False


def trace_section(norm, chart, q, X, arc_extent=0.2, step=1e-3, min_side=5):
    """Sample the normal section through ``q`` in direction ``X``.

    ``X`` is a tangent vector in chart coordinates (length 2) or ambient
    form (length 3).  The march takes steps of Minkowski length ``step`` up
    to ``arc_extent`` on each side of ``q``; it stops early at the chart
    boundary, and fails with :class:`TraceStall` if fewer than ``min_side``
    points are obtained on either side.
    """
    J = chart_jet(chart, q)
    q = J.q
    eta = support_point(norm, J.xi).u
    X = np.asarray(X, dtype=float)
    Xa = J.frame @ X if X.shape == (2,) else X - (X @ J.xi) * J.xi
    nX = np.linalg.norm(Xa)
    if nX == 0.0:
        raise ValueError("direction must be nonzero")
    Xa = Xa / nX
    n = np.cross(eta, Xa)
    if np.linalg.norm(n) <= 1e-12 * np.linalg.norm(eta):
        raise PlaneDegenerate("eta is parallel to X")
    n /= np.linalg.norm(n)
    n_steps = int(np.ceil(arc_extent / step - 1e-9))
    fwd, qf, cut_f = _march(chart, norm, q, J.p, n, Xa, n_steps, step)
    bwd, qb, cut_b = _march(chart, norm, q, J.p, n, -Xa, n_steps, step)
    if len(fwd) < min_side or len(bwd) < min_side:
        raise TraceStall(
            f"section left the chart after {len(bwd)}/{len(fwd)} steps on the two sides"
        )
    samples = np.array(bwd[::-1] + [J.p] + fwd)
    chart_pts = np.array(qb[::-1] + [q] + qf)
    base = len(bwd)
    b1 = Xa
    b2 = eta - (eta @ b1) * b1
    b2 /= np.linalg.norm(b2)
    rel = samples - J.p
    projected = np.column_stack([rel @ b1, rel @ b2])
    return PlaneSectionCurve(
        p=J.p,
        eta=eta,
        X=Xa,
        n_plane=n,
        plane_basis=(b1, b2),
        samples=samples,
        chart_points=chart_pts,
        base_index=base,
        projected=projected,
        plane_residual=float(np.max(np.abs(rel @ n))),
        stopped_early=cut_f or cut_b,
    )


def oracle_normal_curvature(
    norm, chart, q, X, arc_extent=0.2, step=1e-3, half_width=5, method="ratio", section=None
):
    """Circular curvature of the normal section at ``q`` in direction ``X``.

    The curve is translated to the linear plane spanned by ``eta`` and
    ``X`` and measured in the norm restricted to that plane.  The sign is
    such that a Minkowski sphere of radius ``rho`` (outward orientation)
    gives ``+1/rho``.
    """
    sec = trace_section(norm, chart, q, X, arc_extent, step) if section is None else section
    pn = sec.plane_norm(norm)
    curve = sec.plane_curve()
    if method == "ratio":
        k = circular_curvature_ratio(pn, curve, half_width)
    elif method == "reparam":
        k = circular_curvature_reparam(pn, curve, h=step)
    else:
        raise ValueError(f"unknown method {method!r}")
    # the plane is oriented (X, eta): bending away from eta is clockwise
    sec.circ_curvature = -k
    return -k
