"""Plane geometry of a norm restricted to a plane through the origin.

Circular curvature of a plane curve is computed two ways: as the ratio of
the Euclidean curvature of the curve to that of the unit circle at the point
with the same tangent direction, and as the derivative of the unit-circle
parameter that matches tangents, taken with respect to Minkowski arc length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import (
    CollinearSamples,
    DegeneratePlane,
    InsufficientSamples,
    OrientationAmbiguity,
)


def orthonormal_plane(a, b):
    """Gram-Schmidt basis of span{a, b}, keeping the orientation of (a, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a)
    if na == 0.0 or np.linalg.norm(np.cross(a, b)) <= 1e-12 * na * np.linalg.norm(b):
        raise DegeneratePlane("plane spanned by parallel vectors")
    b1 = a / na
    b2 = b - (b @ b1) * b1
    b2 /= np.linalg.norm(b2)
    return b1, b2


@dataclass(frozen=True)
class PlaneNormModel:
    """Unit circle ``phi(theta) = r(theta) (cos theta, sin theta)`` of a restricted norm."""

    b1: np.ndarray
    b2: np.ndarray
    parent: object

    def lift(self, w):
        """Plane coordinates to ambient vectors (works on ``(2,)`` or ``(n, 2)``)."""
        w = np.asarray(w, dtype=float)
        return w[..., :1] * self.b1 + w[..., 1:2] * self.b2

    def norm(self, w):
        return self.parent.jet(self.lift(w))[0]

    def phi_jet(self, theta):
        """``phi, phi', phi''`` at ``theta`` in plane coordinates."""
        c, s = np.cos(theta), np.sin(theta)
        d = np.array([c, s])
        dp = np.array([-s, c])
        amb = c * self.b1 + s * self.b2
        amb_p = -s * self.b1 + c * self.b2
        F, g, H = self.parent.jet(amb)
        F1 = g @ amb_p
        F2 = amb_p @ H @ amb_p - F  # g . amb'' with amb'' = -amb, Euler
        r = 1.0 / F
        r1 = -F1 / F**2
        r2 = -F2 / F**2 + 2.0 * F1**2 / F**3
        phi = r * d
        phi1 = r1 * d + r * dp
        phi2 = r2 * d + 2.0 * r1 * dp - r * d
        return phi, phi1, phi2

    def phi(self, theta):
        return self.phi_jet(theta)[0]

    def radius(self, theta):
        c, s = np.cos(theta), np.sin(theta)
        return 1.0 / self.parent.jet(c * self.b1 + s * self.b2)[0]

    def curvature(self, theta):
        """Euclidean curvature of the counter-clockwise unit circle at ``theta``."""
        _, p1, p2 = self.phi_jet(theta)
        return (p1[0] * p2[1] - p1[1] * p2[0]) / np.hypot(*p1) ** 3

    def speed(self, theta):
        """Minkowski speed ``||phi'(theta)||`` of the angle parametrization."""
        return self.norm(self.phi_jet(theta)[1])

    def matching_angle(self, tangent):
        """Angle ``theta*`` where ``phi'`` points along ``tangent``.

        For a convex curve around the origin the angle between the radial
        direction and ``phi'`` stays in ``(0, pi)``, so the tangent angle
        ``theta + delta(theta)`` is monotone and the root is bracketed in
        ``[alpha - pi, alpha]``.
        """
        alpha = np.arctan2(tangent[1], tangent[0])

        def g(theta):
            _, p1, _ = self.phi_jet(theta)
            d = np.array([np.cos(theta), np.sin(theta)])
            delta = np.arctan2(d[0] * p1[1] - d[1] * p1[0], d @ p1)
            return theta + delta - alpha

        lo, hi = alpha - np.pi, alpha
        glo, ghi = g(lo), g(hi)
        if not (glo < 0.0 < ghi):
            raise OrientationAmbiguity("tangent angle of the unit circle is not monotone")
        # bisection to a tight bracket, then Brent for the last digits
        for _ in range(8):
            mid = 0.5 * (lo + hi)
            if g(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def restrict_norm(model, H):
    """Restriction of ``model`` to the plane through the origin spanned by ``H``."""
    b1, b2 = orthonormal_plane(*H)
    return PlaneNormModel(b1=b1, b2=b2, parent=model)


@dataclass
class PlaneCurveSample:
    points: np.ndarray
    base_index: int
    arclength: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.arclength is None:
            seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
            self.arclength = np.concatenate([[0.0], np.cumsum(seg)])
        else:
            self.arclength = np.asarray(self.arclength, dtype=float)
        if np.any(np.diff(self.arclength) <= 0.0):
            raise ValueError("arc-length values must be strictly increasing")


def _fit_window(curve, half_width):
    n = len(curve.points)
    i = curve.base_index
    lo, hi = max(0, i - half_width), min(n, i + half_width + 1)
    if hi - lo < 5 or i - lo < 1 or hi - i < 2:
        raise InsufficientSamples("need at least 5 points bracketing the base point")
    return curve.points[lo:hi], curve.points[i], curve.points[i - 1], curve.points[i + 1]


def local_quadratic_fit(curve, half_width=5):
    """Fit ``y = a + b x + c x^2`` in the tangent-normal frame at the base point.

    Returns ``(kappa, tangent)`` with ``kappa`` signed (positive when the
    curve turns left) and ``tangent`` the unit tangent in the traversal
    direction.
    """
    pts, p0, prev, nxt = _fit_window(curve, half_width)
    T = nxt - prev
    if not np.linalg.norm(T) > 0.0:
        raise CollinearSamples("neighbours of the base point coincide; no tangent")
    T /= np.linalg.norm(T)
    N = np.array([-T[1], T[0]])
    rel = pts - p0
    x = rel @ T
    y = rel @ N
    V = np.column_stack([np.ones_like(x), x, x * x])
    scale = np.max(np.abs(x))
    if scale == 0.0 or np.linalg.matrix_rank(V / [1.0, scale, scale * scale]) < 3:
        raise CollinearSamples("samples do not determine a curvature")
    coef, *_ = np.linalg.lstsq(V, y, rcond=None)
    _, b, c = coef
    kappa = 2.0 * c / (1.0 + b * b) ** 1.5
    tangent = T + b * N
    return kappa, tangent / np.linalg.norm(tangent)


def euclidean_curvature_at(curve, half_width=5):
    """Signed Euclidean curvature of a sampled plane curve at its base point."""
    return local_quadratic_fit(curve, half_width)[0]


def circular_curvature_ratio(plane_norm, curve, half_width=5):
    """Circular curvature as ``kappa(curve) / kappa(unit circle at theta*)``.

    ``theta*`` is where the counter-clockwise unit circle has the same
    tangent direction as the curve, so a counter-clockwise circle of
    Minkowski radius ``rho`` gives ``1/rho``.
    """
    kappa, T = local_quadratic_fit(curve, half_width)
    theta = plane_norm.matching_angle(T)
    kphi = plane_norm.curvature(theta)
    if not kphi > 0.0:
        raise OrientationAmbiguity("unit circle is not strictly convex at the matching point")
    return kappa / kphi


def circular_curvature_reparam(plane_norm, curve, h=1e-3):
    """Circular curvature as ``dt/ds``, the matching-tangent circle parameter.

    The polyline is interpolated by a cubic spline, stepped ``h`` in
    Minkowski arc length either side of the base point, and the matching
    angle ``theta*(s)`` differentiated by central differences; the chain
    rule ``dt/ds = ||phi'(theta*)|| dtheta*/ds`` converts the angle
    parametrization into Minkowski arc length of the unit circle.
    """
    pts = curve.points
    if len(pts) < 5:
        raise InsufficientSamples("need at least 5 points")
    sig = curve.arclength
    spline = CubicSpline(sig, pts, axis=0)
    dspline = spline.derivative()
    s0 = sig[curve.base_index]

    nodes, weights = np.polynomial.legendre.leggauss(8)

    def seg_len(a, b):
        # Gauss-Legendre on a piece where the spline is a single cubic
        t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        speeds = np.array([plane_norm.norm(d) for d in dspline(t)])
        return 0.5 * (b - a) * float(weights @ speeds)

    cum = np.concatenate([[0.0], np.cumsum([seg_len(a, b) for a, b in zip(sig[:-1], sig[1:])])])

    def mlen_to(t):
        i = min(max(int(np.searchsorted(sig, t, side="right")) - 1, 0), len(sig) - 2)
        return cum[i] + seg_len(sig[i], t)

    base = mlen_to(s0)

    def offset(target):
        # sigma with Minkowski length `target` from s0 (negative = backwards)
        goal = base + target
        if not cum[0] <= goal <= cum[-1]:
            raise InsufficientSamples("curve too short for the resampling step")
        lo, hi = (s0, sig[-1]) if target > 0 else (sig[0], s0)
        return brentq(lambda t: mlen_to(t) - goal, lo, hi, xtol=1e-15)

    sm, sp = offset(-h), offset(h)
    tm = plane_norm.matching_angle(dspline(sm))
    tp = plane_norm.matching_angle(dspline(sp))
    t0 = plane_norm.matching_angle(dspline(s0))
    dtheta = np.angle(np.exp(1j * (tp - tm)))
    mid = tm + 0.5 * dtheta
    if abs(np.angle(np.exp(1j * (mid - t0)))) > 0.5 * abs(dtheta) + 1e-6:
        raise InsufficientSamples("matching angle jumps between resampled points; step too large")
    return plane_norm.speed(t0) * dtheta / (2.0 * h)
