"""Smooth strictly convex norms on R^3 and the support map of their unit sphere.

A norm is represented through its Minkowski functional ``F`` (value, gradient
and Hessian).  The support map ``u`` sends a Euclidean unit vector ``v`` to
the point of the unit sphere ``F = 1`` whose outer Euclidean normal is ``v``;
its differential ``du`` restricted to ``v^perp`` is the Hessian of the
support function and is what the curvature formulas consume.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePlane,
    InadmissibleNorm,
    NoConvergence,
    NotUnit,
    SingularSystem,
    ZeroVector,
)

TINY = 1e-300
UNIT_TOL = 1e-8
NEWTON_TOL = 1e-10
NEWTON_MAXITER = 50


def _check_vector(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {x.shape}")
    if np.linalg.norm(x) < TINY:
        raise ZeroVector("vector is zero (|x| < 1e-300)")
    return x


def _quadratic_form_jet(x, M):
    """Jet of ``sqrt(x^T M x)`` for a symmetric positive definite ``M``."""
    Mx = M @ x
    F = np.sqrt(x @ Mx)
    g = Mx / F
    H = M / F - np.outer(g, g) / F
    return F, g, H


class NormModel:
    """A smooth, strictly convex norm on R^3.

    Subclasses implement :meth:`jet`.  Those with a closed-form support
    function also implement :meth:`dual_jet`, which short-circuits the Newton
    solve in :func:`support_point`.
    """

    family = "abstract"
    has_dual = False

    def jet(self, x):
        raise NotImplementedError

    def dual_jet(self, v):
        raise NotImplementedError

    def __call__(self, x):
        return self.jet(x)[0]

    def params(self):
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class EuclideanNorm(NormModel):
    family = "euclidean"
    has_dual = True

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        F = np.linalg.norm(x)
        g = x / F
        H = (np.eye(3) - np.outer(g, g)) / F
        return F, g, H

    dual_jet = jet


class EllipsoidNorm(NormModel):
    """``F(x) = |A x|`` for an invertible matrix ``A``.

    The unit sphere is the ellipsoid ``A^{-1}(S^2)``; the support function is
    ``|A^{-T} v|``.
    """

    family = "ellipsoid"
    has_dual = True

    def __init__(self, A):
        A = np.array(A, dtype=float)
        if A.shape != (3, 3):
            raise ValueError("A must be 3x3")
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("A must be invertible")
        self.A = A
        self._M = A.T @ A
        Ainv_T = np.linalg.inv(A).T
        self._Mdual = Ainv_T.T @ Ainv_T

    def jet(self, x):
        return _quadratic_form_jet(np.asarray(x, dtype=float), self._M)

    def dual_jet(self, v):
        return _quadratic_form_jet(np.asarray(v, dtype=float), self._Mdual)

    def params(self):
        return {"A": self.A.tolist()}


class QuarticNorm(NormModel):
    """``F(x) = (|x|^4 + eps * (x1^4 + x2^4 + x3^4))^(1/4)``, ``eps >= 0``.

    ``eps = 0`` is the Euclidean norm.  Every ``eps >= 0`` gives a norm
    (the l4-sum of the Euclidean and the l4 norm); how far it is from
    losing admissibility is measured by :func:`check_admissible`.
    """

    family = "quartic"

    def __init__(self, eps):
        eps = float(eps)
        if not eps >= 0.0:
            raise ValueError("eps must be >= 0")
        self.eps = eps

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        eps = self.eps
        r2 = x @ x
        x2 = x * x
        G = r2 * r2 + eps * (x2 @ x2)
        dG = 4.0 * r2 * x + 4.0 * eps * x2 * x
        HG = 4.0 * r2 * np.eye(3) + 8.0 * np.outer(x, x) + 12.0 * eps * np.diag(x2)
        F = G ** 0.25
        G34 = F * F * F
        g = dG / (4.0 * G34)
        H = HG / (4.0 * G34) - 3.0 * np.outer(dG, dG) / (16.0 * G34 * G)
        return F, g, H

    def params(self):
        return {"eps": self.eps}


def norm_jet(model, x):
    """Return ``(F, grad F, Hess F)`` at a nonzero vector ``x``."""
    x = _check_vector(x)
    return model.jet(x)


def is_birkhoff_orthogonal(model, v, H, tol=1e-9):
    """Whether ``v`` is Birkhoff orthogonal to the plane spanned by ``H``.

    The unit ball is supported at ``v/F(v)`` by a plane parallel to ``H``
    exactly when the gradient of ``F`` there is Euclidean-orthogonal to
    both spanning vectors.
    """
    v = _check_vector(v)
    a, b = (np.asarray(w, dtype=float) for w in H)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < TINY or nb < TINY or np.linalg.norm(np.cross(a, b)) <= 1e-12 * na * nb:
        raise DegeneratePlane("spanning vectors are parallel")
    F, _, _ = model.jet(v)
    _, g, _ = model.jet(v / F)
    ng = np.linalg.norm(g)
    return bool(abs(g @ a) / (ng * na) <= tol and abs(g @ b) / (ng * nb) <= tol)


def tangent_basis(v):
    """Deterministic orthonormal basis ``(b1, b2)`` of ``v^perp``.

    ``b1`` comes from the coordinate axis least aligned with ``v`` and
    ``b2 = v x b1``, so ``(b1, b2, v)`` is positively oriented.
    """
    v = np.asarray(v, dtype=float)
    k = int(np.argmin(np.abs(v)))
    e = np.zeros(3)
    e[k] = 1.0
    b1 = e - (e @ v) * v
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(v, b1)
    return b1, b2


@dataclass
class SupportMapResult:
    v: np.ndarray
    u: np.ndarray
    mu: float
    basis: tuple
    du: np.ndarray | None = None
    iterations: int = 0
    residual: float = 0.0

    @property
    def du_inv(self):
        return np.linalg.inv(self.du)


def _newton_support(model, v, maxiter=NEWTON_MAXITER, tol=NEWTON_TOL):
    F0, _, _ = model.jet(v)
    x = v / F0
    mu = model.jet(x)[1] @ v

    def residual(x, mu):
        F, g, _ = model.jet(x)
        return np.concatenate([g - mu * v, [F - 1.0]])

    r = residual(x, mu)
    rn = np.linalg.norm(r)
    it = 0
    polished = False
    while it < maxiter:
        if rn <= tol:
            if polished:
                break
            polished = True
        it += 1
        _, g, H = model.jet(x)
        J = np.zeros((4, 4))
        J[:3, :3] = H
        J[:3, 3] = -v
        J[3, :3] = g
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Newton matrix at v={v}", v=v) from exc
        # Armijo backtracking on the residual norm
        t = 1.0
        while True:
            xn = x + t * step[:3]
            mun = mu + t * step[3]
            if np.linalg.norm(xn) > TINY:
                rnew = residual(xn, mun)
                rnn = np.linalg.norm(rnew)
                if rnn <= (1.0 - 1e-4 * t) * rn or (polished and rnn <= rn):
                    break
            t *= 0.5
            if t < 1e-10:
                break
        if t < 1e-10:
            if rn <= tol:
                break
            raise NoConvergence(f"line search failed at v={v} (residual {rn:.3e})", v=v)
        x, mu, r, rn = xn, mun, rnew, rnn
    if rn > tol:
        raise NoConvergence(
            f"Newton did not converge at v={v} after {it} iterations (residual {rn:.3e})",
            v=v,
        )
    return x, mu, it, rn


def support_point(model, v):
    """Point ``u`` of the unit sphere whose outer Euclidean normal is ``v``.

    Uses the gradient of the support function when the model has one,
    otherwise damped Newton on ``grad F(x) = mu v, F(x) = 1`` started at
    ``v / F(v)``.  The branch with ``<u, v> > 0`` is returned.
    """
    v = _check_vector(v)
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise NotUnit(f"|v| = {np.linalg.norm(v)!r} is not 1")
    basis = tangent_basis(v)
    if model.has_dual:
        _, u, _ = model.dual_jet(v)
        mu = float(model.jet(u)[1] @ v)
        return SupportMapResult(v=v, u=u, mu=mu, basis=basis)
    u, mu, it, rn = _newton_support(model, v)
    return SupportMapResult(v=v, u=u, mu=float(mu), basis=basis, iterations=it, residual=rn)


def support_differential(model, v, res=None):
    """:func:`support_point` with ``du`` filled in.

    ``du[i, j] = <b_i, du(b_j)>`` on the basis of :func:`tangent_basis`.
    Without a dual it comes from implicit differentiation of the support
    system, one bordered 4x4 solve per tangent direction.
    """
    if res is None:
        res = support_point(model, v)
    v = res.v
    b = np.array(res.basis)
    if model.has_dual:
        _, _, Hs = model.dual_jet(v)
        du = b @ Hs @ b.T
    else:
        _, g, H = model.jet(res.u)
        J = np.zeros((4, 4))
        J[:3, :3] = H
        J[:3, 3] = -v
        J[3, :3] = g
        if np.linalg.cond(J) > 1e13:
            raise SingularSystem(f"implicit-function system is singular at v={v}", v=v)
        rhs = np.zeros((4, 2))
        rhs[:3, :] = res.mu * b.T
        dx = np.linalg.solve(J, rhs)[:3, :]
        du = b @ dx
    res.du = du
    return res


def fibonacci_sphere(n):
    """``n`` quasi-uniform unit vectors (golden-angle spiral)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


@dataclass
class AdmissibilityReport:
    min_eigen_du: float
    max_eigen_du: float
    scale: float
    worst_v: np.ndarray
    n_samples: int
    tol: float
    passed: bool

    def as_dict(self):
        return {
            "min_eigen_du": self.min_eigen_du,
            "max_eigen_du": self.max_eigen_du,
            "scale": self.scale,
            "worst_v": [float(c) for c in self.worst_v],
            "n_samples": self.n_samples,
            "tol": self.tol,
            "pass": self.passed,
        }


def admissibility_samples(n_samples):
    """Fibonacci points plus the six coordinate axes.

    The axes are where coordinate-symmetric families such as the quartic
    norm flatten first, so they are always included.
    """
    axes = np.vstack([np.eye(3), -np.eye(3)])
    return np.vstack([axes, fibonacci_sphere(n_samples)])


def check_admissible(model, n_samples=256, tol=1e-2):
    """Sample ``du`` over the sphere and decide numerical admissibility.

    Admissible means the unit sphere has positive Euclidean Gaussian
    curvature everywhere, i.e. ``du`` (the radii of curvature) finite and
    positive definite.  The verdict is scale free: eigenvalues are divided
    by the circumradius ``max |u|`` of the unit sphere and must all lie in
    ``(tol, 1/tol)``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    lo, hi, R = np.inf, -np.inf, 0.0
    spectra = []
    for v in admissibility_samples(n_samples):
        v = v / np.linalg.norm(v)
        try:
            res = support_differential(model, v)
        except NoConvergence as exc:
            raise NoConvergence(f"{exc} (sample v={v.tolist()})", v=v) from exc
        except SingularSystem as exc:
            raise SingularSystem(f"{exc} (sample v={v.tolist()})", v=v) from exc
        w = np.linalg.eigvalsh(0.5 * (res.du + res.du.T))
        spectra.append((v, w))
        lo = min(lo, w[0])
        hi = max(hi, w[-1])
        R = max(R, float(np.linalg.norm(res.u)))
    worst, worst_score = None, np.inf
    for v, w in spectra:
        score = min(w[0] / R, R / w[-1]) if w[0] > 0 else w[0]
        if score < worst_score:
            worst_score, worst = score, v
    passed = bool(lo / R > tol and hi / R < 1.0 / tol)
    return AdmissibilityReport(
        min_eigen_du=float(lo),
        max_eigen_du=float(hi),
        scale=R,
        worst_v=worst,
        n_samples=n_samples,
        tol=tol,
        passed=passed,
    )


def require_admissible(model, n_samples=256, tol=1e-2):
    rep = check_admissible(model, n_samples, tol)
    if not rep.passed:
        raise InadmissibleNorm(
            f"{model!r} failed the admissibility check: du spectrum "
            f"[{rep.min_eigen_du:.4g}, {rep.max_eigen_du:.4g}] relative to scale "
            f"{rep.scale:.4g} leaves ({tol:g}, {1 / tol:g}); worst v = {np.round(rep.worst_v, 6).tolist()}",
            report=rep,
        )
    return rep


def make_norm(family, **params):
    family = family.lower()
    if family == "euclidean":
        return EuclideanNorm()
    if family == "ellipsoid":
        return EllipsoidNorm(params.get("A", np.eye(3)))
    if family == "quartic":
        return QuarticNorm(params.get("eps", 0.0))
    raise ValueError(f"unknown norm family {family!r}")
