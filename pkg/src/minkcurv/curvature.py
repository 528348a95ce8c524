"""Birkhoff-Gauss map and Minkowski curvatures of immersed surfaces.

The Birkhoff normal is ``eta = u(xi)``, the support point of the unit ball
for the Euclidean normal ``xi``.  Its differential ``d_eta`` maps the tangent
plane to itself; eigenvalues are the principal curvatures.  ``d_eta`` is
obtained by central differences of ``q -> u(xi(q))`` and checked against the
chain rule ``d_eta = du . d_xi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import jet as chart_jet
from .errors import (
    AsymptoticInput,
    DefectiveDifferential,
    NearTangentNormal,
    StepUnderflow,
)
from .norms import support_differential, support_point

UMBILIC_TOL = 1e-6
FD_REL_STEP = 1e-4
DISC_CLAMP = 1e-12
RANK_TOL = 1e-8


class _AllDirections:
    """Marker returned when every tangent direction is asymptotic (``h = 0``)."""

    def __repr__(self):
        return "ALL_DIRECTIONS"

    def __bool__(self):
        return True


ALL_DIRECTIONS = _AllDirections()


@dataclass
class CurvatureReport:
    q: np.ndarray
    p: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    frame: np.ndarray  # 3x2, columns f_u, f_v
    basis: np.ndarray  # 2x3, rows b1, b2 spanning xi^perp
    du: np.ndarray  # 2x2 in basis
    d_eta: np.ndarray  # 2x2 in chart coords; column i = coords of D_i eta
    d_xi: np.ndarray
    h_mat: np.ndarray
    lambda1: float
    lambda2: float
    E1: np.ndarray  # chart coords
    E2: np.ndarray
    K: float
    H_mean: float
    K_e: float
    tau_residual: float
    selfadj_residual: float
    chain_residual: float
    h_residual: float
    rank_h: int
    h_definite: bool
    umbilic: bool

    @property
    def eta_dot_xi(self):
        return float(self.eta @ self.xi)

    @property
    def E1_ambient(self):
        return self.frame @ self.E1

    @property
    def E2_ambient(self):
        return self.frame @ self.E2

    @property
    def to_basis(self):
        """2x2 matrix taking chart coordinates to coordinates in ``basis``."""
        return self.basis @ self.frame

    def operator(self, which="eta"):
        """``d_eta`` (or ``d_xi``) as a matrix on the orthonormal basis of xi^perp."""
        P = self.to_basis
        M = self.d_eta if which == "eta" else self.d_xi
        return P @ M @ np.linalg.inv(P)

    def chart_coords(self, X):
        """Chart coordinates of a tangent vector given in chart or ambient form."""
        X = np.asarray(X, dtype=float)
        if X.shape == (2,):
            return X
        G = self.frame.T @ self.frame
        return np.linalg.solve(G, self.frame.T @ X)


def birkhoff_normal(norm, jet):
    """Birkhoff normal ``eta = u(xi)`` at a surface jet; ``F(eta) = 1``."""
    return support_point(norm, jet.xi).u


def decompose(w, a, b, c):
    """Coefficients of ``w`` in the (not necessarily orthogonal) basis a, b, c."""
    return np.linalg.solve(np.column_stack([a, b, c]), w)


def tangent_coords(frame, w):
    """Coordinates ``(a, b)`` of a tangent vector ``w = a f_u + b f_v``."""
    G = frame.T @ frame
    return np.linalg.solve(G, frame.T @ w)


def eig2(M):
    """Real eigen-decomposition of a 2x2 matrix, ``l1 >= l2``.

    Returns ``(l1, l2, v1, v2, disc)``; ``v1, v2`` are ``None`` when the
    matrix is (numerically) a multiple of the identity.
    """
    a, b = M[0]
    c, d = M[1]
    half_tr = 0.5 * (a + d)
    det = a * d - b * c
    disc = half_tr * half_tr - det
    if disc < 0.0:
        scale = max(1.0, half_tr * half_tr, abs(det))
        if disc < -DISC_CLAMP * scale:
            raise DefectiveDifferential(
                f"complex principal curvatures (discriminant {disc:.3e})"
            )
        disc = 0.0
    root = np.sqrt(disc)
    l1, l2 = half_tr + root, half_tr - root

    def vec(lam):
        r1 = np.array([b, lam - a])
        r2 = np.array([lam - d, c])
        v = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
        n = np.linalg.norm(v)
        return v / n if n > 0 else None

    return l1, l2, vec(l1), vec(l2), disc


def _canonical(v):
    # deterministic sign: largest chart component positive
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v


def curvature_report(norm, chart, q, h_fd=None, umbilic_tol=UMBILIC_TOL, method="fd"):
    """Full pointwise curvature data of ``chart`` at ``q`` under ``norm``.

    ``method="fd"`` differentiates ``eta`` numerically (step ``h_fd``,
    default ``1e-4`` times the domain diagonal); ``method="chain"`` uses
    ``du . d_xi`` with the analytic Weingarten map instead, which is smooth
    to rounding error and is what the flow-line integrators use.
    """
    J = chart_jet(chart, q)
    q = J.q
    sp = support_differential(norm, J.xi)
    eta, du = sp.u, sp.du
    B = np.array(sp.basis)
    frame = J.frame
    c_eta_xi = float(eta @ J.xi)
    if c_eta_xi < 1e-12:
        raise NearTangentNormal(f"<eta, xi> = {c_eta_xi:.3e} at q={q.tolist()}")

    # analytic Weingarten map: D_i xi = sum_k W[k, i] f_k
    I1 = frame.T @ frame
    II = np.array([[J.f_uu @ J.xi, J.f_uv @ J.xi], [J.f_uv @ J.xi, J.f_vv @ J.xi]])
    W = -np.linalg.solve(I1, II)
    P = B @ frame
    Pinv = np.linalg.inv(P)
    Mxi = P @ W @ Pinv
    d_eta_chain = Pinv @ (du @ Mxi) @ P

    if method == "fd":
        h = FD_REL_STEP * chart.diagonal if h_fd is None else float(h_fd)
        if not h > 1e-12 * max(1.0, float(np.max(np.abs(q)))):
            raise StepUnderflow(f"finite-difference step {h!r} too small")
        d_eta = np.zeros((2, 2))
        d_xi = np.zeros((2, 2))
        tau = 0.0
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            etas, xis = [], []
            for sgn in (1.0, -1.0):
                f, fu, fv, *_ = chart.evaluate(q + sgn * e)
                n = np.cross(fu, fv)
                n /= np.linalg.norm(n)
                xis.append(n)
                etas.append(support_point(norm, n).u)
            D_eta = (etas[0] - etas[1]) / (2.0 * h)
            D_xi = (xis[0] - xis[1]) / (2.0 * h)
            a, b, c = decompose(D_eta, J.f_u, J.f_v, eta)
            d_eta[:, i] = (a, b)
            tau = max(tau, abs(c) * np.linalg.norm(eta) / np.linalg.norm(frame[:, i]))
            d_xi[:, i] = decompose(D_xi, J.f_u, J.f_v, J.xi)[:2]
    elif method == "chain":
        d_eta = d_eta_chain
        d_xi = W
        tau = 0.0
    else:
        raise ValueError(f"unknown method {method!r}")

    Meta = P @ d_eta @ Pinv
    chain_residual = float(np.max(np.abs(Meta - du @ Mxi)))

    # affine fundamental form, Gauss-formula form and the xi-derivative form
    h_mat = II / c_eta_xi
    h_eq = -(frame.T @ (frame @ d_xi)).T / c_eta_xi
    h_residual = float(np.max(np.abs(h_mat - h_eq)))

    hD = h_mat @ d_eta
    denom = np.linalg.norm(h_mat) * np.linalg.norm(d_eta)
    selfadj = float(np.max(np.abs(hD - hD.T)) / denom) if denom > 0 else 0.0

    # rank and definiteness in the orthonormal frame
    h_ortho = Pinv.T @ h_mat @ Pinv
    mu = np.linalg.eigvalsh(0.5 * (h_ortho + h_ortho.T))
    thresh = max(RANK_TOL * np.max(np.abs(mu)), 1e-14)
    rank_h = int(np.sum(np.abs(mu) > thresh))
    h_definite = bool(rank_h == 2 and mu[0] * mu[1] > 0)

    l1, l2, v1, v2, _ = eig2(Meta)
    umbilic = bool(abs(l1 - l2) <= umbilic_tol * max(1.0, abs(l1) + abs(l2)))
    if umbilic or v1 is None or v2 is None:
        E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    else:
        E1, E2 = Pinv @ v1, Pinv @ v2
    E1 = _canonical(E1 / np.linalg.norm(frame @ E1))
    E2 = _canonical(E2 / np.linalg.norm(frame @ E2))

    return CurvatureReport(
        q=q,
        p=J.p,
        xi=J.xi,
        eta=eta,
        frame=frame,
        basis=B,
        du=du,
        d_eta=d_eta,
        d_xi=d_xi,
        h_mat=h_mat,
        lambda1=float(l1),
        lambda2=float(l2),
        E1=E1,
        E2=E2,
        K=float(l1 * l2),
        H_mean=float(0.5 * (l1 + l2)),
        K_e=float(np.linalg.det(W)),
        tau_residual=float(tau),
        selfadj_residual=selfadj,
        chain_residual=chain_residual,
        h_residual=h_residual,
        rank_h=rank_h,
        h_definite=h_definite,
        umbilic=umbilic,
    )


def shape_differential(norm, chart, q, h_fd=None):
    """``(d_eta, d_xi, tau_residual)`` at ``q`` in chart coordinates."""
    rep = curvature_report(norm, chart, q, h_fd=h_fd)
    return rep.d_eta, rep.d_xi, rep.tau_residual


def fundamental_form(norm, chart, q):
    """Matrix of the affine fundamental form ``h`` in chart coordinates."""
    return curvature_report(norm, chart, q).h_mat


def principal_curvatures(norm, chart, q, **kw):
    return curvature_report(norm, chart, q, **kw)


def normal_curvature_from_report(rep, X):
    """Minkowski normal curvature ``<du^-1 X, d_eta X> / <du^-1 X, X>``."""
    Xc = rep.chart_coords(X)
    Xb = rep.to_basis @ Xc
    if not np.linalg.norm(Xb) > 0:
        raise ValueError("direction must be nonzero")
    dX = rep.to_basis @ (rep.d_eta @ Xc)
    y = np.linalg.solve(rep.du, Xb)
    return float((y @ dX) / (y @ Xb))


def normal_curvature(norm, chart, q, X, **kw):
    return normal_curvature_from_report(curvature_report(norm, chart, q, **kw), X)


def normal_profile(rep, n_directions=64):
    """Normal curvature along ``n_directions`` Euclidean-equispaced tangent directions.

    Returns ``(angles, directions, k)``; directions are ambient unit vectors
    ``cos t b1 + sin t b2`` in the orthonormal basis of the tangent plane.
    """
    t = 2.0 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.cos(t)[:, None] * rep.basis[0] + np.sin(t)[:, None] * rep.basis[1]
    k = np.array([normal_curvature_from_report(rep, d) for d in dirs])
    return t, dirs, k


def _minkowski_unit(norm, frame, X):
    return X / norm.jet(frame @ X)[0]


def asymptotic_directions_from_form(h_mat, tol=RANK_TOL):
    """Solutions of ``h(X, X) = 0`` for a symmetric 2x2 form.

    Two directions when ``h`` is indefinite, one when it has rank one,
    none when definite and :data:`ALL_DIRECTIONS` when ``h = 0``.
    Directions are Euclidean-unit in the given coordinates.
    """
    h = 0.5 * (np.asarray(h_mat, dtype=float) + np.asarray(h_mat, dtype=float).T)
    mu, Q = np.linalg.eigh(h)
    top = np.max(np.abs(mu))
    if top <= 1e-14:
        return ALL_DIRECTIONS
    small = np.abs(mu) <= tol * top
    if small.any():
        return [_canonical(Q[:, int(np.argmin(np.abs(mu)))])]
    if mu[0] * mu[1] > 0:
        return []
    # mu0 s^2 + mu1 t^2 = 0
    ratio = np.sqrt(-mu[0] / mu[1])
    out = []
    for sgn in (1.0, -1.0):
        v = Q @ np.array([1.0, sgn * ratio])
        out.append(v / np.linalg.norm(v))
    return out


def asymptotic_directions(norm, chart, q, rep=None):
    """Asymptotic directions at ``q`` in chart coordinates, Minkowski-unit."""
    rep = curvature_report(norm, chart, q) if rep is None else rep
    dirs = asymptotic_directions_from_form(rep.h_mat)
    if dirs is ALL_DIRECTIONS:
        return dirs
    return [_minkowski_unit(norm, rep.frame, d) for d in dirs]


def conjugate_from_form(h_mat, X, tol=1e-10):
    """Direction ``Y`` with ``h(X, Y) = 0`` (kernel of ``h(X, .)``)."""
    h = np.asarray(h_mat, dtype=float)
    X = np.asarray(X, dtype=float)
    hX = h @ X
    scale = np.linalg.norm(h) * (X @ X)
    if scale == 0.0 or np.linalg.norm(hX) <= tol * np.linalg.norm(h) * np.linalg.norm(X):
        raise AsymptoticInput("h(X, .) vanishes; every direction is conjugate to X")
    if abs(X @ hX) <= tol * scale:
        raise AsymptoticInput("X is asymptotic, its conjugate direction is X itself")
    Y = np.array([-hX[1], hX[0]])
    return _canonical(Y / np.linalg.norm(Y))


def conjugate_direction(norm, chart, q, X, rep=None, h_fd=None):
    """Conjugate direction ``Y`` of ``X`` and the residual ``<D_X Y, xi>``.

    The residual differentiates the constant-coefficient field
    ``Y1 f_u + Y2 f_v`` numerically along ``X``; it vanishes for conjugate
    pairs.  Returns ``(Y, residual)`` with ``Y`` Minkowski-unit.
    """
    rep = curvature_report(norm, chart, q) if rep is None else rep
    Xc = rep.chart_coords(X)
    Y = _minkowski_unit(norm, rep.frame, conjugate_from_form(rep.h_mat, Xc))
    h = FD_REL_STEP * chart.diagonal if h_fd is None else h_fd
    Xn = Xc / np.linalg.norm(Xc)
    fp = chart.evaluate(rep.q + h * Xn)
    fm = chart.evaluate(rep.q - h * Xn)
    Yp = Y[0] * fp[1] + Y[1] * fp[2]
    Ym = Y[0] * fm[1] + Y[1] * fm[2]
    DXY = (Yp - Ym) / (2.0 * h)
    scale = np.linalg.norm(rep.frame @ Y) * np.linalg.norm(rep.frame @ Xn)
    return Y, float(abs(DXY @ rep.xi) / scale)


@dataclass
class SignReport:
    K_pos: bool | None
    Ke_pos: bool | None
    h_definite: bool | None
    indeterminate: bool

    @property
    def consistent(self):
        if self.indeterminate:
            return None
        return self.K_pos == self.Ke_pos == self.h_definite


def sign_equivalences(norm, chart, q, sign_tol=1e-6, rep=None):
    """``K > 0``, ``K_e > 0`` and definiteness of ``h`` at ``q``.

    Points where ``|K|`` or ``|K_e|`` is below ``sign_tol`` are reported
    indeterminate; the three flags are still filled in.
    """
    rep = curvature_report(norm, chart, q) if rep is None else rep
    indeterminate = abs(rep.K) < sign_tol or abs(rep.K_e) < sign_tol
    return SignReport(
        K_pos=bool(rep.K > 0),
        Ke_pos=bool(rep.K_e > 0),
        h_definite=rep.h_definite,
        indeterminate=bool(indeterminate),
    )
