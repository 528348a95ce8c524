"""Parametric surface charts with analytic two-jets.

Every chart maps a rectangle of ``(u, v)`` coordinates into R^3 and returns
the point together with its first and second partial derivatives.  The
Euclidean unit normal follows chart order, ``f_u x f_v``; all closed
built-in families are oriented outward.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChart, OutOfDomain

POLE_MARGIN = 0.05
TWO_PI = 2.0 * np.pi

# cyclic permutations taking the z axis to the requested pole axis
_POLE_AXES = {
    "z": np.eye(3),
    "x": np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
    "y": np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
}


@dataclass
class SurfaceJet:
    q: np.ndarray
    p: np.ndarray
    f_u: np.ndarray
    f_v: np.ndarray
    f_uu: np.ndarray
    f_uv: np.ndarray
    f_vv: np.ndarray
    xi: np.ndarray

    @property
    def frame(self):
        """3x2 matrix whose columns are ``f_u`` and ``f_v``."""
        return np.column_stack([self.f_u, self.f_v])

    def second(self, i, j):
        return (self.f_uu, self.f_uv, self.f_vv)[i + j]


class SurfaceChart:
    """Base class; subclasses implement :meth:`evaluate`.

    ``domain`` is ``((u_min, u_max), (v_min, v_max))``; ``periodic`` flags
    coordinates that wrap with period ``u_max - u_min``.
    """

    family = "abstract"
    closed = False
    domain = ((0.0, 1.0), (0.0, 1.0))
    periodic = (False, False)

    def evaluate(self, q):
        """Return ``(f, f_u, f_v, f_uu, f_uv, f_vv)`` at ``q``."""
        raise NotImplementedError

    def params(self):
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    @property
    def diagonal(self):
        (a, b), (c, d) = self.domain
        return float(np.hypot(b - a, d - c))

    def wrap(self, q):
        """Reduce periodic coordinates into the domain; raise if outside."""
        q = np.array(q, dtype=float)
        for k in range(2):
            lo, hi = self.domain[k]
            if self.periodic[k]:
                q[k] = lo + np.mod(q[k] - lo, hi - lo)
            elif not (lo - 1e-12 <= q[k] <= hi + 1e-12):
                raise OutOfDomain(f"coordinate {k} = {q[k]!r} outside [{lo}, {hi}]")
        return q

    def contains(self, q):
        try:
            self.wrap(q)
        except OutOfDomain:
            return False
        return True

    def point(self, q):
        return self.evaluate(np.asarray(q, dtype=float))[0]

    def grid(self, nx, ny):
        """Row-major grid of chart coordinates (periodic ends not duplicated)."""
        axes = []
        for k, n in enumerate((nx, ny)):
            lo, hi = self.domain[k]
            if self.periodic[k]:
                axes.append(lo + (hi - lo) * np.arange(n) / n)
            else:
                axes.append(np.linspace(lo, hi, n))
        return [np.array([a, b]) for a in axes[0] for b in axes[1]]

    def atlas(self):
        """Charts that together cover the surface (closed families)."""
        return [self]


def jet(chart, q):
    """Two-jet of ``chart`` at ``q`` with the Euclidean unit normal."""
    q = chart.wrap(q)
    f, fu, fv, fuu, fuv, fvv = chart.evaluate(q)
    n = np.cross(fu, fv)
    nn = np.linalg.norm(n)
    if nn <= 1e-12 * max(np.linalg.norm(fu) * np.linalg.norm(fv), 1e-300):
        raise DegenerateChart(f"f_u x f_v vanishes at q={q.tolist()}")
    return SurfaceJet(q=q, p=f, f_u=fu, f_v=fv, f_uu=fuu, f_uv=fuv, f_vv=fvv, xi=n / nn)


def _spherical(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    d = np.array([st * cp, st * sp, ct])
    d_t = np.array([ct * cp, ct * sp, -st])
    d_p = np.array([-st * sp, st * cp, 0.0])
    d_tt = -d
    d_tp = np.array([-ct * sp, ct * cp, 0.0])
    d_pp = np.array([-st * cp, -st * sp, 0.0])
    return d, d_t, d_p, d_tt, d_tp, d_pp


class _PolarChart(SurfaceChart):
    """Charts in spherical angles ``(theta, phi)`` around a chosen pole axis."""

    closed = True
    periodic = (False, True)

    def __init__(self, pole="z"):
        if pole not in _POLE_AXES:
            raise ValueError(f"pole must be one of {sorted(_POLE_AXES)}")
        self.pole = pole
        self._P = _POLE_AXES[pole]
        self.domain = ((POLE_MARGIN, np.pi - POLE_MARGIN), (0.0, TWO_PI))

    def _direction_jet(self, q):
        return tuple(self._P @ w for w in _spherical(q[0], q[1]))

    def with_pole(self, pole):
        raise NotImplementedError

    def atlas(self):
        # the x-pole chart covers both z-pole caps that the z chart cuts out
        other = "x" if self.pole == "z" else "z"
        return [self, self.with_pole(other)]


class EuclideanSphere(_PolarChart):
    family = "euclidean_sphere"

    def __init__(self, r=1.0, center=(0.0, 0.0, 0.0), pole="z"):
        super().__init__(pole)
        if not r > 0:
            raise ValueError("r must be positive")
        self.r = float(r)
        self.center = np.asarray(center, dtype=float)

    def evaluate(self, q):
        d, *rest = self._direction_jet(q)
        return (self.center + self.r * d, *(self.r * w for w in rest))

    def with_pole(self, pole):
        return EuclideanSphere(self.r, self.center, pole)

    def params(self):
        return {"r": self.r, "center": self.center.tolist(), "pole": self.pole}


class Ellipsoid(_PolarChart):
    """Ellipsoid with semi-axes ``(a, b, c)`` along the coordinate axes."""

    family = "ellipsoid"

    def __init__(self, a=1.0, b=1.0, c=1.0, center=(0.0, 0.0, 0.0), pole="z"):
        super().__init__(pole)
        if min(a, b, c) <= 0:
            raise ValueError("semi-axes must be positive")
        self.axes = np.array([a, b, c], dtype=float)
        self.center = np.asarray(center, dtype=float)

    def evaluate(self, q):
        d, *rest = self._direction_jet(q)
        return (self.center + self.axes * d, *(self.axes * w for w in rest))

    def with_pole(self, pole):
        return Ellipsoid(*self.axes, center=self.center, pole=pole)

    def params(self):
        a, b, c = self.axes.tolist()
        return {"a": a, "b": b, "c": c, "center": self.center.tolist(), "pole": self.pole}


class MinkowskiSphere(_PolarChart):
    """``center + rho * d / F(d)`` for the spherical direction ``d``."""

    family = "minkowski_sphere"

    def __init__(self, norm, rho=1.0, center=(0.0, 0.0, 0.0), pole="z"):
        super().__init__(pole)
        if not rho > 0:
            raise ValueError("rho must be positive")
        self.norm = norm
        self.rho = float(rho)
        self.center = np.asarray(center, dtype=float)

    def evaluate(self, q):
        d, d_t, d_p, d_tt, d_tp, d_pp = self._direction_jet(q)
        F, g, H = self.norm.jet(d)
        Ft, Fp = g @ d_t, g @ d_p
        Ftt = d_t @ H @ d_t + g @ d_tt
        Ftp = d_t @ H @ d_p + g @ d_tp
        Fpp = d_p @ H @ d_p + g @ d_pp
        s = d / F
        s_t = d_t / F - d * Ft / F**2
        s_p = d_p / F - d * Fp / F**2

        def second(dab, da, db, Fa, Fb, Fab):
            return dab / F - (da * Fb + db * Fa) / F**2 - d * Fab / F**2 + 2.0 * d * Fa * Fb / F**3

        s_tt = second(d_tt, d_t, d_t, Ft, Ft, Ftt)
        s_tp = second(d_tp, d_t, d_p, Ft, Fp, Ftp)
        s_pp = second(d_pp, d_p, d_p, Fp, Fp, Fpp)
        r = self.rho
        return self.center + r * s, r * s_t, r * s_p, r * s_tt, r * s_tp, r * s_pp

    def with_pole(self, pole):
        return MinkowskiSphere(self.norm, self.rho, self.center, pole)

    def params(self):
        return {"rho": self.rho, "center": self.center.tolist(), "pole": self.pole}


def minkowski_sphere_chart(norm, rho, center=(0.0, 0.0, 0.0)):
    return MinkowskiSphere(norm, rho, center)


class Torus(SurfaceChart):
    """Torus around the z axis; ``u`` is the azimuth, ``v`` the tube angle.

    ``v = 0`` is the outer equator.  With this order ``f_u x f_v`` points
    outward.
    """

    family = "torus"
    closed = True
    periodic = (True, True)
    domain = ((0.0, TWO_PI), (-np.pi, np.pi))

    def __init__(self, R=2.0, r=0.5, center=(0.0, 0.0, 0.0)):
        if not (R > r > 0):
            raise ValueError("need R > r > 0")
        self.R, self.r = float(R), float(r)
        self.center = np.asarray(center, dtype=float)

    def evaluate(self, q):
        u, v = q
        R, r = self.R, self.r
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        w = R + r * cv
        f = self.center + np.array([w * cu, w * su, r * sv])
        f_u = np.array([-w * su, w * cu, 0.0])
        f_v = np.array([-r * sv * cu, -r * sv * su, r * cv])
        f_uu = np.array([-w * cu, -w * su, 0.0])
        f_uv = np.array([r * sv * su, -r * sv * cu, 0.0])
        f_vv = np.array([-r * cv * cu, -r * cv * su, -r * sv])
        return f, f_u, f_v, f_uu, f_uv, f_vv

    def params(self):
        return {"R": self.R, "r": self.r, "center": self.center.tolist()}


class Cylinder(SurfaceChart):
    """Circular cylinder of radius ``r`` around the z axis, outward normal."""

    family = "cylinder"
    periodic = (True, False)

    def __init__(self, r=1.0, height=(-1.0, 1.0)):
        if not r > 0:
            raise ValueError("r must be positive")
        self.r = float(r)
        self.domain = ((0.0, TWO_PI), tuple(float(h) for h in height))

    def evaluate(self, q):
        u, v = q
        r = self.r
        cu, su = np.cos(u), np.sin(u)
        z = np.zeros(3)
        return (
            np.array([r * cu, r * su, v]),
            np.array([-r * su, r * cu, 0.0]),
            np.array([0.0, 0.0, 1.0]),
            np.array([-r * cu, -r * su, 0.0]),
            z,
            z.copy(),
        )

    def params(self):
        return {"r": self.r, "height": list(self.domain[1])}


class Graph(SurfaceChart):
    """Graph ``z = g(x, y)`` of a bivariate polynomial, upward normal.

    ``terms`` maps exponent pairs ``(i, j)`` to coefficients of ``x^i y^j``.
    """

    family = "graph"

    def __init__(self, terms, domain=((-1.0, 1.0), (-1.0, 1.0)), name="graph"):
        self.terms = {(int(i), int(j)): float(c) for (i, j), c in dict(terms).items()}
        self.domain = tuple(tuple(float(t) for t in ax) for ax in domain)
        self.name = name

    def _partial(self, x, y, a, b):
        total = 0.0
        for (i, j), c in self.terms.items():
            if i < a or j < b:
                continue
            ci = np.prod(np.arange(i, i - a, -1)) if a else 1.0
            cj = np.prod(np.arange(j, j - b, -1)) if b else 1.0
            total += c * ci * cj * x ** (i - a) * y ** (j - b)
        return total

    def evaluate(self, q):
        x, y = q
        g = self._partial
        return (
            np.array([x, y, g(x, y, 0, 0)]),
            np.array([1.0, 0.0, g(x, y, 1, 0)]),
            np.array([0.0, 1.0, g(x, y, 0, 1)]),
            np.array([0.0, 0.0, g(x, y, 2, 0)]),
            np.array([0.0, 0.0, g(x, y, 1, 1)]),
            np.array([0.0, 0.0, g(x, y, 0, 2)]),
        )

    def params(self):
        return {"name": self.name, "terms": {f"{i},{j}": c for (i, j), c in self.terms.items()}}


def paraboloid(a=1.0, domain=((-1.0, 1.0), (-1.0, 1.0))):
    """``z = a (x^2 + y^2) / 2``."""
    return Graph({(2, 0): a / 2, (0, 2): a / 2}, domain, name="paraboloid")


def saddle(a=1.0, domain=((-1.0, 1.0), (-1.0, 1.0))):
    """``z = a (x^2 - y^2) / 2``."""
    return Graph({(2, 0): a / 2, (0, 2): -a / 2}, domain, name="saddle")


def plane(domain=((-1.0, 1.0), (-1.0, 1.0))):
    """The plane ``z = 0``."""
    return Graph({}, domain, name="plane")


class LinearImage(SurfaceChart):
    """Image ``x -> A x + b`` of another chart, same parameter domain."""

    family = "linear_image"

    def __init__(self, A, base, offset=(0.0, 0.0, 0.0)):
        self.A = np.array(A, dtype=float)
        self.base = base
        self.offset = np.asarray(offset, dtype=float)
        self.domain = base.domain
        self.periodic = base.periodic
        self.closed = base.closed

    def evaluate(self, q):
        f, *rest = self.base.evaluate(q)
        return (self.A @ f + self.offset, *(self.A @ w for w in rest))

    def atlas(self):
        return [LinearImage(self.A, c, self.offset) for c in self.base.atlas()]

    def params(self):
        return {"A": self.A.tolist(), "base": repr(self.base), "offset": self.offset.tolist()}
