"""Invariant suite: every numerical property the library promises, as checks.

Each check returns a :class:`CheckRecord` with the number of witnesses it
examined, the worst residual found and the threshold it was held to.  A
check that cannot apply to the configuration (an ellipsoid-norm oracle
under a quartic norm, say) reports zero witnesses and passes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .charts import Graph, LinearImage, MinkowskiSphere, EuclideanSphere
from .curvature import (
    asymptotic_directions_from_form,
    conjugate_direction,
    curvature_report,
    normal_curvature_from_report,
    normal_profile,
    sign_equivalences,
)
from .errors import MinkowskiError
from .flowlines import enclosing_ball_contact, integrate_curvature_line
from .norms import (
    EllipsoidNorm,
    EuclideanNorm,
    QuarticNorm,
    admissibility_samples,
    check_admissible,
    is_birkhoff_orthogonal,
)
from .sections import oracle_normal_curvature

# signed permutation matrices tried by the isometry check
SIGNED_PERMUTATIONS = (
    np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
    np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]),
    np.diag([-1.0, 1.0, 1.0]),
    np.diag([1.0, -1.0, -1.0]),
)

THRESHOLDS = {
    "xi_orthogonality": 1e-10,
    "eta_unit_birkhoff": 1e-8,
    "equiaffinity": 1e-4,
    "self_adjointness": 1e-6,
    "chain_rule": 1e-5,
    "fundamental_form": 1e-5,
    "normal_curvature_bounds": 1e-5,
    "principal_extrema": 1e-2,
    "sign_equivalences": 0.0,
    "asymptotic_directions": 1e-6,
    "conjugate_directions": 1e-5,
    "umbilic_classification": 0.0,
    "umbilic_rigidity": 1e-4,
    "euclidean_reduction": 1e-5,
    "family_reduction": 1e-9,
    "isometry_invariance": 1e-6,
    "transform_oracle": 1e-4,
    "oracle_equivalence": 1e-3,
    "curvature_line_residual": 1e-3,
    "enclosing_ball": 1e-3,
}


@dataclass
class CheckRecord:
    name: str
    witnesses: int
    worst: float
    threshold: float
    passed: bool
    note: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "witnesses": self.witnesses,
            "worst": self.worst,
            "threshold": self.threshold,
            "pass": self.passed,
            "note": self.note,
        }


class _Collector:
    """Accumulates residuals for one named check."""

    def __init__(self, name, threshold=None):
        self.name = name
        self.threshold = THRESHOLDS[name] if threshold is None else threshold
        self.witnesses = 0
        self.worst = 0.0
        self.failures = 0
        self.errors = []

    def add(self, residual, ok=None):
        self.witnesses += 1
        residual = float(residual)
        if not np.isfinite(residual):
            self.failures += 1
            self.worst = np.inf
            return
        self.worst = max(self.worst, residual)
        if ok is None:
            ok = residual <= self.threshold
        if not ok:
            self.failures += 1

    def error(self, exc):
        self.witnesses += 1
        self.failures += 1
        self.worst = np.inf
        self.errors.append(f"{type(exc).__name__}: {exc}")

    def record(self, note=""):
        if self.errors:
            note = (note + "; " if note else "") + self.errors[0]
        if self.witnesses == 0 and not note:
            note = "not applicable"
        return CheckRecord(
            self.name, self.witnesses, self.worst, self.threshold, self.failures == 0, note
        )


def _norm_preserved(norm, G):
    for v in admissibility_samples(64):
        if abs(norm.jet(G @ v)[0] - norm.jet(v)[0]) > 1e-12 * norm.jet(v)[0]:
            return False
    return True


def _euclidean_like(norm):
    return isinstance(norm, EuclideanNorm) or (isinstance(norm, QuarticNorm) and norm.eps == 0.0)


def expected_all_umbilic(norm, chart):
    """Whether every point of ``chart`` is umbilic under ``norm`` by construction."""
    if isinstance(chart, MinkowskiSphere):
        return type(chart.norm) is type(norm) and chart.norm.params() == norm.params()
    if isinstance(chart, EuclideanSphere):
        return _euclidean_like(norm)
    if isinstance(chart, Graph):
        return all(i + j <= 1 for i, j in chart.terms)
    return False


def _interior(chart, q, margin=0.1):
    for k in range(2):
        lo, hi = chart.domain[k]
        if not chart.periodic[k] and not (lo + margin * (hi - lo) <= q[k] <= hi - margin * (hi - lo)):
            return False
    return True


def _angle_mod_pi(a, b):
    d = np.mod(a - b, np.pi)
    return min(d, np.pi - d)


def profile_extrema(rep, n_directions=64, gap_tol=1e-4):
    """Bound excess of the normal-curvature profile and extremum misplacement.

    Returns ``(excess, angles)``.  ``excess`` is how far the sampled profile
    leaves ``[lambda2, lambda1]``, relative to ``max(1, |lambda|)``.
    ``angles`` holds, for the maximum and the minimum, the angle (mod pi)
    between the refined extremum of ``k`` and the principal direction; it
    is empty when the gap ``lambda1 - lambda2`` is within ``gap_tol`` of
    zero and the directions are not determined.
    """
    t, _, k = normal_profile(rep, n_directions)
    scale = max(1.0, abs(rep.lambda1), abs(rep.lambda2))
    excess = max(np.max(k) - rep.lambda1, rep.lambda2 - np.min(k), 0.0) / scale
    gap = rep.lambda1 - rep.lambda2
    if gap <= gap_tol * max(1.0, abs(rep.lambda1) + abs(rep.lambda2)):
        return excess, []
    B = rep.basis

    def k_at(theta):
        return normal_curvature_from_report(rep, np.cos(theta) * B[0] + np.sin(theta) * B[1])

    width = 2.0 * np.pi / n_directions
    angles = []
    for sign, E in ((1.0, rep.E1_ambient), (-1.0, rep.E2_ambient)):
        i = int(np.argmax(sign * k))
        res = minimize_scalar(
            lambda th: -sign * k_at(th),
            bounds=(t[i] - width, t[i] + width),
            method="bounded",
            options={"xatol": 1e-10},
        )
        principal = np.arctan2(E @ B[1], E @ B[0])
        angles.append(_angle_mod_pi(res.x, principal))
    return excess, angles


def run_invariant_suite(norm, chart, grid=(20, 20), options=None):
    """Run every applicable check on ``norm`` and ``chart`` over a grid."""
    opts = {
        "h_fd": None,
        "umbilic_tol": 1e-6,
        "n_directions": 64,
        "admissibility_tol": 1e-2,
        "admissibility_samples": 256,
        "lemma_tol": 1e-3,
        "sign_tol": 1e-6,
        "n_triples": 8,
        "step": 1e-3,
        "arc_extent": 0.2,
        "half_width": 5,
        "max_length": 1.0,
    }
    opts.update(options or {})
    records = []

    adm = check_admissible(norm, opts["admissibility_samples"], opts["admissibility_tol"])
    records.append(
        CheckRecord(
            "admissibility",
            adm.n_samples + 6,
            float(min(adm.min_eigen_du / adm.scale, adm.scale / adm.max_eigen_du)),
            adm.tol,
            adm.passed,
            "relative du eigenvalue margin; worst v = " + str(np.round(adm.worst_v, 6).tolist()),
        )
    )
    if not adm.passed:
        records.append(
            CheckRecord("curvatures", 0, np.nan, 0.0, False, "skipped: norm is not admissible")
        )
        return records

    names = [
        "xi_orthogonality",
        "eta_unit_birkhoff",
        "equiaffinity",
        "self_adjointness",
        "chain_rule",
        "fundamental_form",
        "normal_curvature_bounds",
        "principal_extrema",
        "sign_equivalences",
        "asymptotic_directions",
        "conjugate_directions",
        "umbilic_classification",
        "euclidean_reduction",
        "family_reduction",
        "isometry_invariance",
        "transform_oracle",
    ]
    col = {n: _Collector(n) for n in names}
    points = chart.grid(*grid)
    reports = []
    kw = {"h_fd": opts["h_fd"], "umbilic_tol": opts["umbilic_tol"]}

    isometries = [LinearImage(G, chart) for G in SIGNED_PERMUTATIONS if _norm_preserved(norm, G)]
    image = None
    if isinstance(norm, EllipsoidNorm):
        image = LinearImage(norm.A, chart)
    euclid = EuclideanNorm()
    want_umbilic = expected_all_umbilic(norm, chart)

    for q in points:
        try:
            rep = curvature_report(norm, chart, q, **kw)
        except MinkowskiError as exc:
            for n in ("xi_orthogonality", "equiaffinity"):
                col[n].error(exc)
            reports.append(None)
            continue
        reports.append(rep)
        fu, fv = rep.frame.T
        col["xi_orthogonality"].add(
            max(abs(rep.xi @ fu) / np.linalg.norm(fu), abs(rep.xi @ fv) / np.linalg.norm(fv))
        )
        unit_err = abs(norm.jet(rep.eta)[0] - 1.0)
        birk = is_birkhoff_orthogonal(norm, rep.eta, (fu, fv), tol=THRESHOLDS["eta_unit_birkhoff"])
        col["eta_unit_birkhoff"].add(unit_err, ok=unit_err <= 1e-8 and birk)
        col["equiaffinity"].add(rep.tau_residual)
        col["self_adjointness"].add(rep.selfadj_residual)
        scale = max(1.0, abs(rep.lambda1), abs(rep.lambda2))
        col["chain_rule"].add(rep.chain_residual / scale)
        col["fundamental_form"].add(rep.h_residual / max(1.0, np.max(np.abs(rep.h_mat))))
        excess, angles = profile_extrema(rep, opts["n_directions"])
        col["normal_curvature_bounds"].add(excess)
        for a in angles:
            col["principal_extrema"].add(a)

        if abs(rep.K_e) > opts["sign_tol"] and abs(rep.K) > opts["sign_tol"]:
            s = sign_equivalences(norm, chart, q, opts["sign_tol"], rep=rep)
            col["sign_equivalences"].add(0.0 if s.consistent else 1.0)

        if rep.rank_h == 2 and not rep.h_definite:
            for d in asymptotic_directions_from_form(rep.h_mat):
                col["asymptotic_directions"].add(abs(normal_curvature_from_report(rep, d)) / scale)
        if rep.rank_h == 2:
            X = rep.E1 + 0.37 * rep.E2 if not rep.umbilic else np.array([1.0, 0.37])
            try:
                _, resid = conjugate_direction(norm, chart, q, X, rep=rep, h_fd=opts["h_fd"])
                col["conjugate_directions"].add(resid / max(1.0, np.max(np.abs(rep.h_mat))))
            except MinkowskiError:
                pass  # X asymptotic: no conjugate to test

        if want_umbilic:
            col["umbilic_classification"].add(0.0 if rep.umbilic else 1.0)

        if _euclidean_like(norm):
            ev = np.linalg.eigvals(rep.d_xi)
            col["euclidean_reduction"].add(
                max(abs(rep.K - rep.K_e), abs(rep.H_mean - 0.5 * float(np.sum(ev.real)))) / scale**2
            )
        if isinstance(norm, QuarticNorm) and norm.eps == 0.0:
            ref = curvature_report(euclid, chart, q, **kw)
            col["family_reduction"].add(
                max(abs(rep.lambda1 - ref.lambda1), abs(rep.lambda2 - ref.lambda2))
            )
        for img in isometries:
            try:
                other = curvature_report(norm, img, q, **kw)
                col["isometry_invariance"].add(abs(other.K - rep.K) / scale**2)
            except MinkowskiError as exc:
                col["isometry_invariance"].error(exc)
        if image is not None:
            other = curvature_report(euclid, image, q, **kw)
            col["transform_oracle"].add(
                max(abs(other.lambda1 - rep.lambda1), abs(other.lambda2 - rep.lambda2)) / scale
            )

    for n in names:
        records.append(col[n].record())

    records.append(_rigidity(reports))
    records.append(_oracle_check(norm, chart, points, reports, opts))
    records.append(_line_check(norm, chart, points, reports, opts))
    records.append(_ball_check(norm, chart, opts))
    return records


def _rigidity(reports):
    """All-umbilic surfaces with ``lambda != 0`` are Minkowski spheres.

    When every sampled point is umbilic, the centres ``p - eta / lambda``
    and radii ``1 / lambda`` must agree across the sample.
    """
    col = _Collector("umbilic_rigidity")
    reps = [r for r in reports if r is not None]
    if not reps or not all(r.umbilic for r in reps):
        return col.record("surface is not all-umbilic")
    lam = np.array([r.H_mean for r in reps])
    if np.all(np.abs(lam) < 1e-8):
        for r in reps:
            col.add(np.max(np.abs(r.d_eta)))
        return col.record("planar: d_eta vanishes")
    if np.any(np.abs(lam) < 1e-8) or np.ptp(np.sign(lam)) != 0:
        col.add(np.inf)
        return col.record("umbilic with mixed-sign curvature")
    centres = np.array([r.p - r.eta / l for r, l in zip(reps, lam)])
    radius = 1.0 / lam
    spread = max(np.max(np.ptp(centres, axis=0)), np.ptp(radius)) / np.max(np.abs(radius))
    col.add(spread)
    return col.record()


def _oracle_check(norm, chart, points, reports, opts):
    col = _Collector("oracle_equivalence")
    idx = [i for i, q in enumerate(points) if reports[i] is not None and _interior(chart, q)]
    if not idx:
        return col.record()
    n = min(opts["n_triples"], len(idx))
    chosen = [idx[int(j * len(idx) / n)] for j in range(n)]
    golden = np.pi * (3.0 - np.sqrt(5.0))
    for j, i in enumerate(chosen):
        rep = reports[i]
        theta = j * golden
        X = np.cos(theta) * rep.basis[0] + np.sin(theta) * rep.basis[1]
        try:
            k_formula = normal_curvature_from_report(rep, X)
            k_oracle = oracle_normal_curvature(
                norm,
                chart,
                points[i],
                X,
                arc_extent=opts["arc_extent"],
                step=opts["step"],
                half_width=opts["half_width"],
            )
        except MinkowskiError as exc:
            col.error(exc)
            continue
        col.add(abs(k_formula - k_oracle))
    return col.record()


def _line_check(norm, chart, points, reports, opts):
    col = _Collector("curvature_line_residual")
    gap_tol = 1e-3
    for q, rep in zip(points, reports):
        if rep is None or not _interior(chart, q, 0.25):
            continue
        if rep.lambda1 - rep.lambda2 <= gap_tol * max(1.0, abs(rep.lambda1) + abs(rep.lambda2)):
            continue
        trace = integrate_curvature_line(
            norm,
            chart,
            q,
            "principal_1",
            step=opts["step"],
            max_length=min(opts["max_length"], 0.25),
            umbilic_tol=opts["umbilic_tol"] or 1e-6,
        )
        for r in trace.residuals:
            col.add(r)
        return col.record(f"one trace from q={np.round(q, 6).tolist()}, stop: {trace.stop_reason}")
    return col.record("no non-umbilic interior point")


def _ball_check(norm, chart, opts):
    col = _Collector("enclosing_ball", opts["lemma_tol"])
    if not chart.closed:
        return col.record("surface is not closed")
    try:
        rep = enclosing_ball_contact(norm, chart, lemma_tol=opts["lemma_tol"], h_fd=opts["h_fd"])
    except MinkowskiError as exc:
        col.error(exc)
        return col.record()
    deficit = max(0.0, 1.0 - rep.product)
    note = f"K r^2 = {rep.product:.9g}"
    if (
        isinstance(chart, MinkowskiSphere)
        and expected_all_umbilic(norm, chart)
        and np.allclose(chart.center, 0.0)
    ):
        deficit = abs(rep.product - 1.0)
        note += " (equality expected)"
    col.add(deficit)
    return col.record(note)
