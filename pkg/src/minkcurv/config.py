"""Run configuration: a YAML document with ``norm``, ``surface`` and options.

Grammar (every key except ``command``, ``norm`` and ``surface`` is optional)::

    command: curvatures | normal-profile | sections | lines | check
    norm:
      family: euclidean | ellipsoid | quartic
      A: [[1, 0, 0], [0, 1, 0], [0, 0, 2]]   # ellipsoid, row-major
      eps: 0.1                               # quartic, >= 0
    surface:
      family: euclidean_sphere | minkowski_sphere | ellipsoid | torus
              | cylinder | graph
      ...family parameters...
      domain: [[u_min, u_max], [v_min, v_max]]
      grid: [nx, ny]
    options:
      ...see DEFAULT_OPTIONS...
    output:
      path: field.csv
      format: csv | json
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import yaml

from .charts import Cylinder, Ellipsoid, EuclideanSphere, Graph, MinkowskiSphere, Torus
from .errors import ParseError, ValidationError
from .norms import EllipsoidNorm, EuclideanNorm, QuarticNorm

COMMANDS = ("curvatures", "normal-profile", "sections", "lines", "check")
FORMATS = ("csv", "json")
NORM_FAMILIES = ("euclidean", "ellipsoid", "quartic")
SURFACE_FAMILIES = (
    "euclidean_sphere",
    "minkowski_sphere",
    "ellipsoid",
    "torus",
    "cylinder",
    "graph",
)
GRAPH_PRESETS = {
    "paraboloid": lambda a: {(2, 0): 0.5 * a, (0, 2): 0.5 * a},
    "saddle": lambda a: {(2, 0): 0.5 * a, (0, 2): -0.5 * a},
    "plane": lambda a: {},
}

DEFAULT_OPTIONS = {
    "h_fd": None,  # None: 1e-4 times the chart-domain diagonal
    "method": "fd",
    "umbilic_tol": 1e-6,
    "point": None,  # chart coordinates; None: centre of the domain
    "direction": [1.0, 0.0],  # chart coordinates
    "n_directions": 64,
    "step": 1e-3,
    "arc_extent": 0.2,
    "half_width": 5,
    "max_length": 1.0,
    "which": "principal_1",
    "workers": 1,
    "admissibility_tol": 1e-2,
    "admissibility_samples": 256,
    "lemma_tol": 1e-3,
    "sign_tol": 1e-6,
    "n_triples": 8,
}

_POSITIVE = ("step", "arc_extent", "max_length", "admissibility_tol", "lemma_tol", "sign_tol")
_NONNEGATIVE = ("umbilic_tol",)
_POSITIVE_INT = ("n_directions", "half_width", "workers", "admissibility_samples", "n_triples")


@dataclass
class RunConfig:
    command: str
    norm_spec: dict
    surface_spec: dict
    grid: tuple = (20, 20)
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))
    out: str | None = None
    format: str = "csv"

    def build_norm(self):
        return build_norm(self.norm_spec)

    def build_surface(self, norm=None):
        return build_surface(self.surface_spec, norm if norm is not None else self.build_norm())

    def replace(self, **changes):
        new = copy.deepcopy(self)
        for k, v in changes.items():
            if k in DEFAULT_OPTIONS:
                new.options[k] = v
            else:
                setattr(new, k, v)
        return new


def _number(value, name, *, positive=False, nonnegative=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"{name} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ValidationError(name, f"{name} must be an integer")
    if not np.isfinite(value):
        raise ValidationError(name, f"{name} must be finite")
    if positive and not value > 0:
        raise ValidationError(name, f"{name} must be positive")
    if nonnegative and not value >= 0:
        raise ValidationError(name, f"{name} must be non-negative")
    return int(value) if integer else float(value)


def _vector(value, name, n):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(name, f"{name} must be a list of {n} numbers")
    if arr.shape != (n,) or not np.all(np.isfinite(arr)):
        raise ValidationError(name, f"{name} must be a list of {n} finite numbers")
    return arr.tolist()


def _domain(value):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("domain", "domain must be [[u_min, u_max], [v_min, v_max]]")
    if arr.shape != (2, 2) or not np.all(arr[:, 0] < arr[:, 1]):
        raise ValidationError("domain", "domain must be [[u_min, u_max], [v_min, v_max]] with min < max")
    return [list(r) for r in arr.tolist()]


def _validate_norm(block):
    if not isinstance(block, dict):
        raise ValidationError("norm", "norm must be a mapping")
    fam = block.get("family")
    if fam not in NORM_FAMILIES:
        raise ValidationError("family", f"unknown norm family {fam!r}")
    spec = {"family": fam}
    extra = set(block) - {"family", "A", "eps"}
    if extra:
        raise ValidationError(sorted(extra)[0], f"unknown norm key {sorted(extra)[0]!r}")
    if fam == "ellipsoid":
        try:
            A = np.array(block.get("A", np.eye(3).tolist()), dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("A", "A must be a 3x3 matrix")
        if A.shape != (3, 3) or not np.all(np.isfinite(A)) or abs(np.linalg.det(A)) < 1e-12:
            raise ValidationError("A", "A must be an invertible 3x3 matrix")
        spec["A"] = A.tolist()
    elif fam == "quartic":
        spec["eps"] = _number(block.get("eps", 0.0), "eps", nonnegative=True)
    return spec


_SURFACE_KEYS = {
    "euclidean_sphere": {"r": 1.0, "center": [0.0, 0.0, 0.0]},
    "minkowski_sphere": {"rho": 1.0, "center": [0.0, 0.0, 0.0]},
    "ellipsoid": {"a": 1.0, "b": 1.0, "c": 1.0, "center": [0.0, 0.0, 0.0]},
    "torus": {"R": 2.0, "r": 0.5, "center": [0.0, 0.0, 0.0]},
    "cylinder": {"r": 1.0},
    "graph": {"preset": None, "a": 1.0, "terms": None},
}


def _validate_surface(block):
    if not isinstance(block, dict):
        raise ValidationError("surface", "surface must be a mapping")
    fam = block.get("family")
    if fam not in SURFACE_FAMILIES:
        raise ValidationError("family", f"unknown surface family {fam!r}")
    defaults = _SURFACE_KEYS[fam]
    allowed = set(defaults) | {"family", "domain", "grid"}
    extra = set(block) - allowed
    if extra:
        raise ValidationError(sorted(extra)[0], f"unknown key {sorted(extra)[0]!r} for {fam}")
    spec = {"family": fam}
    for key, default in defaults.items():
        value = block.get(key, default)
        if key == "center":
            spec[key] = _vector(value, key, 3)
        elif key in ("preset", "terms"):
            spec[key] = value
        else:
            spec[key] = _number(value, key, positive=True)
    if fam == "torus" and not spec["R"] > spec["r"]:
        raise ValidationError("r", "torus needs R > r")
    if fam == "graph":
        if (spec["preset"] is None) == (spec["terms"] is None):
            raise ValidationError("terms", "graph needs exactly one of preset or terms")
        if spec["preset"] is not None and spec["preset"] not in GRAPH_PRESETS:
            raise ValidationError("preset", f"unknown graph preset {spec['preset']!r}")
        if spec["terms"] is not None:
            terms = spec["terms"]
            if not isinstance(terms, list) or not all(
                isinstance(t, list) and len(t) == 3 for t in terms
            ):
                raise ValidationError("terms", "terms must be a list of [i, j, coefficient]")
            spec["terms"] = [
                [
                    _number(i, "terms", integer=True, nonnegative=True),
                    _number(j, "terms", integer=True, nonnegative=True),
                    _number(c, "terms"),
                ]
                for i, j, c in terms
            ]
        if spec["preset"] is None:
            del spec["a"]
    if "domain" in block:
        spec["domain"] = _domain(block["domain"])
    return spec


def _validate_options(block):
    if block is None:
        block = {}
    if not isinstance(block, dict):
        raise ValidationError("options", "options must be a mapping")
    extra = set(block) - set(DEFAULT_OPTIONS)
    if extra:
        raise ValidationError(sorted(extra)[0], f"unknown option {sorted(extra)[0]!r}")
    opts = dict(DEFAULT_OPTIONS)
    opts.update(block)
    for k in _POSITIVE:
        opts[k] = _number(opts[k], k, positive=True)
    for k in _NONNEGATIVE:
        opts[k] = _number(opts[k], k, nonnegative=True)
    for k in _POSITIVE_INT:
        opts[k] = _number(opts[k], k, positive=True, integer=True)
    if opts["h_fd"] is not None:
        opts["h_fd"] = _number(opts["h_fd"], "h_fd", positive=True)
    if opts["method"] not in ("fd", "chain"):
        raise ValidationError("method", "method must be fd or chain")
    if opts["which"] not in ("principal_1", "principal_2", "asymptotic_a", "asymptotic_b"):
        raise ValidationError("which", f"unknown line family {opts['which']!r}")
    if opts["point"] is not None:
        opts["point"] = _vector(opts["point"], "point", 2)
    opts["direction"] = _vector(opts["direction"], "direction", 2)
    if not any(opts["direction"]):
        raise ValidationError("direction", "direction must be nonzero")
    return opts


def validate(doc):
    """Turn a parsed mapping into a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ValidationError("document", "configuration must be a mapping")
    extra = set(doc) - {"command", "norm", "surface", "options", "output"}
    if extra:
        raise ValidationError(sorted(extra)[0], f"unknown top-level key {sorted(extra)[0]!r}")
    command = doc.get("command", "curvatures")
    if command not in COMMANDS:
        raise ValidationError("command", f"unknown command {command!r}")
    if "norm" not in doc:
        raise ValidationError("norm", "missing norm block")
    if "surface" not in doc:
        raise ValidationError("surface", "missing surface block")
    norm_spec = _validate_norm(doc["norm"])
    surface_spec = _validate_surface(doc["surface"])
    grid = doc["surface"].get("grid", [20, 20])
    if not isinstance(grid, list) or len(grid) != 2:
        raise ValidationError("grid", "grid must be [nx, ny]")
    grid = tuple(_number(g, "grid", integer=True) for g in grid)
    if min(grid) < 2:
        raise ValidationError("grid", "grid must be at least 2x2")
    options = _validate_options(doc.get("options"))
    output = doc.get("output") or {}
    if not isinstance(output, dict):
        raise ValidationError("output", "output must be a mapping")
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ValidationError("format", f"format must be one of {FORMATS}")
    path = output.get("path")
    if path is not None and not isinstance(path, str):
        raise ValidationError("path", "output path must be a string")
    return RunConfig(
        command=command,
        norm_spec=norm_spec,
        surface_spec=surface_spec,
        grid=grid,
        options=options,
        out=path,
        format=fmt,
    )


def parse_config(text):
    """Parse and validate a YAML configuration document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(f"malformed configuration: {exc}", line=line) from exc
    return validate(doc)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def build_norm(spec):
    fam = spec["family"]
    if fam == "euclidean":
        return EuclideanNorm()
    if fam == "ellipsoid":
        return EllipsoidNorm(spec["A"])
    return QuarticNorm(spec["eps"])


def build_surface(spec, norm):
    fam = spec["family"]
    domain = spec.get("domain")
    if fam == "euclidean_sphere":
        chart = EuclideanSphere(spec["r"], spec["center"])
    elif fam == "minkowski_sphere":
        chart = MinkowskiSphere(norm, spec["rho"], spec["center"])
    elif fam == "ellipsoid":
        chart = Ellipsoid(spec["a"], spec["b"], spec["c"], spec["center"])
    elif fam == "torus":
        chart = Torus(spec["R"], spec["r"], spec["center"])
    elif fam == "cylinder":
        chart = Cylinder(spec["r"])
    else:
        if spec["preset"] is not None:
            terms = GRAPH_PRESETS[spec["preset"]](spec["a"])
            name = spec["preset"]
        else:
            terms = {(i, j): c for i, j, c in spec["terms"]}
            name = "graph"
        chart = Graph(terms, name=name)
    if domain is not None:
        chart.domain = tuple(tuple(ax) for ax in domain)
    return chart
