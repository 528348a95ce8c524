"""Curvature of surfaces immersed in three-dimensional normed spaces."""
from .charts import (
    Cylinder,
    Ellipsoid,
    EuclideanSphere,
    Graph,
    LinearImage,
    MinkowskiSphere,
    SurfaceChart,
    SurfaceJet,
    Torus,
    jet,
    minkowski_sphere_chart,
    paraboloid,
    plane,
    saddle,
)
from .config import RunConfig, parse_config
from .curvature import (
    ALL_DIRECTIONS,
    CurvatureReport,
    asymptotic_directions,
    birkhoff_normal,
    conjugate_direction,
    curvature_report,
    fundamental_form,
    normal_curvature,
    normal_curvature_from_report,
    normal_profile,
    principal_curvatures,
    shape_differential,
    sign_equivalences,
)
from .errors import *  # noqa: F401,F403
from .flowlines import (
    coercivity_diagnostic,
    enclosing_ball_contact,
    integrate_asymptotic_curve,
    integrate_curvature_line,
)
from .harness import run_check, run_curvature_field, run_lines, run_normal_profile, run_sections
from .norms import (
    EllipsoidNorm,
    EuclideanNorm,
    QuarticNorm,
    check_admissible,
    is_birkhoff_orthogonal,
    make_norm,
    norm_jet,
    support_differential,
    support_point,
)
from .planar import (
    PlaneCurveSample,
    PlaneNormModel,
    circular_curvature_ratio,
    circular_curvature_reparam,
    euclidean_curvature_at,
    restrict_norm,
)
from .sections import oracle_normal_curvature, trace_section

__version__ = "0.1.0"
