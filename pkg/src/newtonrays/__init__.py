"""Numerical toolkit for the dynamics of Newton maps on the Riemann sphere.

The package builds Newton maps of polynomials, computes Böttcher
coordinates of their superattracting basins, traces internal rays to
their landing points, assembles ray graphs (Newton graphs, cut-angle
sets, separating curves), runs convergence experiments along
degenerating families, and classifies quartic maps by the location of
their additional critical points.  A command-line surface is exposed as
``newton-rays`` (module :mod:`newtonrays.cli`).
"""

from .sphere import INF, Poly, SpherePoint, normalize_angle, solve_poly, sphere_dist
from .maps import (
    MapRep,
    NewtonSource,
    advance,
    critical_points,
    fixed_points,
    map_from_dict,
    map_to_dict,
    newton_from_source,
    newton_of_poly,
    poles,
    preimages,
    refine_cycle,
)
from .bottcher import (
    BottcherChart,
    DeformationRecord,
    chart_at_preimage,
    chart_at_root,
    conjugacy_residual,
    track_deformation,
)
from .rays import (
    ColandResult,
    InternalRay,
    LandingCertificate,
    TraceOptions,
    coland,
    landing_refine,
    trace_ray,
    trace_rays,
)
from .graphs import (
    CutAngleSet,
    CurvePrecondition,
    RayGraph,
    build_curve_C,
    build_curve_L,
    build_curve_gamma,
    build_graph_G,
    build_ray_graph,
    cut_angles,
    farey_angles,
    find_curve_c_angle,
    graph_hausdorff,
    graph_iso,
    graph_to_dict,
    graph_to_dot,
    newton_graph,
    separable_check,
    shared_pole_pairs,
    winding_contains,
)
from .families import (
    AffineMap,
    ConvergenceReport,
    ExperimentRow,
    FamilySpec,
    HypothesisError,
    CUBIC_PERTURB,
    PER2_SLICE,
    QUARTIC_ROOT_ESCAPE,
    convergence_experiment,
    critical_escape_check,
    experiment_from_config,
    family_limit,
    make_family,
    normalize_roots,
    per2_polynomial,
    report_to_csv,
    report_to_json,
    trace_gamma,
)
from .classify import (
    ClassifyResult,
    CycleRecord,
    LabelGrid,
    RootTarget,
    TypeLabel,
    DEFAULT_PER2_REGION,
    classify_type,
    detect_cycle,
    label_components,
    per2_type_grid,
    read_label_grid,
    read_type_grid,
    render_dynamical,
    render_parameter,
    write_image,
    write_label_grid,
    write_png,
    write_ppm,
    write_type_grid,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Poly",
    "SpherePoint",
    "normalize_angle",
    "solve_poly",
    "sphere_dist",
    "MapRep",
    "NewtonSource",
    "advance",
    "critical_points",
    "fixed_points",
    "map_from_dict",
    "map_to_dict",
    "newton_from_source",
    "newton_of_poly",
    "poles",
    "preimages",
    "refine_cycle",
    "BottcherChart",
    "DeformationRecord",
    "chart_at_preimage",
    "chart_at_root",
    "conjugacy_residual",
    "track_deformation",
    "ColandResult",
    "InternalRay",
    "LandingCertificate",
    "TraceOptions",
    "coland",
    "landing_refine",
    "trace_ray",
    "trace_rays",
    "CutAngleSet",
    "CurvePrecondition",
    "RayGraph",
    "build_curve_C",
    "build_curve_L",
    "build_curve_gamma",
    "build_graph_G",
    "build_ray_graph",
    "cut_angles",
    "farey_angles",
    "find_curve_c_angle",
    "graph_hausdorff",
    "graph_iso",
    "graph_to_dict",
    "graph_to_dot",
    "newton_graph",
    "separable_check",
    "shared_pole_pairs",
    "winding_contains",
    "AffineMap",
    "ConvergenceReport",
    "ExperimentRow",
    "FamilySpec",
    "HypothesisError",
    "CUBIC_PERTURB",
    "PER2_SLICE",
    "QUARTIC_ROOT_ESCAPE",
    "convergence_experiment",
    "critical_escape_check",
    "experiment_from_config",
    "family_limit",
    "make_family",
    "normalize_roots",
    "per2_polynomial",
    "report_to_csv",
    "report_to_json",
    "trace_gamma",
    "ClassifyResult",
    "CycleRecord",
    "LabelGrid",
    "RootTarget",
    "TypeLabel",
    "DEFAULT_PER2_REGION",
    "classify_type",
    "detect_cycle",
    "label_components",
    "per2_type_grid",
    "read_label_grid",
    "read_type_grid",
    "render_dynamical",
    "render_parameter",
    "write_image",
    "write_label_grid",
    "write_png",
    "write_ppm",
    "write_type_grid",
    "__version__",
]
