"""Prescribed-curvature metrics on closed surfaces via circle-packing flows.

The package finds piecewise flat metrics with chosen cone angles by
integrating Calabi-type flows in the conformal factors of an
inversive-distance circle packing, flipping edges as needed to keep the
triangulation weighted Delaunay.
"""

from .errors import (
    DegenerateLength,
    DegenerateTriangle,
    DisconnectedSurface,
    DpmSyntaxError,
    FlipProducesDegenerate,
    FlowError,
    FormatError,
    GeometryError,
    ImaginaryChord,
    InconsistentVertexLabels,
    IndefiniteOperator,
    InvalidExponent,
    InvalidInversiveDistance,
    InvalidParams,
    MeshError,
    MetricError,
    NoConvergence,
    NonAdmissibleTarget,
    NonPositiveRadius,
    NonSimplicial,
    OperatorError,
    OrientationMismatch,
    PackflowError,
    SchemaError,
    SelfFlip,
    SingularSystem,
    StepCollapse,
    StepLeavesAdmissible,
    SurgeryBudgetExceeded,
    SurgeryError,
    UnmatchedSlot,
    UnusedVertex,
)
from .mesh import DeltaComplex, EdgeHandle, FlipRecord, build_complex, flip_combinatorial, infer_gluings, vertex_star
from .metric import (
    DecoratedMetric,
    InversiveDistances,
    MarginReport,
    apply_conformal,
    inversive_from_lengths,
    lengths_from_inversive,
    validate_triangles,
)
from .geometry import (
    TriangleGeometry,
    cotan_weight,
    edge_half_chord,
    inner_angles,
    layout_triangle,
    radical_center,
    signed_distances,
    triangle_angles,
    triangle_areas,
)
from .surgery import SurgeryEvent, delaunay_violations, flip_metric, make_delaunay
from .operators import (
    CurvatureJacobian,
    CurvatureVector,
    apply_fractional,
    apply_laplacian,
    apply_p_laplacian,
    calabi_energy,
    curvature,
    fd_jacobian,
    gauss_bonnet_residual,
    jacobian,
    spectral,
)
from .flows import FlowConfig, FlowTrace, StepRecord, potential_increment, run, step, velocity
from .formats import DpmDocument, TRACE_COLUMNS, emit_dpm, generate, parse_dpm, write_trace_csv
from .oracles import (
    RandomMetricSpec,
    oracle_angles_via_layout,
    oracle_delaunay_via_angles,
    oracle_flip_length,
    random_metric,
)
from .presets import PRESET_NAMES, preset_complex, preset_metric

__version__ = "0.1.0"

__all__ = [
    "PackflowError",
    "MeshError",
    "UnmatchedSlot",
    "OrientationMismatch",
    "DisconnectedSurface",
    "UnusedVertex",
    "InconsistentVertexLabels",
    "NonSimplicial",
    "SelfFlip",
    "MetricError",
    "NonPositiveRadius",
    "InvalidInversiveDistance",
    "DegenerateLength",
    "DegenerateTriangle",
    "GeometryError",
    "SingularSystem",
    "ImaginaryChord",
    "SurgeryError",
    "FlipProducesDegenerate",
    "SurgeryBudgetExceeded",
    "OperatorError",
    "StepLeavesAdmissible",
    "NoConvergence",
    "InvalidExponent",
    "IndefiniteOperator",
    "FlowError",
    "StepCollapse",
    "NonAdmissibleTarget",
    "FormatError",
    "DpmSyntaxError",
    "SchemaError",
    "InvalidParams",
    "DeltaComplex",
    "EdgeHandle",
    "FlipRecord",
    "build_complex",
    "infer_gluings",
    "flip_combinatorial",
    "vertex_star",
    "DecoratedMetric",
    "InversiveDistances",
    "MarginReport",
    "apply_conformal",
    "inversive_from_lengths",
    "lengths_from_inversive",
    "validate_triangles",
    "TriangleGeometry",
    "inner_angles",
    "layout_triangle",
    "radical_center",
    "signed_distances",
    "edge_half_chord",
    "cotan_weight",
    "triangle_angles",
    "triangle_areas",
    "SurgeryEvent",
    "delaunay_violations",
    "flip_metric",
    "make_delaunay",
    "CurvatureVector",
    "CurvatureJacobian",
    "curvature",
    "gauss_bonnet_residual",
    "jacobian",
    "fd_jacobian",
    "spectral",
    "apply_laplacian",
    "apply_fractional",
    "apply_p_laplacian",
    "calabi_energy",
    "FlowConfig",
    "FlowTrace",
    "StepRecord",
    "velocity",
    "step",
    "run",
    "potential_increment",
    "DpmDocument",
    "TRACE_COLUMNS",
    "parse_dpm",
    "emit_dpm",
    "generate",
    "write_trace_csv",
    "RandomMetricSpec",
    "random_metric",
    "oracle_angles_via_layout",
    "oracle_delaunay_via_angles",
    "oracle_flip_length",
    "PRESET_NAMES",
    "preset_complex",
    "preset_metric",
]
