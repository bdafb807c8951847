"""meshcone: geometry-guided mesh refinement via second-order cone programming.

A deformed mesh is corrected toward a reference shape by solving one convex
program — a quadratic objective pulling vertices toward the sampled target
centroid and an anchor shape, under per-edge Euclidean length bounds
(second-order cone constraints) — with a warm-started operator-splitting
solver over a sparse LDL^T factorization computed once per refinement.
"""

from .assemble import (
    RefineConfig,
    RefineOutcome,
    build_edge_program,
    build_program,
    choose_reference,
    closed_form_oracle,
    refine,
)
from .baselines import DeformConfig, SmoothConfig, gen_deformed, laplacian_smooth
from .cones import ConeLayout, contains, dual_layout, project
from .errors import (
    DegenerateMeshError,
    DimensionError,
    EmptyMeshError,
    FaceIndexError,
    MeshConeError,
    ObjParseError,
    SingularMatrixError,
)
from .mesh import (
    PointSample,
    Transform,
    TriMesh,
    centroid,
    extract_edges,
    load_obj,
    mean_curvature,
    normalize_unit_sphere,
    sample_surface,
    save_obj,
    vertex_normals,
)
from .metrics import (
    MetricsReport,
    aspect_ratio,
    chamfer,
    compute_report,
    curvature_error,
    emd,
    hausdorff,
    normal_consistency,
)
from .solver import (
    ConicProblem,
    SolverResult,
    SolverSettings,
    residuals,
    solve,
    write_diagnostics,
)
from .sparse import (
    LdlFactorization,
    SparseMatrix,
    from_triplets,
    ldl_factor,
    ldl_solve,
    spmv,
    sym_spmv,
    transpose_spmv,
)
from .spatial import KdIndex

__version__ = "0.1.0"

__all__ = [
    "ConeLayout",
    "ConicProblem",
    "DeformConfig",
    "DegenerateMeshError",
    "DimensionError",
    "EmptyMeshError",
    "FaceIndexError",
    "KdIndex",
    "LdlFactorization",
    "MeshConeError",
    "MetricsReport",
    "ObjParseError",
    "PointSample",
    "RefineConfig",
    "RefineOutcome",
    "SingularMatrixError",
    "SmoothConfig",
    "SolverResult",
    "SolverSettings",
    "SparseMatrix",
    "Transform",
    "TriMesh",
    "aspect_ratio",
    "build_edge_program",
    "build_program",
    "centroid",
    "chamfer",
    "choose_reference",
    "closed_form_oracle",
    "compute_report",
    "contains",
    "curvature_error",
    "dual_layout",
    "emd",
    "extract_edges",
    "from_triplets",
    "gen_deformed",
    "hausdorff",
    "laplacian_smooth",
    "ldl_factor",
    "ldl_solve",
    "load_obj",
    "mean_curvature",
    "normal_consistency",
    "normalize_unit_sphere",
    "project",
    "refine",
    "residuals",
    "sample_surface",
    "save_obj",
    "solve",
    "spmv",
    "sym_spmv",
    "transpose_spmv",
    "vertex_normals",
    "write_diagnostics",
]
