"""From a mesh pair to a cone program, and the full refinement pipeline.

The decision variable is the row-major flattening of the vertex positions
(vertex i owns coordinates ``3i..3i+2``). The objective

    ||X - 1 mu^T||_F^2 + lambda ||X - X_ref||_F^2

expands to ``P = 2 (1 + lambda) I`` and ``c_{3i..3i+2} = -2 (mu + lambda
x_ref_i)`` (constant terms dropped). Every mesh edge (i, j) becomes one
second-order cone block of four rows enforcing ``||X_i - X_j|| <= delta``:
slack ``s = (delta, X_j - X_i)`` via a zero row with b = delta plus three
rows of +/-1 coefficients.
"""

from dataclasses import dataclass, field

import numpy as np

from . import cones as cones_mod
from . import sparse
from .errors import DegenerateMeshError, DimensionError
from .mesh import Transform, centroid, normalize_unit_sphere, sample_surface
from .solver import ConicProblem, SolverSettings, solve


@dataclass(frozen=True)
class RefineConfig:
    """Pipeline parameters. ``lam`` is the anchor weight lambda."""

    lam: float = 0.01
    delta: float = 0.5
    sample_count: int = 10000
    seed: int = 0
    normalize: bool = True
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0 (got {self.lam}); the anchor term is required")
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


@dataclass(frozen=True)
class RefineOutcome:
    refined: object
    solver_result: object
    x_ref_source: str
    mu: np.ndarray
    x_ref: np.ndarray
    transform_applied: dict


def choose_reference(deformed, target):
    """Anchor selection: target vertices when the counts match, else the
    deformed mesh's own vertices. Returns ``(x_ref, source_tag)``."""
    if deformed.n_vertices == target.n_vertices:
        return target.vertices, "target"
    return deformed.vertices, "deformed"


def build_program(deformed, mu, x_ref, config):
    """Assemble the cone program for one refinement solve.

    ``deformed`` supplies the edge set, ``mu`` the sampled-target centroid,
    ``x_ref`` the (n, 3) anchor positions.
    """
    return build_edge_program(
        deformed.n_vertices, deformed.edges, mu, x_ref, config.lam, config.delta
    )


def build_edge_program(n_vertices, edges, mu, x_ref, lam, delta):
    """Same assembly from a raw edge list (no mesh required)."""
    n = n_vertices
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) == 0:
        raise DegenerateMeshError("mesh has no edges; nothing to constrain")
    mu = np.asarray(mu, dtype=np.float64).reshape(3)
    x_ref = np.asarray(x_ref, dtype=np.float64)
    if x_ref.shape != (n, 3):
        raise DimensionError(f"x_ref must be ({n}, 3), got {x_ref.shape}")

    n3 = 3 * n
    diag_idx = np.arange(n3, dtype=np.int64)
    P = sparse.from_triplets(
        n3, n3, diag_idx, diag_idx, np.full(n3, 2.0 * (1.0 + lam))
    )
    c = (-2.0 * (mu[None, :] + lam * x_ref)).ravel()

    n_edges = len(edges)
    i, j = edges[:, 0], edges[:, 1]
    base = 4 * np.arange(n_edges, dtype=np.int64)
    coord = np.arange(3, dtype=np.int64)
    rows = (base[:, None] + 1 + coord[None, :]).ravel()
    cols_i = (3 * i[:, None] + coord[None, :]).ravel()
    cols_j = (3 * j[:, None] + coord[None, :]).ravel()
    A = sparse.from_triplets(
        4 * n_edges,
        n3,
        np.concatenate([rows, rows]),
        np.concatenate([cols_i, cols_j]),
        np.concatenate([np.ones(3 * n_edges), -np.ones(3 * n_edges)]),
    )
    b = np.zeros(4 * n_edges)
    b[0::4] = delta
    layout = cones_mod.ConeLayout(tuple(("soc", 4) for _ in range(n_edges)))
    return ConicProblem(P=P, c=c, A=A, b=b, cones=layout)


def closed_form_oracle(mu, x_ref, lam):
    """Unconstrained optimum ``(mu + lam x_ref_i) / (1 + lam)`` per row.

    This is the exact solution of the full program whenever its own edge
    lengths are all <= delta (the cone constraints are then slack).
    """
    mu = np.asarray(mu, dtype=np.float64).reshape(3)
    x_ref = np.asarray(x_ref, dtype=np.float64)
    return (mu[None, :] + lam * x_ref) / (1.0 + lam)


_IDENTITY = Transform(center=np.zeros(3), scale=1.0)


def refine(deformed, target, config=None):
    """Correct ``deformed`` toward ``target``; returns a :class:`RefineOutcome`.

    Steps: (1) normalize both meshes to the unit sphere (skipped when
    ``config.normalize`` is false), (2) sample the target surface and take
    the centroid mu, (3) pick the anchor (target vertices on matching
    counts, else the deformed vertices), (4) assemble the cone program,
    (5) solve with a warm start from the deformed positions, (6) un-flatten
    into a mesh with the deformed connectivity, (7) re-normalize the result
    to the unit sphere (the presentation convention; skipped together with
    step 1). Deterministic for fixed inputs and seed.
    """
    if config is None:
        config = RefineConfig()
    if config.normalize:
        d_mesh, t_d = normalize_unit_sphere(deformed)
        t_mesh, t_t = normalize_unit_sphere(target)
    else:
        d_mesh, t_d = deformed, _IDENTITY
        t_mesh, t_t = target, _IDENTITY

    samples = sample_surface(t_mesh, config.sample_count, config.seed)
    mu = centroid(samples)
    x_ref, source = choose_reference(d_mesh, t_mesh)
    problem = build_program(d_mesh, mu, x_ref, config)

    x0 = d_mesh.vertices.ravel()
    y0 = np.zeros(problem.m)
    z0 = cones_mod.project(problem.cones, problem.b - sparse.spmv(problem.A, x0))
    result = solve(problem, config.solver, warm=(x0, y0, z0))

    refined = deformed.with_vertices(result.x.reshape(-1, 3))
    t_r = _IDENTITY
    if config.normalize:
        refined, t_r = normalize_unit_sphere(refined)

    return RefineOutcome(
        refined=refined,
        solver_result=result,
        x_ref_source=source,
        mu=mu,
        x_ref=x_ref,
        transform_applied={"deformed": t_d, "target": t_t, "refined": t_r},
    )
