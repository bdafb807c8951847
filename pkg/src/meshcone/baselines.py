"""Reference baselines: Laplacian smoothing and synthetic deformed inputs."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeshError
from .mesh import TriMesh, centroid, normalize_unit_sphere, sample_surface
from .primitives import icosphere
from .spatial import KdIndex


@dataclass(frozen=True)
class SmoothConfig:
    step: float = 0.5
    iterations: int = 10

    def __post_init__(self):
        if not 0.0 < self.step <= 1.0:
            raise ValueError(f"step must lie in (0, 1], got {self.step}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


def _neighbor_means(vertices, edges, degrees):
    acc = np.zeros_like(vertices)
    np.add.at(acc, edges[:, 0], vertices[edges[:, 1]])
    np.add.at(acc, edges[:, 1], vertices[edges[:, 0]])
    return acc / degrees[:, None]


def laplacian_smooth(mesh, config=None):
    """Jacobi umbrella smoothing: ``v += step (mean of neighbors - v)``.

    All updates in an iteration read the previous iteration's positions.
    Raises ``DegenerateMeshError`` if any vertex has no neighbors.
    """
    if config is None:
        config = SmoothConfig()
    edges = mesh.edges
    degrees = np.zeros(mesh.n_vertices)
    np.add.at(degrees, edges.ravel(), 1.0)
    if (degrees == 0).any():
        bad = int(np.flatnonzero(degrees == 0)[0])
        raise DegenerateMeshError(f"vertex {bad} is isolated; cannot smooth")
    v = mesh.vertices.copy()
    for _ in range(config.iterations):
        v = v + config.step * (_neighbor_means(v, edges, degrees) - v)
    return mesh.with_vertices(v)


@dataclass(frozen=True)
class DeformConfig:
    subdivisions: int = 4
    attract_step: float = 0.3
    smooth_step: float = 0.2
    iterations: int = 15
    seed: int = 0
    sample_factor: int = 10

    def __post_init__(self):
        if self.subdivisions < 0:
            raise ValueError("subdivisions must be >= 0")
        if not 0.0 < self.attract_step <= 1.0:
            raise ValueError(f"attract_step must lie in (0, 1], got {self.attract_step}")
        if not 0.0 <= self.smooth_step <= 1.0:
            raise ValueError(f"smooth_step must lie in [0, 1], got {self.smooth_step}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.sample_factor < 1:
            raise ValueError("sample_factor must be >= 1")


def gen_deformed(target, config=None):
    """Partially deform a unit icosphere toward a target surface.

    The target is normalized to the unit sphere and sampled (10x the
    sphere's vertex count by default); the sphere starts centered at the
    sample centroid with unit radius, then alternates a step toward each
    vertex's nearest sample with one umbrella smoothing pass. Few
    iterations leave it blobby on purpose — it plays the "deformed input
    mesh" role for the refinement pipeline. Deterministic given the seed.
    """
    if config is None:
        config = DeformConfig()
    t_norm, _ = normalize_unit_sphere(target)
    sphere = icosphere(config.subdivisions)
    samples = sample_surface(
        t_norm, config.sample_factor * sphere.n_vertices, config.seed
    )
    mu = centroid(samples)
    index = KdIndex.build(samples.points)

    edges = sphere.edges
    degrees = np.zeros(sphere.n_vertices)
    np.add.at(degrees, edges.ravel(), 1.0)

    v = sphere.vertices + mu
    for _ in range(config.iterations):
        idx, _ = index.nearest_many(v)
        v = v + config.attract_step * (samples.points[idx] - v)
        v = v + config.smooth_step * (_neighbor_means(v, edges, degrees) - v)
    return TriMesh(v, sphere.faces)
