"""Deterministic procedural meshes used by tests, demos and the benchmark."""

import numpy as np

from .mesh import TriMesh

# icosahedron with circumscribed unit sphere
_PHI = (1.0 + np.sqrt(5.0)) / 2.0
_ICO_VERTS = np.array(
    [
        (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
        (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
        (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1),
    ],
    dtype=np.float64,
)
_ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)


def icosphere(subdivisions=2, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Icosahedron subdivided ``subdivisions`` times, projected to a sphere.

    Vertex count is ``10 * 4**subdivisions + 2`` (12, 42, 162, 642, 2562,
    10242, ...). Deterministic: same arguments, same arrays.
    """
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    verts = list(_ICO_VERTS / np.linalg.norm(_ICO_VERTS, axis=1, keepdims=True))
    faces = [tuple(f) for f in _ICO_FACES]
    for _ in range(subdivisions):
        midpoint = {}

        def split(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in midpoint:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                verts.append(m)
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = split(a, b), split(b, c), split(c, a)
            new_faces += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        faces = new_faces
    v = np.asarray(verts) * radius + np.asarray(center, dtype=np.float64)
    return TriMesh(v, np.asarray(faces, dtype=np.int64), closed_manifold=True)


def cube(size=1.0, center=(0.0, 0.0, 0.0)):
    """Axis-aligned cube surface: 8 vertices, 12 triangles, outward winding."""
    h = size / 2.0
    corners = np.array(
        [(x, y, z) for x in (-h, h) for y in (-h, h) for z in (-h, h)],
        dtype=np.float64,
    ) + np.asarray(center, dtype=np.float64)
    # index bit layout: x*4 + y*2 + z
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    faces = []
    for a, b, c, d in quads:
        faces += [(a, b, c), (a, c, d)]
    return TriMesh(corners, np.asarray(faces, dtype=np.int64), closed_manifold=True)


def torus(major_radius=1.0, minor_radius=0.4, n_major=24, n_minor=12):
    """Triangulated torus around the z axis.

    Closed (every edge borders two faces) but genus 1, so it is *not*
    flagged ``closed_manifold`` — that flag asserts the sphere-topology
    Euler count ``V - E + F = 2``.
    """
    if n_major < 3 or n_minor < 3:
        raise ValueError("need at least 3 segments in each direction")
    u = 2.0 * np.pi * np.arange(n_major) / n_major
    v = 2.0 * np.pi * np.arange(n_minor) / n_minor
    uu, vv = np.meshgrid(u, v, indexing="ij")
    r = major_radius + minor_radius * np.cos(vv)
    verts = np.stack(
        [r * np.cos(uu), r * np.sin(uu), minor_radius * np.sin(vv)], axis=-1
    ).reshape(-1, 3)
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, np.asarray(faces, dtype=np.int64))


def grid(nx=8, ny=8, spacing=1.0):
    """Flat open grid in the z=0 plane with consistent +z winding."""
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2x2 vertices")
    xs = spacing * np.arange(nx)
    ys = spacing * np.arange(ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([xx, yy, np.zeros_like(xx)], axis=-1).reshape(-1, 3)
    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j
            b = (i + 1) * ny + j
            c = (i + 1) * ny + j + 1
            d = i * ny + j + 1
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, np.asarray(faces, dtype=np.int64))


def ellipsoid(subdivisions=2, radii=(1.0, 0.7, 0.5), center=(0.0, 0.0, 0.0)):
    """Icosphere scaled per axis."""
    base = icosphere(subdivisions)
    v = base.vertices * np.asarray(radii, dtype=np.float64) + np.asarray(center)
    return base.with_vertices(v)


def bumpy_sphere(subdivisions=3, amplitude=0.25, frequency=3.0):
    """Unit sphere with a smooth deterministic radial perturbation.

    Same topology as :func:`icosphere`, so it pairs with one of equal
    subdivision level for equal-vertex-count experiments.
    """
    base = icosphere(subdivisions)
    d = base.vertices
    bump = (
        np.sin(frequency * d[:, 0])
        * np.sin(frequency * d[:, 1] + 1.3)
        * np.sin(frequency * d[:, 2] + 2.1)
    )
    r = 1.0 + amplitude * bump
    return base.with_vertices(d * r[:, None])
