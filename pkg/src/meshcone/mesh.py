"""Triangle meshes, OBJ I/O, sampling, normals and discrete curvature.

Vertices are float64 ``(n, 3)`` arrays, faces int64 ``(F, 3)`` arrays of
vertex indices. Meshes are immutable after construction: operations return
new objects instead of mutating in place.
"""

import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateMeshError,
    EmptyMeshError,
    FaceIndexError,
    ObjParseError,
)

_COT_CLAMP = 1.0e4


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


class TriMesh:
    """An indexed triangle mesh.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Vertex positions.
    faces : array_like, shape (F, 3)
        Vertex indices, zero-based.
    closed_manifold : bool
        If true, the Euler characteristic check ``V - E + F == 2`` is
        enforced at construction time.
    """

    def __init__(self, vertices, faces, closed_manifold=False):
        v = np.asarray(vertices, dtype=np.float64)
        f = np.asarray(faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (n, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must be (F, 3), got {f.shape}")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise FaceIndexError(
                f"face indices must lie in [0, {len(v) - 1}]"
            )
        if f.size:
            repeated = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
            if repeated.any():
                bad = int(np.flatnonzero(repeated)[0])
                raise ValueError(f"face {bad} repeats a vertex: {f[bad].tolist()}")
        self.vertices = _readonly(v)
        self.faces = _readonly(f)
        if closed_manifold:
            chi = len(self.vertices) - len(self.edges) + len(self.faces)
            if chi != 2:
                raise ValueError(
                    f"mesh flagged closed-manifold has Euler characteristic {chi} != 2"
                )

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def edges(self):
        """Unique undirected edges as a sorted (E, 2) int64 array with i < j."""
        return extract_edges(self.faces)

    def with_vertices(self, vertices):
        """Same connectivity, new vertex positions."""
        return TriMesh(vertices, self.faces)

    def __repr__(self):
        return f"TriMesh({self.n_vertices} vertices, {self.n_faces} faces)"


@dataclass(frozen=True)
class Transform:
    """The similarity transform removed by :func:`normalize_unit_sphere`.

    ``apply`` maps original coordinates to normalized ones,
    ``invert`` maps back: ``invert(apply(p)) == p``.
    """

    center: np.ndarray
    scale: float

    def apply(self, points):
        return (np.asarray(points, dtype=np.float64) - self.center) / self.scale

    def invert(self, points):
        return np.asarray(points, dtype=np.float64) * self.scale + self.center


@dataclass(frozen=True)
class PointSample:
    """Points sampled from a mesh surface.

    ``points`` is (N, 3); ``normals`` is (N, 3) unit face normals or None;
    ``source_face`` is the face index each point was drawn from.
    """

    points: np.ndarray
    normals: np.ndarray = None
    source_face: np.ndarray = None

    def __post_init__(self):
        pts = _readonly(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 1:
            raise ValueError(f"points must be (N>=1, 3), got {pts.shape}")
        object.__setattr__(self, "points", pts)
        if self.normals is not None:
            nrm = _readonly(np.asarray(self.normals, dtype=np.float64))
            if nrm.shape != pts.shape:
                raise ValueError("normals must match points shape")
            lengths = np.linalg.norm(nrm, axis=1)
            if np.abs(lengths - 1.0).max() > 1e-6:
                raise ValueError("normals must be unit length within 1e-6")
            object.__setattr__(self, "normals", nrm)
        if self.source_face is not None:
            object.__setattr__(
                self, "source_face", _readonly(np.asarray(self.source_face, dtype=np.int64))
            )

    @property
    def n_points(self):
        return len(self.points)


def load_obj(path):
    """Read a Wavefront OBJ file into a :class:`TriMesh`.

    Only ``v`` and ``f`` records are interpreted; normals, texture
    coordinates, groups and materials are ignored. Polygonal faces are
    fan-triangulated, ``i/j/k`` index tuples keep the vertex index, and
    negative indices resolve relative to the vertex count so far.

    Raises
    ------
    ObjParseError
        On a malformed record (carries the 1-based line number).
    FaceIndexError
        When a face references a vertex that does not exist.
    EmptyMeshError
        When the file defines no vertices or no faces.
    """
    vertices = []
    faces = []
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ObjParseError(lineno, f"vertex needs 3 coordinates: {raw!r}")
            try:
                vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError:
                raise ObjParseError(lineno, f"bad vertex coordinate: {raw!r}") from None
        elif tag == "f":
            if len(parts) < 4:
                raise ObjParseError(lineno, f"face needs >=3 vertices: {raw!r}")
            idx = []
            for token in parts[1:]:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ObjParseError(lineno, f"bad face index {token!r}") from None
                if i < 0:
                    i = len(vertices) + 1 + i
                if i < 1 or i > len(vertices):
                    raise FaceIndexError(
                        f"line {lineno}: face index {token!r} out of range "
                        f"(have {len(vertices)} vertices)"
                    )
                idx.append(i - 1)
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
        # every other record type is ignored
    if not vertices or not faces:
        raise EmptyMeshError(f"{path}: no vertices or no faces")
    return TriMesh(vertices, faces)


def save_obj(mesh, path):
    """Write ``mesh`` to ``path`` in OBJ format.

    Coordinates are written with 12 significant digits so a save/load round
    trip preserves positions to well below 1e-9.
    """
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {x:.12g} {y:.12g} {z:.12g}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def extract_edges(faces):
    """Unique undirected edges of a face array, sorted lexicographically.

    Each row is ``(i, j)`` with ``i < j``.
    """
    f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if f.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [0, 2]]])
    e.sort(axis=1)
    return np.unique(e, axis=0)


def normalize_unit_sphere(mesh):
    """Center a mesh on its vertex mean and scale it into the unit sphere.

    Returns ``(normalized_mesh, transform)`` where ``transform`` undoes the
    normalization. The scale is ``max_i ||v_i - center||``, so the result has
    vertex mean 0 and max radius exactly 1; applying the function twice is
    the identity (up to float eps).

    Raises
    ------
    DegenerateMeshError
        If all vertices coincide (zero extent).
    """
    v = mesh.vertices
    center = v.mean(axis=0)
    radii = np.linalg.norm(v - center, axis=1)
    scale = float(radii.max())
    if scale < 1e-300:
        raise DegenerateMeshError("all vertices coincide; cannot normalize")
    t = Transform(center=_readonly(center.copy()), scale=scale)
    return mesh.with_vertices((v - center) / scale), t


def _face_areas_normals(vertices, faces):
    a = vertices[faces[:, 0]]
    cross = np.cross(vertices[faces[:, 1]] - a, vertices[faces[:, 2]] - a)
    double_area = np.linalg.norm(cross, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        normals = np.where(double_area[:, None] > 0, cross / double_area[:, None], 0.0)
    return 0.5 * double_area, normals


def sample_surface(mesh, count, seed):
    """Draw ``count`` points uniformly by area from the mesh surface.

    Faces are chosen with probability proportional to area; positions use
    the square-root barycentric trick, so the density is uniform on the
    surface. Each point carries the unit normal of its source face. The
    result is a deterministic function of ``(mesh, count, seed)``.

    Raises
    ------
    DegenerateMeshError
        If the total surface area is zero.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    areas, face_normals = _face_areas_normals(mesh.vertices, mesh.faces)
    total = areas.sum()
    if total <= 0.0:
        raise DegenerateMeshError("mesh has zero total surface area")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(areas), size=count, p=areas / total)
    r1 = rng.random(count)
    r2 = rng.random(count)
    sq = np.sqrt(r1)
    w0 = 1.0 - sq
    w1 = sq * (1.0 - r2)
    w2 = sq * r2
    tri = mesh.vertices[mesh.faces[chosen]]
    points = w0[:, None] * tri[:, 0] + w1[:, None] * tri[:, 1] + w2[:, None] * tri[:, 2]
    return PointSample(points=points, normals=face_normals[chosen], source_face=chosen)


def centroid(sample):
    """Mean of the sampled points (the mu of the refinement objective)."""
    return sample.points.mean(axis=0)


def vertex_normals(mesh):
    """Area-weighted vertex normals, shape (n, 3).

    Summing raw face cross products is exactly area weighting. Vertices with
    no incident non-degenerate face get the zero vector and trigger a
    warning (they cannot be oriented).
    """
    v, f = mesh.vertices, mesh.faces
    a = v[f[:, 0]]
    cross = np.cross(v[f[:, 1]] - a, v[f[:, 2]] - a)
    acc = np.zeros_like(v)
    for col in range(3):
        np.add.at(acc, f[:, col], cross)
    lengths = np.linalg.norm(acc, axis=1)
    flat = lengths <= 1e-300
    if flat.any():
        warnings.warn(
            f"{int(flat.sum())} vertex normals undefined (isolated or degenerate); set to zero",
            RuntimeWarning,
            stacklevel=2,
        )
    safe = np.where(flat, 1.0, lengths)
    out = acc / safe[:, None]
    out[flat] = 0.0
    return out


def _boundary_vertices(faces, n_vertices):
    f = np.asarray(faces, dtype=np.int64)
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [0, 2]]])
    e.sort(axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    boundary_edges = uniq[counts == 1]
    mask = np.zeros(n_vertices, dtype=bool)
    mask[boundary_edges.ravel()] = True
    return mask


def mean_curvature(mesh):
    """Per-vertex mean curvature magnitude via the cotangent Laplacian.

    ``H_i = ||sum_j (cot a_ij + cot b_ij) (v_j - v_i)|| / (4 A_mixed(i))``
    with mixed Voronoi areas (obtuse triangles fall back to area/2 at the
    obtuse corner, area/4 elsewhere) and cotangents clamped to ±1e4.

    Boundary vertices (an incident edge with only one face) get ``H = 0``
    and a warning; the formula needs a closed fan to mean anything there.
    """
    v, f = mesh.vertices, mesh.faces
    n = len(v)
    p0, p1, p2 = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]

    def corner_cot(a, b, c):
        # cot of the angle at a, between edges (b - a) and (c - a)
        u, w = b - a, c - a
        cross = np.linalg.norm(np.cross(u, w), axis=1)
        dot = np.einsum("ij,ij->i", u, w)
        with np.errstate(invalid="ignore", divide="ignore"):
            cot = np.where(cross > 1e-300, dot / np.where(cross > 1e-300, cross, 1.0), 0.0)
        return np.clip(cot, -_COT_CLAMP, _COT_CLAMP)

    cot0 = corner_cot(p0, p1, p2)
    cot1 = corner_cot(p1, p2, p0)
    cot2 = corner_cot(p2, p0, p1)

    acc = np.zeros_like(v)
    # corner k contributes its cot to the opposite edge (i, j)
    for cot, i_col, j_col in ((cot0, 1, 2), (cot1, 2, 0), (cot2, 0, 1)):
        vi, vj = f[:, i_col], f[:, j_col]
        d = v[vj] - v[vi]
        np.add.at(acc, vi, cot[:, None] * d)
        np.add.at(acc, vj, -cot[:, None] * d)

    # mixed Voronoi areas (Meyer et al. rule)
    area = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
    l0 = np.einsum("ij,ij->i", p2 - p1, p2 - p1)  # edge opposite corner 0
    l1 = np.einsum("ij,ij->i", p0 - p2, p0 - p2)
    l2 = np.einsum("ij,ij->i", p1 - p0, p1 - p0)
    obtuse0 = cot0 < 0
    obtuse1 = cot1 < 0
    obtuse2 = cot2 < 0
    any_obtuse = obtuse0 | obtuse1 | obtuse2
    # non-obtuse: Voronoi area at corner 0 = (l1*cot1 + l2*cot2)/8, cyclic
    vor0 = (l1 * cot1 + l2 * cot2) / 8.0
    vor1 = (l2 * cot2 + l0 * cot0) / 8.0
    vor2 = (l0 * cot0 + l1 * cot1) / 8.0
    a_at = np.empty((len(f), 3))
    for k, (vor, obt) in enumerate(((vor0, obtuse0), (vor1, obtuse1), (vor2, obtuse2))):
        a_at[:, k] = np.where(any_obtuse, np.where(obt, area / 2.0, area / 4.0), vor)
    a_mixed = np.zeros(n)
    for col in range(3):
        np.add.at(a_mixed, f[:, col], a_at[:, col])

    boundary = _boundary_vertices(f, n)
    if boundary.any():
        warnings.warn(
            f"{int(boundary.sum())} boundary vertices: curvature set to 0 there",
            RuntimeWarning,
            stacklevel=2,
        )
    safe = np.where(a_mixed > 1e-300, a_mixed, 1.0)
    h = np.linalg.norm(acc, axis=1) / (4.0 * safe)
    h[a_mixed <= 1e-300] = 0.0
    h[boundary] = 0.0
    return h
