"""Geometric error metrics between meshes / sampled point sets.

Conventions (each matters for comparing numbers across papers):

- ``chamfer``: *squared* distances, mean in both directions, summed.
- ``emd``: exact optimal assignment (equal-size sets), mean *unsquared*
  matched distance. Cost grows as N^3, so N is capped at 4096.
- ``hausdorff``: symmetric max-min, unsquared.
- ``normal_consistency``: mean |cos| of normals at nearest neighbors,
  averaged over both directions.
- ``curvature_error``: mean |H_pred(i) - H_gt(nn(i))| over pred vertices.
- ``aspect_ratio``: mean over faces of circumradius/(2 inradius); 1.0 for
  equilateral.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import DegenerateMeshError, DimensionError
from .mesh import PointSample, _boundary_vertices, mean_curvature, sample_surface
from .spatial import KdIndex

EMD_MAX_POINTS = 4096


def _points_of(obj):
    if isinstance(obj, PointSample):
        return obj.points
    pts = np.asarray(obj, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected PointSample or (N, 3) array, got shape {pts.shape}")
    return pts


def chamfer(a, b):
    """Squared bidirectional Chamfer distance between two point sets."""
    pa, pb = _points_of(a), _points_of(b)
    _, d_ab = KdIndex.build(pb).nearest_many(pa)
    _, d_ba = KdIndex.build(pa).nearest_many(pb)
    return float((d_ab**2).mean() + (d_ba**2).mean())


def emd(a, b):
    """Exact earth mover's distance (optimal assignment, mean distance).

    Requires equal-size sets of at most 4096 points; subsample first for
    larger inputs.
    """
    pa, pb = _points_of(a), _points_of(b)
    if len(pa) != len(pb):
        raise DimensionError(
            f"emd needs equal-size sets, got {len(pa)} and {len(pb)}"
        )
    if len(pa) > EMD_MAX_POINTS:
        raise ValueError(
            f"emd limited to {EMD_MAX_POINTS} points (got {len(pa)}); "
            "subsample the inputs first"
        )
    cost = cdist(pa, pb)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


def hausdorff(a, b):
    """Symmetric Hausdorff distance (unsquared max of directed max-mins)."""
    pa, pb = _points_of(a), _points_of(b)
    _, d_ab = KdIndex.build(pb).nearest_many(pa)
    _, d_ba = KdIndex.build(pa).nearest_many(pb)
    return float(max(d_ab.max(), d_ba.max()))


def normal_consistency(a, b):
    """Mean |cos| between normals at nearest neighbors, both directions."""
    if not isinstance(a, PointSample) or not isinstance(b, PointSample):
        raise ValueError("normal_consistency needs PointSample inputs")
    if a.normals is None or b.normals is None:
        raise ValueError("both samples must carry normals")
    idx_ab, _ = KdIndex.build(b.points).nearest_many(a.points)
    idx_ba, _ = KdIndex.build(a.points).nearest_many(b.points)
    fwd = np.abs(np.einsum("ij,ij->i", a.normals, b.normals[idx_ab])).mean()
    bwd = np.abs(np.einsum("ij,ij->i", b.normals, a.normals[idx_ba])).mean()
    return float((fwd + bwd) / 2.0)


def curvature_error(pred_mesh, gt_mesh):
    """Mean |H_pred(i) - H_gt(nn(i))| over the predicted mesh's vertices.

    Both meshes must be closed (the curvature formula needs full fans).
    """
    for name, mesh in (("pred", pred_mesh), ("gt", gt_mesh)):
        if _boundary_vertices(mesh.faces, mesh.n_vertices).any():
            raise ValueError(f"curvature_error needs closed meshes; {name} has a boundary")
    h_pred = mean_curvature(pred_mesh)
    h_gt = mean_curvature(gt_mesh)
    idx, _ = KdIndex.build(gt_mesh.vertices).nearest_many(pred_mesh.vertices)
    return float(np.abs(h_pred - h_gt[idx]).mean())


def aspect_ratio(mesh):
    """Mean circumradius/(2 inradius) over faces; 1.0 means equilateral.

    Raises ``DegenerateMeshError`` (naming the face) if any face has area
    <= 1e-12.
    """
    v, f = mesh.vertices, mesh.faces
    ea = np.linalg.norm(v[f[:, 1]] - v[f[:, 2]], axis=1)
    eb = np.linalg.norm(v[f[:, 2]] - v[f[:, 0]], axis=1)
    ec = np.linalg.norm(v[f[:, 0]] - v[f[:, 1]], axis=1)
    s = 0.5 * (ea + eb + ec)
    area = 0.5 * np.linalg.norm(
        np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]), axis=1
    )
    bad = area <= 1e-12
    if bad.any():
        raise DegenerateMeshError(
            f"face {int(np.flatnonzero(bad)[0])} is degenerate (area <= 1e-12)"
        )
    # R/(2r) with R = abc/(4K), r = K/s  ->  abc * s / (8 K^2)
    ratio = ea * eb * ec * s / (8.0 * area**2)
    return float(ratio.mean())


@dataclass(frozen=True)
class MetricsReport:
    """Computed metric values plus the sampling parameters that shaped them."""

    cd: float = None
    emd: float = None
    hd: float = None
    nc: float = None
    ce: float = None
    ar: float = None
    sample_count: int = 0
    seed: int = 0
    emd_subsampled_to: int = None

    def to_json(self):
        out = {}
        for key in ("cd", "emd", "hd", "nc", "ce", "ar"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        out["sample_count"] = self.sample_count
        out["seed"] = self.seed
        if self.emd_subsampled_to is not None:
            out["warning"] = (
                f"emd subsampled to {self.emd_subsampled_to} of "
                f"{self.sample_count} points"
            )
        return json.dumps(out)


ALL_METRICS = ("cd", "emd", "hd", "nc", "ce", "ar")


def compute_report(pred_mesh, gt_mesh, sample_count=5000, seed=0, metrics=ALL_METRICS):
    """Sample both meshes once and evaluate the requested metrics.

    Both surfaces are sampled with the same seed, so identical meshes yield
    identical samples (and exact zeros / ones). EMD silently subsamples to
    4096 points when ``sample_count`` exceeds the cap, recording that in
    the report.
    """
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ValueError(f"unknown metrics {unknown}; choose from {ALL_METRICS}")
    sample_based = {"cd", "emd", "hd", "nc"} & set(metrics)
    values = {}
    emd_cap = None
    if sample_based:
        sp = sample_surface(pred_mesh, sample_count, seed)
        sg = sample_surface(gt_mesh, sample_count, seed)
        if "cd" in metrics:
            values["cd"] = chamfer(sp, sg)
        if "hd" in metrics:
            values["hd"] = hausdorff(sp, sg)
        if "nc" in metrics:
            values["nc"] = normal_consistency(sp, sg)
        if "emd" in metrics:
            if sample_count > EMD_MAX_POINTS:
                emd_cap = EMD_MAX_POINTS
                values["emd"] = emd(
                    sp.points[:EMD_MAX_POINTS], sg.points[:EMD_MAX_POINTS]
                )
                warnings.warn(
                    f"emd subsampled to {EMD_MAX_POINTS} points", RuntimeWarning,
                    stacklevel=2,
                )
            else:
                values["emd"] = emd(sp, sg)
    if "ce" in metrics:
        values["ce"] = curvature_error(pred_mesh, gt_mesh)
    if "ar" in metrics:
        values["ar"] = aspect_ratio(pred_mesh)
    return MetricsReport(
        sample_count=sample_count, seed=seed, emd_subsampled_to=emd_cap, **values
    )
