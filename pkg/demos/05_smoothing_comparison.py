"""
Convex correction vs. Laplacian smoothing
=========================================

The classic cheap fix for a lumpy mesh is umbrella smoothing. It removes
noise but shrinks the shape and ignores the target entirely. The convex
correction uses the target twice (sampled centroid + anchors) and keeps
a hard cap on edge lengths. Run both on the same input and compare.
"""

import numpy as np

from meshcone import (
    DeformConfig,
    RefineConfig,
    SmoothConfig,
    compute_report,
    gen_deformed,
    laplacian_smooth,
    normalize_unit_sphere,
    refine,
)
from meshcone.primitives import ellipsoid

target = ellipsoid(3, radii=(1.0, 0.65, 0.45))
deformed = gen_deformed(target, DeformConfig(subdivisions=3, iterations=6))
target_unit, _ = normalize_unit_sphere(target)

# Contestant 1: umbrella smoothing (10 iterations, step 0.5). Note the
# shrinkage: the mean radius drops with every pass.
smoothed = laplacian_smooth(deformed, SmoothConfig(step=0.5, iterations=10))
r_before = np.linalg.norm(deformed.vertices - deformed.vertices.mean(0), axis=1).mean()
r_after = np.linalg.norm(smoothed.vertices - smoothed.vertices.mean(0), axis=1).mean()
print(f"smoothing shrank the mean radius {r_before:.3f} -> {r_after:.3f}")
smoothed_unit, _ = normalize_unit_sphere(smoothed)

# Contestant 2: the convex correction.
outcome = refine(deformed, target, RefineConfig())
print(f"refine: {outcome.solver_result.status} in "
      f"{outcome.solver_result.iterations} iterations")

deformed_unit, _ = normalize_unit_sphere(deformed)
rows = [
    ("deformed input", deformed_unit),
    ("laplacian smoothed", smoothed_unit),
    ("convex corrected", outcome.refined),
]
print(f"\n{'mesh':<22}{'chamfer':>10}{'hausdorff':>11}{'normals':>9}")
for label, mesh in rows:
    rep = compute_report(mesh, target_unit, sample_count=4000, seed=0,
                         metrics=("cd", "hd", "nc"))
    print(f"{label:<22}{rep.cd:>10.4f}{rep.hd:>11.4f}{rep.nc:>9.4f}")

# Smoothing loses on every column here: it erases the detail the input
# had already acquired and its shrinkage distorts the shape. The
# correction wins because the target anchors enter the objective
# directly.
