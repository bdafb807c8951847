"""
What the two knobs actually do
==============================

The program has exactly two parameters: the edge-length bound delta and
the anchor weight lambda. Sweep each on small meshes and watch the
solver's behavior flip between regimes.
"""

import numpy as np

from meshcone import (
    DeformConfig,
    RefineConfig,
    compute_report,
    gen_deformed,
    normalize_unit_sphere,
    refine,
)
from meshcone.primitives import bumpy_sphere

# Coarse pair: 42 vertices, so the normalized edges are long (~0.55) and
# small deltas genuinely constrain the solution.
target = bumpy_sphere(1, amplitude=0.25, frequency=2.0)
deformed = gen_deformed(target, DeformConfig(subdivisions=1, iterations=6))
target_unit, _ = normalize_unit_sphere(target)

# --- delta sweep -------------------------------------------------------
# At lambda = 0.1 the unconstrained solution is a uniform shrink of the
# anchors by lambda/(1+lambda) ~ 0.09, so shrunken edges are ~0.05: a
# bound of 0.5 is slack (fast solve, exact shape recovery after
# renormalization), 0.05 clips the longest edges, and 0.005 crushes the
# mesh (many more iterations, geometry destroyed).
print("delta    iterations   hausdorff   max edge (solved frame)")
for delta in (0.5, 0.05, 0.005):
    outcome = refine(deformed, target, RefineConfig(lam=0.1, delta=delta))
    x = outcome.solver_result.x.reshape(-1, 3)
    e = deformed.edges
    longest = np.linalg.norm(x[e[:, 0]] - x[e[:, 1]], axis=1).max()
    report = compute_report(outcome.refined, target_unit, sample_count=4000,
                            seed=0, metrics=("hd",))
    print(f"{delta:<9}{outcome.solver_result.iterations:<13d}"
          f"{report.hd:<12.4f}{longest:.4f}")

# --- lambda sweep ------------------------------------------------------
# Lambda barely matters when delta is slack: the solution is
# (mu + lambda * anchor) / (1 + lambda), a uniform shrink toward the
# sampled centroid, and the final renormalization undoes uniform shrinks.
# Normal consistency is therefore nearly flat across two decades.
finer = bumpy_sphere(3, amplitude=0.2, frequency=3.0)
finer_deformed = gen_deformed(finer, DeformConfig(subdivisions=3, iterations=6))
finer_unit, _ = normalize_unit_sphere(finer)
print("\nlambda   iterations   normal consistency")
for lam in (0.001, 0.01, 0.1):
    outcome = refine(finer_deformed, finer, RefineConfig(lam=lam, delta=0.5))
    report = compute_report(outcome.refined, finer_unit, sample_count=4000,
                            seed=0, metrics=("nc",))
    print(f"{lam:<9}{outcome.solver_result.iterations:<13d}{report.nc:.5f}")
