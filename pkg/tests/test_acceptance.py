"""End-to-end acceptance gates for the whole package.

Each test is one gate and prints a single ``[criterion NN] ...`` summary
line (shown with ``pytest -s`` or in the captured-output section), so a
verbose run reads as a ten-line pass/fail report:

    pytest tests/test_acceptance.py -v

The gates, in order: (1) solver matches the closed-form optimum on a
randomized mesh roster, (2) the hand-solvable two-vertex instance, (3)
termination quality on the synthetic pair suite, (4) refinement strictly
improves Hausdorff distance and normal consistency, (5) the edge-bound
sweep reproduces the expected orderings, (6) the anchor weight barely
moves normal consistency, (7) solver/cone/factorization property suite,
(8) metric sanity against exhaustive references, (9) a 10k-vertex refine
inside the time budget, (10) the documented limits of desk-scale data.
"""

import itertools
import time

import numpy as np
import pytest
from helpers import random_socp, residual_series
from test_sparse import random_quasidefinite
from test_spatial import brute_nearest

from meshcone import (
    DeformConfig,
    RefineConfig,
    SolverSettings,
    build_edge_program,
    chamfer,
    closed_form_oracle,
    compute_report,
    emd,
    gen_deformed,
    hausdorff,
    normal_consistency,
    normalize_unit_sphere,
    refine,
    sample_surface,
    sparse,
)
from meshcone.cones import ConeLayout, dual_layout, project
from meshcone.primitives import bumpy_sphere, cube, ellipsoid, icosphere, torus
from meshcone.solver import solve
from meshcone.spatial import KdIndex

DELTA = 0.5


# ----------------------------------------------------------- shared suites


def _mesh_roster():
    """20 randomized unit-scale meshes: icosphere, torus and cube variants."""
    rng = np.random.default_rng(20260819)
    cases = []
    for k in range(8):
        kind = k % 3
        if kind == 0:
            m = icosphere(2 + k % 2, radius=float(rng.uniform(0.5, 3.0)),
                          center=rng.uniform(-2, 2, 3))
        elif kind == 1:
            m = bumpy_sphere(2 + k % 2, amplitude=float(rng.uniform(0.1, 0.3)),
                             frequency=float(rng.uniform(2.0, 4.0)))
        else:
            m = ellipsoid(2 + k % 2, radii=tuple(rng.uniform(0.4, 1.0, 3)))
        cases.append(m)
    for _ in range(6):
        cases.append(torus(minor_radius=float(rng.uniform(0.2, 0.6)),
                           n_major=int(rng.integers(16, 37)),
                           n_minor=int(rng.integers(8, 19))))
    for _ in range(6):
        cases.append(cube(size=float(rng.uniform(0.5, 4.0)),
                          center=rng.uniform(-3, 3, 3)))
    order = rng.permutation(len(cases))
    return [cases[i] for i in order]


@pytest.fixture(scope="module")
def matched_pairs():
    """Synthetic deformed/target pairs with equal vertex counts (642)."""
    targets = [
        bumpy_sphere(3, amplitude=0.2, frequency=3.0),
        ellipsoid(3, radii=(1.0, 0.65, 0.45)),
        bumpy_sphere(3, amplitude=0.15, frequency=4.0),
        ellipsoid(3, radii=(0.9, 0.8, 0.5)),
    ]
    return [
        (gen_deformed(t, DeformConfig(subdivisions=3, iterations=6, seed=i)), t)
        for i, t in enumerate(targets)
    ]


@pytest.fixture(scope="module")
def coarse_pairs():
    """Equal-count pairs on coarse meshes (42 vertices) whose edge lengths
    make the edge bound actually bind for small delta."""
    targets = [
        bumpy_sphere(1, amplitude=0.25, frequency=2.0),
        bumpy_sphere(1, amplitude=0.2, frequency=3.0),
        bumpy_sphere(1, amplitude=0.3, frequency=2.5),
    ]
    return [
        (gen_deformed(t, DeformConfig(subdivisions=1, iterations=6, seed=i)), t)
        for i, t in enumerate(targets)
    ]


@pytest.fixture(scope="module")
def mismatched_pairs():
    """Pairs with different vertex counts (anchor falls back to the
    deformed mesh's own vertices)."""
    tor = torus()
    return [
        (ellipsoid(2, radii=(1.0, 0.55, 0.4)), bumpy_sphere(3, amplitude=0.2, frequency=3.0)),
        (icosphere(2), ellipsoid(3, radii=(1.0, 0.6, 0.5))),
        (gen_deformed(tor, DeformConfig(subdivisions=2, iterations=6)), tor),
    ]


def _hd_nc(mesh, target_normalized):
    report = compute_report(mesh, target_normalized, sample_count=4000, seed=0,
                            metrics=("hd", "nc"))
    return report.hd, report.nc


# --------------------------------------------------------------- criteria


def test_criterion_01_closed_form_oracle_equivalence(warm_kernels):
    """Randomized meshes, lambda in {0.01, 0.1, 1}, delta = 0.5: the solver
    matches the unconstrained closed form whenever that point is feasible,
    within 1e-4 in the infinity norm and 2 s per case."""
    lambdas = (0.01, 0.1, 1.0)
    settings = SolverSettings(eps_abs=1e-6, eps_rel=1e-6, max_iters=2000,
                              rho_x=1e-12)
    feasible_cases = 0
    worst_err = 0.0
    worst_time = 0.0
    for i, mesh in enumerate(_mesh_roster()):
        lam = lambdas[i % 3]
        config = RefineConfig(lam=lam, delta=DELTA, sample_count=2000, seed=i,
                              solver=settings)
        start = time.perf_counter()
        outcome = refine(mesh, mesh, config)
        elapsed = time.perf_counter() - start
        assert elapsed <= 2.0, f"case {i}: {elapsed:.2f}s > 2s"
        assert outcome.solver_result.status == "optimal", f"case {i}"

        oracle = closed_form_oracle(outcome.mu, outcome.x_ref, lam)
        edges = mesh.edges
        oracle_edge = np.linalg.norm(
            oracle[edges[:, 0]] - oracle[edges[:, 1]], axis=1).max()
        got = outcome.solver_result.x.reshape(-1, 3)
        if oracle_edge <= DELTA:
            feasible_cases += 1
            err = np.abs(got - oracle).max()
            worst_err = max(worst_err, err)
            assert err <= 1e-4, f"case {i}: inf-norm {err:.2e}"
        else:
            # closed form infeasible (8-vertex cube at lambda=1, whose
            # normalized face diagonals exceed 2*delta): the solver must
            # still return an edge-feasible optimum (up to its primal
            # tolerance)
            solved_edge = np.linalg.norm(
                got[edges[:, 0]] - got[edges[:, 1]], axis=1).max()
            assert solved_edge <= DELTA + 1e-4
        worst_time = max(worst_time, elapsed)
    assert feasible_cases >= 17
    print(f"\n[criterion 01] PASS — {feasible_cases}/20 cases oracle-feasible, "
          f"worst inf-norm error {worst_err:.2e} (tol 1e-4), "
          f"worst case time {worst_time:.3f}s (limit 2s)")


def test_criterion_02_two_vertex_hand_instance():
    """Two anchored vertices, one binding edge bound: the optimum is known
    by hand (KKT) and corroborated by a dense grid search."""
    problem = build_edge_program(
        2,
        np.array([[0, 1]]),
        np.zeros(3),
        np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        lam=1.0,
        delta=0.5,
    )
    hand = np.array([0.25, 0.0, 0.0, -0.25, 0.0, 0.0])

    # independent oracle: grid over the symmetric slice (a,0,0,b,0,0) —
    # off-axis coordinates are optimal at zero since their linear terms
    # vanish and zero loosens the edge constraint
    grid = np.linspace(-1.0, 1.0, 2001)
    aa, bb = np.meshgrid(grid, grid, indexing="ij")
    objective = 2.0 * aa**2 + 2.0 * bb**2 - 2.0 * aa + 2.0 * bb
    objective[np.abs(aa - bb) > 0.5] = np.inf
    k = np.unravel_index(np.argmin(objective), objective.shape)
    assert abs(grid[k[0]] - 0.25) <= 2e-3
    assert abs(grid[k[1]] + 0.25) <= 2e-3

    result = solve(problem)  # library defaults
    assert result.status == "optimal"
    err = np.abs(result.x - hand).max()
    assert err <= 1e-4
    print(f"\n[criterion 02] PASS — solver at defaults hit (+-0.25, 0, 0) "
          f"within {err:.2e} (tol 1e-4); grid search agrees")


def test_criterion_03_termination_quality(matched_pairs, coarse_pairs,
                                          mismatched_pairs):
    """Every solve on the synthetic pair suite, at library defaults
    (eps=1e-5, 1000-iteration cap), reaches optimality in <= 200
    iterations."""
    suite = list(matched_pairs) + list(coarse_pairs) + list(mismatched_pairs)
    iteration_counts = []
    for deformed, target in suite:
        outcome = refine(deformed, target)  # all defaults
        assert outcome.solver_result.status == "optimal"
        assert outcome.solver_result.iterations <= 200
        iteration_counts.append(outcome.solver_result.iterations)
    print(f"\n[criterion 03] PASS — {len(suite)}/{len(suite)} solves optimal; "
          f"iterations min/median/max = {min(iteration_counts)}/"
          f"{int(np.median(iteration_counts))}/{max(iteration_counts)} "
          f"(gate: 100% optimal within 200)")


def test_criterion_04_refinement_improves_geometry(matched_pairs):
    """On every equal-count synthetic pair, refinement strictly improves
    both Hausdorff distance and normal consistency, and the refined normal
    consistency clears 0.9."""
    rows = []
    for deformed, target in matched_pairs:
        d_norm, _ = normalize_unit_sphere(deformed)
        t_norm, _ = normalize_unit_sphere(target)
        hd_before, nc_before = _hd_nc(d_norm, t_norm)
        outcome = refine(deformed, target)
        hd_after, nc_after = _hd_nc(outcome.refined, t_norm)
        assert hd_after < hd_before, (hd_before, hd_after)
        assert nc_after > nc_before, (nc_before, nc_after)
        assert nc_after >= 0.9
        rows.append((hd_before, hd_after, nc_before, nc_after))
    hd_drop = np.mean([(b - a) / b for b, a, _, _ in rows])
    print(f"\n[criterion 04] PASS — {len(rows)}/{len(rows)} pairs: HD and NC "
          f"strictly improved; mean HD reduction {100 * hd_drop:.0f}%, "
          f"refined NC >= {min(r[3] for r in rows):.4f} (gate 0.9)")


def test_criterion_05_delta_sweep_ordering(coarse_pairs):
    """Tightening the edge bound must hurt geometry and cost iterations:
    mean HD(0.005) > HD(0.05) > HD(0.5) and iterations(0.005) >
    iterations(0.5), at anchor weight 0.1."""
    mean_hd = {}
    mean_iters = {}
    for delta in (0.005, 0.05, 0.5):
        hds, iters = [], []
        for deformed, target in coarse_pairs:
            t_norm, _ = normalize_unit_sphere(target)
            outcome = refine(deformed, target,
                             RefineConfig(lam=0.1, delta=delta))
            assert outcome.solver_result.status == "optimal"
            hd, _ = _hd_nc(outcome.refined, t_norm)
            hds.append(hd)
            iters.append(outcome.solver_result.iterations)
        mean_hd[delta] = float(np.mean(hds))
        mean_iters[delta] = float(np.mean(iters))
    assert mean_hd[0.005] > mean_hd[0.05] > mean_hd[0.5]
    assert mean_iters[0.005] > mean_iters[0.5]
    print(f"\n[criterion 05] PASS — mean HD {mean_hd[0.005]:.3f} > "
          f"{mean_hd[0.05]:.3f} > {mean_hd[0.5]:.3f}; mean iterations "
          f"{mean_iters[0.005]:.0f} > {mean_iters[0.5]:.0f}")


def test_criterion_06_lambda_insensitivity(matched_pairs):
    """Sweeping the anchor weight over two decades moves normal
    consistency by less than 0.02 on every pair."""
    worst_spread = 0.0
    for deformed, target in matched_pairs:
        t_norm, _ = normalize_unit_sphere(target)
        ncs = []
        for lam in (0.001, 0.01, 0.1):
            outcome = refine(deformed, target, RefineConfig(lam=lam))
            _, nc = _hd_nc(outcome.refined, t_norm)
            ncs.append(nc)
        spread = max(ncs) - min(ncs)
        worst_spread = max(worst_spread, spread)
        assert spread < 0.02, ncs
    print(f"\n[criterion 06] PASS — worst NC spread across lambda in "
          f"{{0.001, 0.01, 0.1}} is {worst_spread:.5f} (gate 0.02)")


def test_criterion_07_solver_property_suite():
    """Cone projection laws at 1e-10, sparse-vs-dense linear solves at
    1e-8 relative (n up to 300), warm-start re-solve in <= 5 iterations,
    and residual decay over 20 random SOCPs."""
    rng = np.random.default_rng(7)

    # (a) projection idempotence / nonexpansiveness / Moreau decomposition
    kinds = ("zero", "nonneg", "free", "soc")
    for trial in range(50):
        blocks = tuple(
            (kinds[rng.integers(4)], int(rng.integers(1, 6)))
            for _ in range(rng.integers(1, 5))
        )
        blocks = tuple((k if not (k == "soc" and d < 2) else "nonneg", d)
                       for k, d in blocks)
        layout = ConeLayout(blocks)
        v = rng.normal(size=layout.dim)
        u = rng.normal(size=layout.dim)
        p = project(layout, v)
        assert np.abs(project(layout, p) - p).max() <= 1e-10
        assert (np.linalg.norm(project(layout, u) - p)
                <= np.linalg.norm(u - v) + 1e-12)
        q = project(dual_layout(layout), -v)
        assert np.abs(p - q - v).max() <= 1e-10
        assert abs(p @ q) <= 1e-10

    # (b) sparse LDL solve vs dense reference, both orderings
    worst_rel = 0.0
    for n1, n2 in ((30, 20), (70, 50), (180, 120)):
        dense, upper = random_quasidefinite(n1, n2, rng, density=0.3)
        rhs = rng.normal(size=n1 + n2)
        expected = np.linalg.solve(dense, rhs)
        for ordering in ("natural", "fill-reducing"):
            got = sparse.ldl_solve(sparse.ldl_factor(upper, ordering=ordering), rhs)
            rel = np.linalg.norm(got - expected) / np.linalg.norm(expected)
            worst_rel = max(worst_rel, rel)
            assert rel <= 1e-8, (n1 + n2, ordering, rel)

    # (c) warm-start re-solve
    settings = SolverSettings(eps_abs=1e-6, eps_rel=1e-6, max_iters=5000,
                              rho_x=1e-12)
    warm_iters = []
    for seed in (0, 7, 13):
        problem = random_socp(seed)
        first = solve(problem, settings)
        assert first.status == "optimal"
        second = solve(problem, settings, warm=(first.x, first.y, first.s))
        assert second.status == "optimal"
        assert second.iterations <= 5
        warm_iters.append(second.iterations)

    # (d) residual decay: best-so-far max(pri, dual) residual should
    # roughly halve when the iteration count doubles; allow 20% of
    # sampled doublings to miss (rate constants are instance-dependent).
    # Only the pre-convergence regime is sampled — once the residual sits
    # at its numerical floor there is no decay left to measure.
    decay_settings = SolverSettings(eps_abs=1e-30, eps_rel=1e-30,
                                    max_iters=1000, rho_x=1e-12, diag_every=1)
    sampled, failures = 0, 0
    for seed in range(20):
        result = solve(random_socp(seed, n=40), decay_settings)
        best = np.minimum.accumulate(residual_series(result))
        k = 10
        while 2 * k < len(best):
            if best[k] > 1e-9:
                sampled += 1
                if best[2 * k] > 0.75 * best[k]:
                    failures += 1
            k *= 2
    assert sampled >= 40
    assert failures <= 0.2 * sampled, (failures, sampled)

    print(f"\n[criterion 07] PASS — 50 projection triples at 1e-10; "
          f"sparse-vs-dense worst rel {worst_rel:.1e} (tol 1e-8); "
          f"warm re-solves took {warm_iters} iterations (gate 5); "
          f"residual decay failed {failures}/{sampled} doublings (gate 20%)")


def test_criterion_08_metrics_sanity(warm_kernels):
    """Identical inputs give exact-zero distances and NC=1; EMD equals the
    exhaustive assignment optimum; the KD index agrees with a brute-force
    scan over one million cumulative point/query pairs."""
    # identical inputs
    mesh = bumpy_sphere(2)
    report = compute_report(mesh, mesh, sample_count=2000)
    assert abs(report.cd) <= 1e-9
    assert abs(report.emd) <= 1e-9
    assert abs(report.hd) <= 1e-9
    assert abs(report.nc - 1.0) <= 1e-9

    # EMD vs exhaustive permutation minimum
    rng = np.random.default_rng(8)
    for n in range(2, 9):
        a = rng.normal(size=(n, 3))
        b = rng.normal(size=(n, 3))
        cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
        exhaustive = min(
            cost[np.arange(n), list(perm)].mean()
            for perm in itertools.permutations(range(n))
        )
        assert emd(a, b) == pytest.approx(exhaustive, rel=1e-12)

    # KD index vs exhaustive scan, >= 1e6 cumulative point*query pairs
    cumulative = 0
    for n_points, n_queries in ((2000, 100), (1500, 200), (1000, 300),
                                (500, 400), (4096, 25)):
        points = rng.normal(size=(n_points, 3))
        queries = np.concatenate([
            rng.normal(size=(n_queries - n_queries // 4, 3)),
            points[rng.integers(0, n_points, n_queries // 4)],  # exact hits
        ])
        idx, dist = KdIndex.build(points).nearest_many(queries)
        ref_idx, ref_dist = brute_nearest(points, queries)
        assert np.array_equal(idx, ref_idx)
        assert np.array_equal(dist, ref_dist)
        cumulative += n_points * len(queries)
    assert cumulative >= 10**6
    print(f"\n[criterion 08] PASS — identical-input metrics exact; EMD matches "
          f"permutation search for N=2..8; KD index matched brute force over "
          f"{cumulative:,} pairs")


def test_criterion_09_performance_envelope(warm_kernels):
    """A full refine of a 10,242-vertex mesh (30k variables, 122k
    constraint rows) finishes within 5 seconds single-threaded."""
    deformed = bumpy_sphere(5, amplitude=0.15, frequency=3.0)
    target = icosphere(5)
    assert deformed.n_vertices == 10242
    start = time.perf_counter()
    outcome = refine(deformed, target)
    elapsed = time.perf_counter() - start
    assert outcome.solver_result.status == "optimal"
    assert elapsed <= 5.0, f"{elapsed:.2f}s"
    print(f"\n[criterion 09] PASS — 10,242-vertex refine took {elapsed:.2f}s "
          f"(budget 5s), {outcome.solver_result.iterations} iterations, "
          f"{outcome.solver_result.factorizations} factorization(s)")


def test_criterion_10_full_scale_tables_out_of_scope():
    """Desk-scale disclosure, not a computation: published full-scale
    benchmark numbers come from large third-party scan datasets and a
    specific upstream reconstruction method, neither of which ships here.
    Criteria 4-6 stand in with property- and ordering-based gates on
    synthetic pairs. This gate only pins the substitution down in writing
    and checks the metric pipeline those tables would need is present."""
    from meshcone.metrics import ALL_METRICS

    assert set(ALL_METRICS) == {"cd", "emd", "hd", "nc", "ce", "ar"}
    print("\n[criterion 10] PASS — full-scale table values are documented as "
          "not reproducible at desk scale; synthetic property/ordering gates "
          "(criteria 4-6) substitute, and the full metric set is implemented")
