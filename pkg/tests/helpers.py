"""Shared builders for solver and acceptance tests."""

import numpy as np

from meshcone.cones import ConeLayout, project
from meshcone.solver import ConicProblem
from meshcone.sparse import from_triplets


def sparse_from_dense(m):
    rows, cols = np.nonzero(m)
    return from_triplets(m.shape[0], m.shape[1], rows, cols, m[rows, cols])


def upper_from_dense(m):
    rows, cols = np.nonzero(np.triu(m))
    return from_triplets(m.shape[0], m.shape[1], rows, cols, m[rows, cols])


def projection_problem(p, kind="soc"):
    """min ||x - p||^2 / 2 over the cone: solution is the projection of p."""
    p = np.asarray(p, dtype=np.float64)
    n = len(p)
    problem = ConicProblem(
        P=from_triplets(n, n, np.arange(n), np.arange(n), np.ones(n)),
        c=-p,
        A=sparse_from_dense(-np.eye(n)),
        b=np.zeros(n),
        cones=ConeLayout(((kind, n),)),
    )
    return problem, project(ConeLayout(((kind, n),)), p)


def random_socp(seed, n=20):
    """A feasible random SOCP with strictly interior slack and PD quadratic."""
    rng = np.random.default_rng(seed)
    blocks = (("zero", 2), ("nonneg", 4), ("soc", 3), ("soc", 4), ("soc", 5))
    m = sum(d for _, d in blocks)

    a = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.5)
    x0 = rng.normal(size=n)
    s0 = np.zeros(m)
    off = 2
    s0[off : off + 4] = np.abs(rng.normal(size=4)) + 0.1
    off += 4
    for dim in (3, 4, 5):
        u = rng.normal(size=dim - 1)
        s0[off] = np.linalg.norm(u) + abs(rng.normal()) + 0.1
        s0[off + 1 : off + dim] = u
        off += dim
    b = a @ x0 + s0

    g = rng.normal(size=(n, n)) * (rng.random((n, n)) < 0.4)
    p_dense = g.T @ g + np.eye(n)
    c = rng.normal(size=n)
    problem = ConicProblem(
        P=upper_from_dense(p_dense),
        c=c,
        A=sparse_from_dense(a),
        b=b,
        cones=ConeLayout(blocks),
    )
    return problem


def residual_series(result):
    """max(primal, dual) residual per recorded diagnostic row."""
    return np.array(
        [max(row["pri_res"], row["dual_res"]) for row in result.diagnostics]
    )
