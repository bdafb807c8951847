"""Operator-splitting (ADMM) solver for quadratic cone programs.

Problem form::

    minimize    (1/2) x^T P x + c^T x
    subject to  A x + s = b,   s in K

with P positive semidefinite (upper triangle stored) and K a product of
zero / nonnegative / second-order cones. The dual reported alongside is

    maximize   -b^T y - (1/2) x^T P x     with y in K*.

Splitting: ``z = b - A x`` is kept in K by projection; the x-update solves
the regularized KKT system ``(P + rho_x I + rho A^T A) x = rhs`` through a
sparse LDL^T computed once and reused every iteration (recomputed only when
adaptive rho rescaling changes the system, at most 10 times).

Termination requires all three of::

    ||b - A x - z||      <= eps_abs*sqrt(m) + eps_rel*max(||Ax||, ||z||, ||b||)
    ||rho A^T (z - z_prev)|| <= eps_abs*sqrt(n) + eps_rel*||c||   (and the
    recomputed ||P x + c + A^T y|| under the same tolerance)
    |primal_obj - dual_obj| <= eps_abs + eps_rel*max(|primal|, |dual|)

The multiplier iterated internally acts on ``b - A x - z``; the returned
``y`` is its negation, which lands exactly in K* (it is rho times a polar
projection residual) and makes the reported dual objective and dual
residual consistent.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import cones as cones_mod
from . import sparse
from .errors import DimensionError

DIAG_FIELDS = ("iter", "pri_res", "dual_res", "gap", "obj", "scale", "time_s")

RHO_FACTOR = 10.0
RHO_RATIO = 10.0
MAX_RESCALINGS = 10
# Rescaling is considered every 25th iteration only: short solves (the
# standard refinement regime) finish on a single factorization, while stuck
# ones still get rescued. Checking every iteration would trip the ratio rule
# on the very first warm-started step, where the primal residual transiently
# dominates.
RHO_CHECK_EVERY = 25


@dataclass(frozen=True)
class SolverSettings:
    eps_abs: float = 1e-5
    eps_rel: float = 1e-5
    max_iters: int = 1000
    alpha: float = 1.5
    rho: float = 0.1
    rho_x: float = 1e-6
    warm_start: bool = True
    adaptive_rho: bool = True
    diag_every: int = 25

    def __post_init__(self):
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.rho <= 0 or self.rho_x < 0:
            raise ValueError("rho must be > 0 and rho_x >= 0")
        if self.diag_every < 1:
            raise ValueError("diag_every must be >= 1")


@dataclass(frozen=True)
class ConicProblem:
    """Problem data. ``P`` is the upper triangle of the quadratic term."""

    P: sparse.SparseMatrix
    c: np.ndarray
    A: sparse.SparseMatrix
    b: np.ndarray
    cones: cones_mod.ConeLayout

    def __post_init__(self):
        object.__setattr__(self, "c", np.ascontiguousarray(self.c, dtype=np.float64))
        object.__setattr__(self, "b", np.ascontiguousarray(self.b, dtype=np.float64))
        self.validate()

    @property
    def n(self):
        return len(self.c)

    @property
    def m(self):
        return len(self.b)

    def validate(self):
        n, m = len(self.c), len(self.b)
        if self.P.shape != (n, n):
            raise DimensionError(f"P must be {n}x{n}, got {self.P.shape}")
        cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.P.indptr))
        if len(cols) and (self.P.indices > cols).any():
            raise ValueError("P must be given as its upper triangle")
        if self.A.shape != (m, n):
            raise DimensionError(f"A must be {m}x{n}, got {self.A.shape}")
        if self.cones.dim != m:
            raise DimensionError(
                f"cone layout covers {self.cones.dim} rows, b has {m}"
            )
        if not np.isfinite(self.c).all() or not np.isfinite(self.b).all():
            raise ValueError("problem data must be finite")

    def objective(self, x):
        return 0.5 * float(x @ sparse.sym_spmv(self.P, x)) + float(self.c @ x)


@dataclass(frozen=True)
class SolverResult:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    status: str
    iterations: int
    objective: float
    primal_res: float
    dual_res: float
    gap: float
    solve_time: float
    factorizations: int
    diagnostics: tuple = field(default=(), repr=False)


def residuals(problem, x, y, s):
    """(primal_res, dual_res, gap) for an arbitrary candidate triple."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    ax = sparse.spmv(problem.A, x)
    px = sparse.sym_spmv(problem.P, x)
    pri = float(np.linalg.norm(ax + s - problem.b))
    dual = float(np.linalg.norm(px + problem.c + sparse.transpose_spmv(problem.A, y)))
    pobj = 0.5 * float(x @ px) + float(problem.c @ x)
    dobj = -float(problem.b @ y) - 0.5 * float(x @ px)
    return pri, dual, abs(pobj - dobj)


def solve(problem, settings=None, warm=None):
    """Run ADMM on ``problem``; returns a :class:`SolverResult`.

    ``warm``, when given and ``settings.warm_start`` is true, is a
    ``(x0, y0, s0)`` triple (s0 must already lie in the cone). Status is
    ``"optimal"``, ``"max_iters"``, or ``"numerical_error"`` (non-finite
    iterates; the last finite iterate is returned).
    """
    if settings is None:
        settings = SolverSettings()
    t0 = time.perf_counter()
    n, m = problem.n, problem.m
    A, P, b, c, layout = problem.A, problem.P, problem.b, problem.c, problem.cones
    rho = settings.rho
    alpha = settings.alpha

    if warm is not None and settings.warm_start:
        x0, y0, s0 = warm
        x = np.array(x0, dtype=np.float64).ravel().copy()
        u = -np.asarray(y0, dtype=np.float64).ravel()
        z = np.asarray(s0, dtype=np.float64).ravel().copy()
        if x.shape != (n,) or u.shape != (m,) or z.shape != (m,):
            raise DimensionError("warm start shapes do not match the problem")
    else:
        x = np.zeros(n)
        u = np.zeros(m)
        z = cones_mod.project(layout, b.copy())

    # KKT matrix P + rho_x I + rho A^T A (upper triangle), factored once;
    # the pieces are kept as triplets so a rho change is a cheap rebuild.
    pi, pj, pv = problem.P.triplets()
    di = np.arange(n, dtype=np.int64)
    base_i = np.concatenate([pi, di])
    base_j = np.concatenate([pj, di])
    base_v = np.concatenate([pv, np.full(n, settings.rho_x)])
    gi, gj, gv = sparse.gram_upper(A).triplets()

    def factor(current_rho):
        kkt = sparse.from_triplets(
            n,
            n,
            np.concatenate([base_i, gi]),
            np.concatenate([base_j, gj]),
            np.concatenate([base_v, current_rho * gv]),
        )
        return sparse.ldl_factor(kkt, ordering="fill-reducing")

    fac = factor(rho)
    n_factor = 1

    sqrt_m = np.sqrt(m) if m else 0.0
    sqrt_n = np.sqrt(n)
    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.linalg.norm(c))

    diag = []
    last_recorded = -1

    def record(k, pri, dual, gap, obj, current_rho):
        nonlocal last_recorded
        if k == last_recorded:
            return
        diag.append(
            {
                "iter": k,
                "pri_res": pri,
                "dual_res": dual,
                "gap": gap,
                "obj": obj,
                "scale": current_rho,
                "time_s": time.perf_counter() - t0,
            }
        )
        last_recorded = k

    status = "max_iters"
    iterations = settings.max_iters
    rescales = 0
    prev = (x.copy(), u.copy(), z.copy())
    pri = dual = gap = np.inf
    pobj = np.inf

    for k in range(settings.max_iters):
        rhs = -c + sparse.transpose_spmv(A, u + rho * (b - z))
        x = sparse.ldl_solve(fac, rhs)
        ax = sparse.spmv(A, x)
        h = alpha * (b - ax) + (1.0 - alpha) * z
        z_prev = z
        z = cones_mod.project(layout, h + u / rho)
        u = u + rho * (h - z)

        if not (
            np.isfinite(x).all() and np.isfinite(z).all() and np.isfinite(u).all()
        ):
            x, u, z = prev
            ax = sparse.spmv(A, x)
            status = "numerical_error"
            iterations = k + 1
            y = -u
            pri, dual, gap = residuals(problem, x, y, z)
            pobj = problem.objective(x)
            record(k, pri, dual, gap, pobj, rho)
            break
        prev = (x.copy(), u.copy(), z.copy())

        # residuals, always recomputed from the current iterate
        px = sparse.sym_spmv(P, x)
        pri_vec = b - ax - z
        pri = float(np.linalg.norm(pri_vec))
        y = -u
        aty = sparse.transpose_spmv(A, y)
        dual = float(np.linalg.norm(px + c + aty))
        proxy = float(np.linalg.norm(rho * sparse.transpose_spmv(A, z - z_prev)))
        xpx = float(x @ px)
        pobj = 0.5 * xpx + float(c @ x)
        dobj = -float(b @ y) - 0.5 * xpx
        gap = abs(pobj - dobj)

        pri_tol = settings.eps_abs * sqrt_m + settings.eps_rel * max(
            float(np.linalg.norm(ax)), float(np.linalg.norm(z)), norm_b
        )
        dual_tol = settings.eps_abs * sqrt_n + settings.eps_rel * norm_c
        gap_tol = settings.eps_abs + settings.eps_rel * max(abs(pobj), abs(dobj))

        converged = (
            pri <= pri_tol and proxy <= dual_tol and dual <= dual_tol and gap <= gap_tol
        )
        if k == 0 or (k % settings.diag_every == 0) or converged or k == settings.max_iters - 1:
            record(k, pri, dual, gap, pobj, rho)
        if converged:
            status = "optimal"
            iterations = k + 1
            break

        if (
            settings.adaptive_rho
            and rescales < MAX_RESCALINGS
            and k > 0
            and k % RHO_CHECK_EVERY == 0
        ):
            new_rho = rho
            if pri > RHO_RATIO * dual and pri > pri_tol:
                new_rho = rho * RHO_FACTOR
            elif dual > RHO_RATIO * pri and dual > dual_tol:
                new_rho = rho / RHO_FACTOR
            if new_rho != rho:
                rho = new_rho
                fac = factor(rho)
                n_factor += 1
                rescales += 1
    else:
        iterations = settings.max_iters
        record(settings.max_iters - 1, pri, dual, gap, pobj, rho)

    y = -u
    return SolverResult(
        x=x,
        y=y,
        s=z,
        status=status,
        iterations=iterations,
        objective=float(pobj),
        primal_res=float(pri),
        dual_res=float(dual),
        gap=float(gap),
        solve_time=time.perf_counter() - t0,
        factorizations=n_factor,
        diagnostics=tuple(diag),
    )


def write_diagnostics(result, path):
    """Write the recorded diagnostic rows as CSV.

    Header ``iter,pri_res,dual_res,gap,obj,scale,time_s``; raises
    ``ValueError`` if the result carries no rows.
    """
    if not result.diagnostics:
        raise ValueError("result has no diagnostic rows to write")
    lines = [",".join(DIAG_FIELDS)]
    for row in result.diagnostics:
        lines.append(
            ",".join(
                str(row["iter"]) if name == "iter" else f"{row[name]:.10e}"
                for name in DIAG_FIELDS
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _replace_settings(settings, **kw):
    """Convenience for tests and the CLI."""
    return replace(settings, **kw)
