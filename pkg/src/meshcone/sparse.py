"""CSC sparse matrices and an LDL^T factorization for quasi-definite systems.

The factorization is up-looking with a static pivot order, suitable for the
symmetric quasi-definite matrices the solver produces (always factorizable
without numeric pivoting). Ordering is either ``"natural"`` or
``"fill-reducing"`` — an exact minimum-degree ordering with deterministic
lowest-index tie-breaking.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, SingularMatrixError

PIVOT_TOL = 1e-13
ORDERINGS = ("natural", "fill-reducing")


@dataclass(frozen=True)
class SparseMatrix:
    """Compressed sparse column matrix (float64 values, int64 indices).

    Canonical form: row indices strictly increasing within each column, no
    explicit duplicates. Construct via :func:`from_triplets`.
    """

    n_rows: int
    n_cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return len(self.data)

    def __matmul__(self, x):
        return spmv(self, x)

    def to_dense(self):
        out = np.zeros(self.shape)
        for j in range(self.n_cols):
            sl = slice(self.indptr[j], self.indptr[j + 1])
            out[self.indices[sl], j] = self.data[sl]
        return out

    def transpose(self):
        rows, cols, vals = self.triplets()
        return from_triplets(self.n_cols, self.n_rows, cols, rows, vals)

    def triplets(self):
        """(rows, cols, values) arrays in canonical order."""
        cols = np.repeat(
            np.arange(self.n_cols, dtype=np.int64), np.diff(self.indptr)
        )
        return self.indices.copy(), cols, self.data.copy()

    def scaled(self, factor):
        return SparseMatrix(
            self.n_rows, self.n_cols, self.indptr, self.indices, self.data * factor
        )


def _freeze(a):
    a.flags.writeable = False
    return a


def from_triplets(n_rows, n_cols, rows, cols, values):
    """Build a canonical CSC matrix from (i, j, value) triplets.

    Duplicate coordinates are summed. Raises ``DimensionError`` for
    out-of-range indices and ``ValueError`` for non-finite values.
    """
    if n_rows < 0 or n_cols < 0:
        raise ValueError("matrix dimensions must be non-negative")
    r = np.asarray(rows, dtype=np.int64).ravel()
    c = np.asarray(cols, dtype=np.int64).ravel()
    v = np.asarray(values, dtype=np.float64).ravel()
    if not (len(r) == len(c) == len(v)):
        raise DimensionError("rows, cols, values must have equal length")
    if len(r):
        if r.min() < 0 or r.max() >= n_rows or c.min() < 0 or c.max() >= n_cols:
            raise DimensionError(
                f"triplet index out of range for a {n_rows}x{n_cols} matrix"
            )
        if not np.isfinite(v).all():
            raise ValueError("matrix values must be finite")
        order = np.lexsort((r, c))
        r, c, v = r[order], c[order], v[order]
        group_start = np.empty(len(r), dtype=bool)
        group_start[0] = True
        group_start[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(group_start)
        r = r[starts]
        c = c[starts]
        v = np.add.reduceat(v, starts)
    indptr = np.zeros(n_cols + 1, dtype=np.int64)
    if len(c):
        np.cumsum(np.bincount(c, minlength=n_cols), out=indptr[1:])
    return SparseMatrix(
        int(n_rows), int(n_cols), _freeze(indptr), _freeze(r), _freeze(v)
    )


def identity(n, value=1.0):
    idx = np.arange(n, dtype=np.int64)
    return from_triplets(n, n, idx, idx, np.full(n, value))


def spmv(matrix, x):
    """Matrix-vector product ``M @ x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (matrix.n_cols,):
        raise DimensionError(
            f"operand has shape {x.shape}, matrix needs ({matrix.n_cols},)"
        )
    return _kernels.csc_matvec(
        matrix.n_rows, matrix.indptr, matrix.indices, matrix.data, x
    )


def transpose_spmv(matrix, x):
    """``M.T @ x`` without materializing the transpose."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (matrix.n_rows,):
        raise DimensionError(
            f"operand has shape {x.shape}, matrix transpose needs ({matrix.n_rows},)"
        )
    return _kernels.csc_rmatvec(
        matrix.n_cols, matrix.indptr, matrix.indices, matrix.data, x
    )


def sym_spmv(upper, x):
    """``M @ x`` for symmetric M stored as its upper triangle."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (upper.n_cols,):
        raise DimensionError(
            f"operand has shape {x.shape}, matrix needs ({upper.n_cols},)"
        )
    return _kernels.sym_upper_matvec(
        upper.n_cols, upper.indptr, upper.indices, upper.data, x
    )


def _require_upper_square(matrix):
    if matrix.n_rows != matrix.n_cols:
        raise DimensionError(f"matrix must be square, got {matrix.shape}")
    cols = np.repeat(np.arange(matrix.n_cols, dtype=np.int64), np.diff(matrix.indptr))
    if len(cols) and (matrix.indices > cols).any():
        raise ValueError("matrix must be upper triangular (supply the upper triangle)")


def _adjacency(matrix):
    """Symmetric adjacency (CSR, no diagonal) of an upper-triangular matrix."""
    n = matrix.n_cols
    i, j, _ = matrix.triplets()
    off = i != j
    a, b = i[off], j[off]
    src = np.concatenate([a, b])
    dst = np.concatenate([b, a])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    if len(src):
        np.cumsum(np.bincount(src, minlength=n), out=ptr[1:])
    return ptr, dst


def mindeg_permutation(matrix):
    """Fill-reducing (exact minimum degree) permutation of a symmetric matrix."""
    ptr, idx = _adjacency(matrix)
    return _kernels.mindeg_order(matrix.n_cols, ptr, idx)


def _permute_upper(matrix, perm):
    n = matrix.n_cols
    iperm = np.empty(n, dtype=np.int64)
    iperm[perm] = np.arange(n, dtype=np.int64)
    i, j, v = matrix.triplets()
    pi, pj = iperm[i], iperm[j]
    swap = pi > pj
    pi2 = np.where(swap, pj, pi)
    pj2 = np.where(swap, pi, pj)
    return from_triplets(n, n, pi2, pj2, v), iperm


@dataclass(frozen=True)
class LdlFactorization:
    """P M P^T = (I + L) D (I + L)^T with L strictly lower triangular."""

    n: int
    perm: np.ndarray
    Lp: np.ndarray
    Li: np.ndarray
    Lx: np.ndarray
    D: np.ndarray

    @property
    def nnz_L(self):
        return int(self.Lp[self.n])

    @property
    def L(self):
        """Strictly-lower factor as a SparseMatrix (unit diagonal implied)."""
        cols = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.Lp))
        return from_triplets(self.n, self.n, self.Li, cols, self.Lx)

    def solve(self, rhs):
        return ldl_solve(self, rhs)


def ldl_factor(matrix, ordering="fill-reducing"):
    """Factor a symmetric quasi-definite matrix given by its upper triangle.

    Parameters
    ----------
    matrix : SparseMatrix
        Upper triangle (including the diagonal) of the symmetric matrix.
    ordering : {"fill-reducing", "natural"}
        Pivot order. ``"fill-reducing"`` is exact minimum degree with
        lowest-index tie-breaking; ``"natural"`` keeps the given order.

    Raises
    ------
    SingularMatrixError
        When a pivot's magnitude falls below 1e-13; carries the offending
        index in the *original* (unpermuted) numbering.
    """
    _require_upper_square(matrix)
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")
    n = matrix.n_cols
    if ordering == "fill-reducing":
        perm = mindeg_permutation(matrix)
    else:
        perm = np.arange(n, dtype=np.int64)
    permuted, _ = _permute_upper(matrix, perm)
    parent, lnz, err = _kernels.ldl_etree(n, permuted.indptr, permuted.indices)
    if err == -2:  # cannot happen for canonical upper input; defensive
        raise ValueError("matrix must be upper triangular")
    Lp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lnz, out=Lp[1:])
    Li, Lx, D, bad = _kernels.ldl_numeric(
        n, permuted.indptr, permuted.indices, permuted.data, parent, Lp, PIVOT_TOL
    )
    if bad >= 0:
        raise SingularMatrixError(pivot=int(perm[bad]), value=float(D[bad]))
    return LdlFactorization(
        n=n,
        perm=_freeze(np.asarray(perm)),
        Lp=_freeze(Lp),
        Li=_freeze(Li),
        Lx=_freeze(Lx),
        D=_freeze(D),
    )


def ldl_solve(factorization, rhs):
    """Solve ``M x = rhs`` using a factorization from :func:`ldl_factor`."""
    f = factorization
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape != (f.n,):
        raise DimensionError(f"rhs has shape {rhs.shape}, expected ({f.n},)")
    z = rhs[f.perm].copy()
    _kernels.ldl_solve_inplace(f.n, f.Lp, f.Li, f.Lx, f.D, z)
    out = np.empty(f.n)
    out[f.perm] = z
    return out


def gram_upper(matrix):
    """Upper triangle of ``A^T A`` as a SparseMatrix."""
    # reuse the CSC machinery: CSR of A is CSC of A^T
    at = matrix.transpose()
    ti, tj, tv = _kernels.gram_upper_triplets(
        matrix.n_rows, at.indptr, at.indices, at.data
    )
    return from_triplets(matrix.n_cols, matrix.n_cols, ti, tj, tv)
