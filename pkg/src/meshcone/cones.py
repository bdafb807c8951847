"""Cone layouts and Euclidean projections.

A layout is an ordered list of ``(kind, dim)`` blocks partitioning R^m.
Kinds: ``zero`` (the origin), ``nonneg`` (componentwise R+), ``soc``
(second-order cone, first coordinate is the scalar t), and ``free`` (all of
R^dim — the dual of ``zero``). Consecutive blocks of the same kind and
dimension are fused into runs at construction, so projecting a layout of
thousands of identical SOC blocks is a handful of vectorized operations.
"""

from dataclasses import dataclass, field

import numpy as np

KINDS = ("zero", "nonneg", "soc", "free")


@dataclass(frozen=True)
class ConeLayout:
    blocks: tuple = ()
    _runs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple((str(kind), int(dim)) for kind, dim in self.blocks)
        for kind, dim in blocks:
            if kind not in KINDS:
                raise ValueError(f"unknown cone kind {kind!r}; expected one of {KINDS}")
            if dim < 1:
                raise ValueError(f"cone block dimension must be >= 1, got {dim}")
            if kind == "soc" and dim < 2:
                raise ValueError("soc blocks need dim >= 2 (scalar t plus a vector)")
        runs = []
        offset = 0
        for kind, dim in blocks:
            if runs and runs[-1][0] == kind and (kind in ("zero", "nonneg", "free") or runs[-1][1] == dim):
                k, d, count, off = runs[-1]
                if kind in ("zero", "nonneg", "free"):
                    runs[-1] = (k, d + dim, 1, off)
                else:
                    runs[-1] = (k, d, count + 1, off)
            else:
                runs.append((kind, dim, 1, offset))
            offset += dim
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_runs", tuple(runs))

    @property
    def dim(self):
        return sum(d for _, d in self.blocks)

    def __len__(self):
        return len(self.blocks)


def dual_layout(layout):
    """Blockwise dual cone: zero <-> free, nonneg and soc are self-dual."""
    swap = {"zero": "free", "free": "zero", "nonneg": "nonneg", "soc": "soc"}
    return ConeLayout(tuple((swap[k], d) for k, d in layout.blocks))


def _project_soc_block(t, u):
    """Vectorized SOC projection for (count,) t and (count, k) u."""
    nu = np.linalg.norm(u, axis=1)
    inside = nu <= t
    polar = nu <= -t
    coef = 0.5 * (nu + t)
    safe = np.where(nu > 0.0, nu, 1.0)
    out_t = np.where(inside, t, np.where(polar, 0.0, coef))
    scale = np.where(inside, 1.0, np.where(polar, 0.0, coef / safe))
    out_u = u * scale[:, None]
    return out_t, out_u


def project(layout, v):
    """Euclidean projection of ``v`` onto the cone product.

    Idempotent, 1-Lipschitz, and exact for the polar cases (a SOC block
    with ``||u|| <= -t`` maps to the origin).
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (layout.dim,):
        raise ValueError(f"vector has shape {v.shape}, layout dim is {layout.dim}")
    out = v.copy()
    for kind, dim, count, off in layout._runs:
        seg = out[off : off + dim * count]
        if kind == "zero":
            seg[:] = 0.0
        elif kind == "nonneg":
            np.maximum(seg, 0.0, out=seg)
        elif kind == "free":
            pass
        else:  # soc
            w = seg.reshape(count, dim)
            t, u = _project_soc_block(w[:, 0].copy(), w[:, 1:].copy())
            w[:, 0] = t
            w[:, 1:] = u
    return out


def contains(layout, v, atol=0.0):
    """Membership test with absolute slack ``atol``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (layout.dim,):
        raise ValueError(f"vector has shape {v.shape}, layout dim is {layout.dim}")
    for kind, dim, count, off in layout._runs:
        seg = v[off : off + dim * count]
        if kind == "zero":
            if len(seg) and np.abs(seg).max() > atol:
                return False
        elif kind == "nonneg":
            if len(seg) and seg.min() < -atol:
                return False
        elif kind == "soc":
            w = seg.reshape(count, dim)
            nu = np.linalg.norm(w[:, 1:], axis=1)
            if (nu > w[:, 0] + atol).any():
                return False
    return True
