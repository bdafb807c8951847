"""Exact nearest-neighbor queries over 3D point sets (kd-tree).

The tree is deterministic: splits go on the axis of widest spread (ties to
the lowest axis index), the splitting point is the median under a
(coordinate, index) order, and equal-distance query results resolve to the
lowest point index. Two builds over the same array are identical, and every
query agrees exactly with a brute-force scan under that tie rule.
"""

import numpy as np

from . import _kernels


class KdIndex:
    """Immutable nearest-neighbor index over an ``(N, 3)`` point array."""

    def __init__(self, points, perm, axis, split, left, right, start, end, leaf_size):
        self.points = points
        self.leaf_size = leaf_size
        self._perm = perm
        self._axis = axis
        self._split = split
        self._left = left
        self._right = right
        self._start = start
        self._end = end

    @classmethod
    def build(cls, points, leaf_size=16):
        """Build an index. ``points`` must be (N >= 1, 3) and finite."""
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be (N, 3), got {pts.shape}")
        n = len(pts)
        if n < 1:
            raise ValueError("cannot index an empty point set")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        if leaf_size < 1:
            raise ValueError("leaf_size must be >= 1")

        axis, split, left, right, start, end = [], [], [], [], [], []

        def new_node():
            axis.append(-1)
            split.append(0.0)
            left.append(-1)
            right.append(-1)
            start.append(0)
            end.append(0)
            return len(axis) - 1

        perm = np.empty(n, dtype=np.int64)
        cursor = 0
        stack = [(np.arange(n, dtype=np.int64), new_node())]
        while stack:
            idx, node = stack.pop()
            if len(idx) <= leaf_size:
                start[node] = cursor
                end[node] = cursor + len(idx)
                perm[cursor : cursor + len(idx)] = idx
                cursor += len(idx)
                continue
            sub = pts[idx]
            spans = sub.max(axis=0) - sub.min(axis=0)
            ax = int(np.argmax(spans))  # argmax returns the first max: lowest axis
            order = np.lexsort((idx, sub[:, ax]))
            s = idx[order]
            mid = len(s) // 2
            axis[node] = ax
            split[node] = float(pts[s[mid], ax])
            lchild = new_node()
            rchild = new_node()
            left[node] = lchild
            right[node] = rchild
            stack.append((s[:mid], lchild))
            stack.append((s[mid:], rchild))

        pts.flags.writeable = False
        return cls(
            pts,
            perm,
            np.asarray(axis, dtype=np.int64),
            np.asarray(split, dtype=np.float64),
            np.asarray(left, dtype=np.int64),
            np.asarray(right, dtype=np.int64),
            np.asarray(start, dtype=np.int64),
            np.asarray(end, dtype=np.int64),
            leaf_size,
        )

    @property
    def n_points(self):
        return len(self.points)

    @property
    def depth(self):
        """Levels in the tree; a non-split root counts as depth 1."""
        depth = np.zeros(len(self._axis), dtype=np.int64)
        # children always follow their parent in the node arrays, so a
        # reverse scan sees children before parents
        for node in range(len(self._axis) - 1, -1, -1):
            if self._left[node] < 0:
                depth[node] = 1
            else:
                depth[node] = 1 + max(depth[self._left[node]], depth[self._right[node]])
        return int(depth[0])

    def nearest(self, query):
        """Exact nearest neighbor of one point: ``(index, distance)``."""
        q = np.asarray(query, dtype=np.float64).reshape(1, 3)
        idx, dist = self.nearest_many(q)
        return int(idx[0]), float(dist[0])

    def nearest_many(self, queries):
        """Exact nearest neighbors of an ``(Q, 3)`` batch: ``(indices, distances)``."""
        q = np.ascontiguousarray(queries, dtype=np.float64)
        if q.ndim != 2 or q.shape[1] != 3:
            raise ValueError(f"queries must be (Q, 3), got {q.shape}")
        return _kernels.kd_query(
            self.points,
            self._perm,
            self._axis,
            self._split,
            self._left,
            self._right,
            self._start,
            self._end,
            q,
        )
