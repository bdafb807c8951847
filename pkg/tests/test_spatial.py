import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from meshcone.spatial import KdIndex


def brute_nearest(points, queries):
    """Reference scan with the same tie rule: smallest distance, then
    smallest index. Distances accumulated coordinate-wise like the kernel."""
    idx = np.empty(len(queries), dtype=np.int64)
    d2 = np.empty(len(queries))
    for qi, q in enumerate(queries):
        dx = points[:, 0] - q[0]
        dy = points[:, 1] - q[1]
        dz = points[:, 2] - q[2]
        dist2 = dx * dx + dy * dy + dz * dz
        best = int(np.argmin(dist2))  # argmin returns the first (lowest) index
        idx[qi] = best
        d2[qi] = dist2[best]
    return idx, np.sqrt(d2)


class TestBuild:
    def test_single_point(self):
        index = KdIndex.build(np.array([[1.0, 2.0, 3.0]]))
        assert index.n_points == 1
        i, d = index.nearest([1.0, 2.0, 4.0])
        assert i == 0
        assert d == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            KdIndex.build(np.empty((0, 3)))
        with pytest.raises(ValueError):
            KdIndex.build(np.zeros((4, 2)))
        with pytest.raises(ValueError):
            KdIndex.build(np.array([[0.0, np.nan, 0.0]]))
        with pytest.raises(ValueError):
            KdIndex.build(np.zeros((4, 3)), leaf_size=0)

    def test_deterministic(self, rng):
        pts = rng.normal(size=(500, 3))
        queries = rng.normal(size=(50, 3))
        a = KdIndex.build(pts, leaf_size=8)
        b = KdIndex.build(pts, leaf_size=8)
        assert_array_equal(a._perm, b._perm)
        assert_array_equal(a._split, b._split)
        ia, da = a.nearest_many(queries)
        ib, db = b.nearest_many(queries)
        assert_array_equal(ia, ib)
        assert_array_equal(da, db)

    def test_depth_bound_at_1e4(self, rng):
        pts = rng.random((10000, 3))
        index = KdIndex.build(pts, leaf_size=16)
        # 10000 / 16 = 625 leaves -> ceil(log2) = 10 splits, tolerate one
        # extra level from uneven median splits
        assert index.depth <= 11

    def test_duplicate_points_build(self):
        pts = np.zeros((50, 3))
        index = KdIndex.build(pts, leaf_size=4)
        i, d = index.nearest([0.0, 0.0, 0.0])
        assert i == 0
        assert d == 0.0


class TestQueries:
    def test_exact_hits(self, rng):
        pts = rng.normal(size=(200, 3))
        index = KdIndex.build(pts, leaf_size=4)
        idx, dist = index.nearest_many(pts)
        assert_array_equal(idx, np.arange(200))
        assert_array_equal(dist, np.zeros(200))

    def test_tie_breaks_to_lowest_index(self):
        pts = np.array(
            [
                [5.0, 5.0, 5.0],
                [9.0, 9.0, 9.0],
                [1.0, 0.0, 0.0],
                [7.0, 7.0, 7.0],
                [-1.0, 0.0, 0.0],
            ]
        )
        index = KdIndex.build(pts, leaf_size=1)
        i, d = index.nearest([0.0, 0.0, 0.0])
        assert i == 2  # indices 2 and 4 are both at distance 1
        assert d == pytest.approx(1.0)

    def test_identical_points_tie(self):
        pts = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
        index = KdIndex.build(pts, leaf_size=1)
        i, _ = index.nearest([2.0, 1.0, 1.0])
        assert i == 0

    @pytest.mark.parametrize("n,leaf", [(37, 1), (100, 4), (1000, 16), (4096, 16)])
    def test_matches_bruteforce(self, n, leaf, rng):
        pts = rng.normal(size=(n, 3))
        queries = np.concatenate([rng.normal(size=(64, 3)) * 2.0, pts[:16]])
        index = KdIndex.build(pts, leaf_size=leaf)
        idx, dist = index.nearest_many(queries)
        bidx, bdist = brute_nearest(pts, queries)
        assert_array_equal(idx, bidx)
        assert_array_equal(dist, bdist)

    def test_clustered_points(self, rng):
        # two tight clusters force deep pruning decisions
        pts = np.concatenate(
            [
                rng.normal(size=(300, 3)) * 1e-3,
                rng.normal(size=(300, 3)) * 1e-3 + 10.0,
            ]
        )
        queries = rng.normal(size=(100, 3)) * 6.0 + 3.0
        index = KdIndex.build(pts)
        idx, dist = index.nearest_many(queries)
        bidx, bdist = brute_nearest(pts, queries)
        assert_array_equal(idx, bidx)
        assert_array_equal(dist, bdist)

    def test_grid_points_on_split_planes(self):
        # integer grid: many queries land exactly on split coordinates
        g = np.arange(5, dtype=np.float64)
        pts = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
        index = KdIndex.build(pts, leaf_size=2)
        queries = pts + 0.5
        idx, dist = index.nearest_many(queries)
        bidx, bdist = brute_nearest(pts, queries)
        assert_array_equal(idx, bidx)
        assert_array_equal(dist, bdist)

    def test_query_validation(self):
        index = KdIndex.build(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            index.nearest([0.0, 1.0])
        with pytest.raises(ValueError):
            index.nearest_many(np.zeros((2, 4)))


@given(
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=1, max_value=20),
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_property_matches_bruteforce(n_points, n_queries, leaf_size, seed):
    rng = np.random.default_rng(seed)
    # round to a coarse lattice so exact ties actually occur
    pts = np.round(rng.normal(size=(n_points, 3)) * 2.0)
    queries = np.round(rng.normal(size=(n_queries, 3)) * 2.0)
    index = KdIndex.build(pts, leaf_size=leaf_size)
    idx, dist = index.nearest_many(queries)
    bidx, bdist = brute_nearest(pts, queries)
    assert_array_equal(idx, bidx)
    assert_array_equal(dist, bdist)
