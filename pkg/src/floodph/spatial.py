"""Spatial lookup structures for the flooding inner loop.

Two paths: an axis-sorted view of the cloud supporting O(log n) slab
selection, and an exact nearest-neighbor k-d tree. Both are immutable after
construction; concurrent queries are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import as_points, cross_sq_dists


@dataclass(frozen=True)
class AxisSortedCloud:
    """A point cloud plus a permutation sorting it along one coordinate."""

    base: np.ndarray          # the (n, d) coordinate array
    axis: int
    order: np.ndarray         # permutation: base[order] is coordinate-sorted
    sorted_coords: np.ndarray  # base[order, axis], non-decreasing


def build_axis_sorted(cloud, axis: int) -> AxisSortedCloud:
    """Sort the cloud along one axis (stable, O(n log n))."""
    pts = as_points(cloud)
    if not 0 <= axis < pts.shape[1]:
        raise ValueError(f"axis must be in [0, {pts.shape[1]}), got {axis}")
    order = np.argsort(pts[:, axis], kind="stable")
    return AxisSortedCloud(
        base=pts, axis=axis, order=order, sorted_coords=pts[order, axis]
    )


def widest_axis(cloud) -> int:
    """Coordinate with the largest extent; the default slab axis."""
    pts = as_points(cloud)
    return int(np.argmax(pts.max(axis=0) - pts.min(axis=0)))


def slab_indices(sorted_cloud: AxisSortedCloud, lo: float, hi: float) -> np.ndarray:
    """Indices of all points whose sort-axis coordinate lies in [lo, hi].

    Two binary searches on the presorted coordinates; the result is a
    contiguous run of the sort order (possibly empty).
    """
    if lo > hi:
        raise ValueError("slab needs lo <= hi")
    a = np.searchsorted(sorted_cloud.sorted_coords, lo, side="left")
    b = np.searchsorted(sorted_cloud.sorted_coords, hi, side="right")
    return sorted_cloud.order[a:b]


class KdTree:
    """Exact nearest-neighbor index (median splits on the widest axis,
    bucket leaves of 16).

    Queries return exactly what a linear scan would: nearest distances are
    recomputed with the package's own distance kernel and ties are broken
    by the smallest point index.
    """

    _LEAF = 16

    def __init__(self, cloud):
        pts = as_points(cloud)
        if pts.shape[0] == 0:
            raise ValueError("k-d tree needs at least one point")
        self.points = pts
        self._tree = cKDTree(pts, leafsize=self._LEAF, balanced_tree=True, compact_nodes=True)

    def __len__(self) -> int:
        return self.points.shape[0]

    def ball(self, center, radius: float, sq_radius: float | None = None) -> np.ndarray:
        """Ascending indices of all points within `radius` of center (closed ball).

        When `sq_radius` is given the exact membership test becomes
        d^2 <= sq_radius instead of d^2 <= radius^2, so a caller holding a
        squared threshold (e.g. 2 r^2) avoids the rounding of its sqrt.
        """
        center = np.asarray(center, dtype=np.float64)
        # tiny inflation so boundary points never drop out to rounding,
        # then an exact closed-ball filter with our own kernel
        r = float(radius)
        cand = self._tree.query_ball_point(center, r * (1.0 + 1e-12) + 1e-300)
        cand = np.asarray(sorted(cand), dtype=np.int64)
        if cand.size == 0:
            return cand
        d2 = cross_sq_dists(self.points[cand], center.reshape(1, -1))[:, 0]
        return cand[d2 <= (r * r if sq_radius is None else sq_radius)]

    def nearest_many(self, queries) -> np.ndarray:
        """Nearest-neighbor index per query row.

        No tie canonicalization: among equidistant points the index choice
        is the tree's own (deterministic for a fixed tree). Callers wanting
        index-stable ties use `nearest` per point.
        """
        q = np.asarray(queries, dtype=np.float64)
        _, idx = self._tree.query(q)
        return np.asarray(idx, dtype=np.int64)


def nearest(tree: KdTree, query) -> tuple[int, float]:
    """Exact nearest neighbor of `query`; ties go to the smallest index."""
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    d0, _ = tree._tree.query(q)
    # collect everything within a hair of the reported distance, then settle
    # the winner with the package kernel so ties are index-deterministic
    r = d0 * (1.0 + 1e-9) + 1e-300
    cand = np.asarray(sorted(tree._tree.query_ball_point(q, r)), dtype=np.int64)
    d2 = cross_sq_dists(tree.points[cand], q.reshape(1, -1))[:, 0]
    best = int(np.argmin(d2))  # argmin takes the first minimizer: smallest index
    return int(cand[best]), float(np.sqrt(d2[best]))
