"""Geometric primitives shared by the whole pipeline.

Point clouds, farthest point sampling, enclosing balls, barycentric grids
on simplices, and Hausdorff distances. Everything is float64 numpy; all
functions are pure, so they are safe to call from many threads at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

_TOL = 1e-9  # default absolute tolerance for geometric assertions


@dataclass(frozen=True)
class PointCloud:
    """Dense array of d-dimensional points (d in {2, 3}), 64-bit floats.

    Wraps an (n, dim) array, validated once at construction; treat the
    array as read-only afterwards.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise ValueError("expected an (n, dim) array of coordinates")
        n, dim = pts.shape
        if n < 1:
            raise ValueError("point cloud needs at least one point")
        if dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {dim}")
        if not np.isfinite(pts).all():
            raise ValueError("coordinates must be finite (no NaN/Inf)")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def as_points(cloud) -> np.ndarray:
    """Coordinate array behind a PointCloud or an array-like, as float64 (n, d)."""
    if isinstance(cloud, PointCloud):
        return cloud.points
    pts = np.asarray(cloud, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    return pts


def _coordinate_sq_sum(diff: np.ndarray) -> np.ndarray:
    """Sum of squares over the last axis, accumulated coordinate by
    coordinate in ascending order. einsum/np.sum may reassociate the terms
    (SIMD), which costs a ulp against the scalar loop; this form does not.
    """
    out = diff[..., 0] * diff[..., 0]
    for k in range(1, diff.shape[-1]):
        out = out + diff[..., k] * diff[..., k]
    return out


def _sq_dists_to(pts: np.ndarray, q: np.ndarray) -> np.ndarray:
    return _coordinate_sq_sum(pts - q)


def cross_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distance matrix between the rows of a and the rows of b.

    Computed as elementwise (a - b)**2 sums, never the |a|^2 + |b|^2 - 2ab
    expansion, so the per-pair result does not depend on the surrounding
    block shape. Every distance in the package funnels through this or the
    equivalent scalar loop in _kernels, which keeps independently computed
    values bit-comparable.
    """
    return _coordinate_sq_sum(a[:, None, :] - b[None, :, :])


def farthest_point_sampling(cloud, k: int, start: int = 0) -> np.ndarray:
    """Greedy landmark selection: begin at `start`, then repeatedly take the
    point maximizing the distance to everything chosen so far.

    Returns k distinct indices into the cloud. Ties go to the smallest
    index, which makes the result reproducible across runs, platforms and
    thread counts. Runs in O(n*k) via an incrementally maintained
    min-distance array.
    """
    pts = as_points(cloud)
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if not 0 <= start < n:
        raise ValueError(f"start must be in [0, {n}), got {start}")
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = start
    d2 = _sq_dists_to(pts, pts[start])
    d2[start] = -1.0  # sentinel below any real distance: never re-picked
    for i in range(1, k):
        nxt = int(np.argmax(d2))  # argmax returns the first maximizer: smallest index wins ties
        chosen[i] = nxt
        np.minimum(d2, _sq_dists_to(pts, pts[nxt]), out=d2)
        d2[nxt] = -1.0
    return chosen


@dataclass(frozen=True)
class EnclosingBall:
    """A ball guaranteed to contain some simplex; not necessarily minimal."""

    center: np.ndarray
    radius: float


def ritter_enclosing_ball(simplex_vertices) -> EnclosingBall:
    """Cheap enclosing ball of a simplex: center at the midpoint of the
    longest edge, radius the largest center-to-vertex distance.

    Edge-length ties are broken by the lexicographically smallest vertex
    index pair. The ball is not minimal, but it always contains all the
    vertices, which is the only property the masking step relies on.
    """
    verts = as_points(simplex_vertices)
    s = verts.shape[0]
    if s < 2:
        raise ValueError("enclosing ball needs at least 2 vertices")
    best_d2, bi, bj = -1.0, 0, 1
    for i, j in combinations(range(s), 2):
        d2 = float(np.sum((verts[i] - verts[j]) ** 2))
        if d2 > best_d2:
            best_d2, bi, bj = d2, i, j
    center = 0.5 * (verts[bi] + verts[bj])
    radius = math.sqrt(float(np.max(np.sum((verts - center) ** 2, axis=1))))
    return EnclosingBall(center=center, radius=radius)


@dataclass(frozen=True)
class BarycentricGridTemplate:
    """Evenly spaced barycentric weights on the standard k-simplex.

    `weights` holds every tuple (c0/m, ..., ck/m) with nonnegative integers
    ci summing to m, in lexicographic order of the integer tuples; there are
    C(m+k, k) of them. `face_index_map[S]` lists the rows supported on the
    face spanned by the vertex positions in S (all other coordinates zero);
    restricting those rows to the S columns reproduces the face's own
    template row for row. That nesting is what lets a face's filtration
    value be read straight off a maximal simplex's grid.
    """

    simplex_dim: int
    resolution: int
    weights: np.ndarray  # (C(m+k, k), k+1) float64
    face_index_map: dict

    @property
    def grid_size(self) -> int:
        return self.weights.shape[0]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def barycentric_grid_template(simplex_dim: int, resolution: int) -> BarycentricGridTemplate:
    """Build (and cache) the weight template for a k-simplex at resolution m."""
    k, m = simplex_dim, resolution
    if k < 0:
        raise ValueError("simplex dimension must be nonnegative")
    if m < 1:
        raise ValueError("resolution must be at least 1")
    counts = np.array(list(_compositions(m, k + 1)), dtype=np.int64)
    weights = counts / float(m)
    fim = {}
    all_rows = np.arange(counts.shape[0])
    for size in range(1, k + 2):
        for face in combinations(range(k + 1), size):
            off = [i for i in range(k + 1) if i not in face]
            if off:
                sel = np.nonzero((counts[:, off] == 0).all(axis=1))[0]
            else:
                sel = all_rows
            fim[face] = sel
    return BarycentricGridTemplate(k, m, weights, fim)


def barycentric_grid(template: BarycentricGridTemplate, simplex_vertices) -> np.ndarray:
    """Embed the template into Euclidean space: row i is sum_j w[i, j] * v_j.

    The accumulation runs in ascending vertex position, so rows supported on
    a face come out bit-identical to the face's own embedded grid (the terms
    with zero weight contribute an exact 0.0).
    """
    verts = as_points(simplex_vertices)
    if verts.shape[0] != template.simplex_dim + 1:
        raise ValueError("vertex count does not match the template dimension")
    w = template.weights
    out = w[:, 0:1] * verts[0]
    for j in range(1, verts.shape[0]):
        out = out + w[:, j : j + 1] * verts[j]
    return out


def grid_covering_bound(simplex_vertices, m: int) -> float:
    """Upper bound on the covering radius of the resolution-m grid inside
    its simplex: (1/m) * sqrt(sum of squared pairwise edge lengths)."""
    if m < 1:
        raise ValueError("resolution must be at least 1")
    verts = as_points(simplex_vertices)
    total = 0.0
    for i, j in combinations(range(verts.shape[0]), 2):
        total += float(np.sum((verts[i] - verts[j]) ** 2))
    return math.sqrt(total) / m


def directed_hausdorff(A, B) -> float:
    """max over a in A of min over b in B of |a - b|. Not symmetric.

    The symmetric Hausdorff distance is the max of the two directions (see
    metrics.hausdorff_distance).
    """
    a = as_points(A)
    b = as_points(B)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("directed_hausdorff needs non-empty point sets")
    worst = 0.0
    step = max(1, int(4_000_000 // max(1, b.shape[0])))
    for lo in range(0, a.shape[0], step):
        d2 = np.min(cross_sq_dists(a[lo : lo + step], b), axis=1)
        worst = max(worst, float(d2.max()))
    return math.sqrt(worst)


def random_covering_count(dim: int, eps: float, delta: float) -> int:
    """Samples per simplex so that uniform draws cover it to eps * diam with
    probability at least 1 - delta: ceil((4/eps)^d (d ln(4/eps) + ln(1/delta)))."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    base = (4.0 / eps) ** dim
    return int(math.ceil(base * (dim * math.log(4.0 / eps) + math.log(1.0 / delta))))


def sample_simplex_uniform(simplex_vertices, count: int, seed=0) -> np.ndarray:
    """`count` points drawn uniformly from the convex hull of the vertices.

    Uses flat Dirichlet weights under a counter-based (Philox) generator, so
    output is reproducible across platforms for a fixed seed. `seed` may be
    an int or a numpy SeedSequence.
    """
    verts = as_points(simplex_vertices)
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    w = rng.dirichlet(np.ones(verts.shape[0]), size=count)
    out = w[:, 0:1] * verts[0]
    for j in range(1, verts.shape[0]):
        out = out + w[:, j : j + 1] * verts[j]
    return out
