"""Flood filtration of the Delaunay complex of a landmark set.

Every simplex sigma gets the value max over its sample points p of
min over the cloud x of d(p, x): how far the cloud has to flood before
sigma's hull is covered. Values for all faces of a maximal cell are
read off the cell's own barycentric grid (the face's grid rows are a
subset), which makes monotonicity structural rather than repaired.

The fast path restricts each cell's distance minimization to the cloud
points inside sqrt(2) times its enclosing ball: the nearest cloud point
to any hull point provably lies in that ball whenever the landmarks are
a subset of the cloud. External landmark sets void that guarantee, so
they are routed to exact nearest-neighbor queries instead.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._kernels import min_sq_dists, rowwise_sq_dists, sq_dists_to_point
from .delaunay import Triangulation, delaunay
from .errors import IntegrityError
from .geometry import (
    PointCloud,
    as_points,
    barycentric_grid,
    barycentric_grid_template,
    farthest_point_sampling,
    grid_covering_bound,
    ritter_enclosing_ball,
    sample_simplex_uniform,
)
from .spatial import AxisSortedCloud, KdTree, build_axis_sorted, slab_indices, widest_axis

_SAMPLERS = ("grid", "uniform-random")
_BACKENDS = ("masked-batch", "kdtree")

STAGE_LANDMARKS = "Landmark select."
STAGE_DELAUNAY = "Delaunay triang."
STAGE_MASKING = "Masking"
STAGE_FILTRATION = "Filtration"


@dataclass(frozen=True)
class FloodConfig:
    """Knobs for building the filtration.

    grid_resolution m puts C(m+k, k) sample points on each k-simplex;
    batch_size groups maximal cells into masking units. The
    uniform-random sampler replaces the grid with sampler_count points
    drawn per simplex (seeded), trading the structural monotonicity
    guarantee for a definitional one. threads=None means one worker per
    CPU; results do not depend on the worker count.
    """

    grid_resolution: int = 20
    batch_size: int = 256
    sampler: str = "grid"
    sampler_count: int = 100
    sampler_seed: int = 0
    backend: str = "masked-batch"
    fps_start: int = 0
    delaunay_seed: int = 0
    threads: int | None = None

    def validate(self) -> None:
        if self.grid_resolution < 1:
            raise ValueError("grid_resolution must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.sampler not in _SAMPLERS:
            raise ValueError(f"sampler must be one of {_SAMPLERS}")
        if self.sampler_count < 1:
            raise ValueError("sampler_count must be >= 1")
        if self.backend not in _BACKENDS:
            raise ValueError(f"backend must be one of {_BACKENDS}")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class CandidateMask:
    """Per maximal simplex: cloud indices inside its masking ball.

    Built per batch; every cloud point within sqrt(2) times the simplex's
    enclosing-ball radius of its center is present (closed ball, tested as
    d^2 <= 2 r^2). Index lists are ascending.
    """

    simplices: np.ndarray
    candidates: list


@dataclass(frozen=True)
class FilteredComplex:
    """All simplices with filtration values and a total order.

    `simplices` holds (vertex tuple, dimension, value) grouped by
    dimension, lexicographic within each; `order[i]` is the rank of
    simplices[i] under (value, dimension, vertex tuple). Faces never
    rank after their cofaces. `meta` carries stage timings and
    provenance notes.
    """

    simplices: list
    order: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.simplices)

    def in_order(self) -> list:
        """Simplices sorted by the total order."""
        ranked = [None] * len(self.simplices)
        for i, rank in enumerate(self.order):
            ranked[rank] = self.simplices[i]
        return ranked

    def value_map(self) -> dict:
        """vertex tuple -> filtration value."""
        return {verts: value for verts, _, value in self.simplices}


def compute_mask(triangulation: Triangulation, X, sorted_cloud: AxisSortedCloud, batch) -> CandidateMask:
    """Candidate cloud indices for each maximal simplex of one batch.

    One axis slab covers the whole batch (bounds = the extreme
    center +- sqrt(2) r along the sort axis); each simplex then keeps the
    slab points inside its own masking ball. An empty ball (possible only
    with landmarks far from the cloud) falls back to the full slab, then
    to the full cloud, so downstream minimization always has candidates.
    """
    pts = as_points(X)
    cells = np.asarray(batch, dtype=np.int64)
    if cells.ndim == 1:
        cells = cells.reshape(1, -1)
    if cells.shape[0] == 0:
        return CandidateMask(cells, [])
    balls = [ritter_enclosing_ball(triangulation.points[c]) for c in cells]
    axis = sorted_cloud.axis
    spans = [math.sqrt(2.0) * b.radius * (1.0 + 1e-12) for b in balls]
    lo = min(b.center[axis] - s for b, s in zip(balls, spans))
    hi = max(b.center[axis] + s for b, s in zip(balls, spans))
    slab = np.sort(slab_indices(sorted_cloud, lo, hi))
    slab_pts = pts[slab]
    candidates = []
    for ball in balls:
        if slab.size:
            d2 = sq_dists_to_point(slab_pts, ball.center)
            keep = slab[d2 <= 2.0 * ball.radius * ball.radius]
        else:
            keep = slab
        if keep.size == 0:
            keep = slab if slab.size else np.arange(pts.shape[0], dtype=np.int64)
        candidates.append(keep)
    return CandidateMask(cells, candidates)


def simplex_filtration(simplex, grid_points: np.ndarray, candidates, X) -> float:
    """max over grid points of the min distance to the candidate cloud points.

    With a mask satisfying the covering guarantee this equals the value
    over the full cloud; candidates must be non-empty.
    """
    cand = np.asarray(candidates, dtype=np.int64)
    if cand.size == 0:
        raise IntegrityError(f"empty candidate set for simplex {tuple(simplex)}")
    msq = min_sq_dists(grid_points, as_points(X)[cand])
    return float(np.sqrt(msq.max()))


def flood_value_exact_gap(simplex, m: int, X) -> tuple[float, float]:
    """(discrete value, upper bound on the exact value) at resolution m.

    The grid value lower-bounds the hull value; adding the grid covering
    bound upper-bounds it, so the pair brackets the continuous filtration
    value.
    """
    verts = as_points(simplex)
    tpl = barycentric_grid_template(verts.shape[0] - 1, m)
    grid = barycentric_grid(tpl, verts)
    pts = as_points(X)
    f = float(np.sqrt(min_sq_dists(grid, pts).max()))
    return f, f + grid_covering_bound(verts, m)


def _is_subset_of_cloud(landmarks: np.ndarray, pts: np.ndarray) -> bool:
    rows = {row.tobytes() for row in pts}
    return all(row.tobytes() in rows for row in landmarks)


def _face_owners(tri: Triangulation):
    """For every simplex: the lex-first top cell whose grid covers it.

    Returns, per top cell, the list of (position subset, dimension, row)
    triples it is responsible for. Ownership is a fixed function of the
    triangulation, so values never depend on processing order or batch
    boundaries.
    """
    row_index = {
        k: {tuple(r): i for i, r in enumerate(tri.simplices_by_dim[k])}
        for k in range(tri.dim + 1)
    }
    subsets = [
        S for size in range(1, tri.dim + 2) for S in combinations(range(tri.dim + 1), size)
    ]
    owned = [[] for _ in range(tri.top_cells.shape[0])]
    seen = set()
    for ci, cell in enumerate(tri.top_cells):
        t = tuple(cell)
        for S in subsets:
            face = tuple(t[p] for p in S)
            if face in seen:
                continue
            seen.add(face)
            k = len(S) - 1
            owned[ci].append((S, k, row_index[k][face]))
    return owned


def _extract_faces(msq_by_dim, owned_faces, tpl, msq_cell) -> None:
    for S, k, row in owned_faces:
        rows = tpl.face_index_map[S]
        msq_by_dim[k][row] = msq_cell[rows].max()


def _grid_values_masked(pts, tri, config, timings):
    t0 = time.perf_counter()
    axis = widest_axis(pts)
    sorted_cloud = build_axis_sorted(pts, axis)
    cells = tri.top_cells
    centers = np.array([ritter_enclosing_ball(tri.points[c]).center for c in cells])
    batch_order = np.argsort(centers[:, axis], kind="stable")
    owned = _face_owners(tri)
    timings[STAGE_MASKING] += time.perf_counter() - t0

    tpl = barycentric_grid_template(tri.dim, config.grid_resolution)
    msq_by_dim = {k: np.full(v.shape[0], np.nan) for k, v in tri.simplices_by_dim.items()}

    def run_batch(batch):
        t0 = time.perf_counter()
        mask = compute_mask(tri, pts, sorted_cloud, cells[batch])
        t1 = time.perf_counter()
        for ci, cand in zip(batch, mask.candidates):
            grid = barycentric_grid(tpl, tri.points[cells[ci]])
            msq = min_sq_dists(grid, pts[cand])
            _extract_faces(msq_by_dim, owned[ci], tpl, msq)
        return t1 - t0, time.perf_counter() - t1

    batches = [
        batch_order[a : a + config.batch_size]
        for a in range(0, batch_order.size, config.batch_size)
    ]
    workers = config.threads or 1
    if workers == 1:
        stage_pairs = [run_batch(b) for b in batches]
    else:
        # face ownership makes output slots disjoint across cells, so
        # batches can run concurrently (the distance kernel drops the GIL)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stage_pairs = list(pool.map(run_batch, batches))
    for mask_dt, filt_dt in stage_pairs:
        timings[STAGE_MASKING] += mask_dt
        timings[STAGE_FILTRATION] += filt_dt
    return msq_by_dim


def _grid_values_kdtree(pts, tri, config, subset_mode, timings):
    t0 = time.perf_counter()
    tree = KdTree(pts)
    owned = _face_owners(tri)
    timings[STAGE_MASKING] += time.perf_counter() - t0

    tpl = barycentric_grid_template(tri.dim, config.grid_resolution)
    msq_by_dim = {k: np.full(v.shape[0], np.nan) for k, v in tri.simplices_by_dim.items()}
    for ci, cell in enumerate(tri.top_cells):
        t0 = time.perf_counter()
        grid = barycentric_grid(tpl, tri.points[cell])
        if subset_mode:
            # same candidate set as the masked path, gathered by the tree
            ball = ritter_enclosing_ball(tri.points[cell])
            sq = 2.0 * ball.radius * ball.radius
            cand = tree.ball(ball.center, math.sqrt(sq), sq_radius=sq)
            timings[STAGE_MASKING] += time.perf_counter() - t0
            t0 = time.perf_counter()
            msq = min_sq_dists(grid, pts[cand])
        else:
            # external landmarks: the masking ball guarantee needs the
            # simplex vertices inside the cloud, so query globally instead
            idx = tree.nearest_many(grid)
            msq = rowwise_sq_dists(grid, pts[idx])
        _extract_faces(msq_by_dim, owned[ci], tpl, msq)
        timings[STAGE_FILTRATION] += time.perf_counter() - t0
    return msq_by_dim


def _random_sampler_values(pts, tri, config, subset_mode, timings):
    """Independent uniform samples per simplex, monotone by completion.

    Sample sets of faces are not subsets of their cofaces' sets here, so
    each value is completed to the max over the simplex's own sample value
    and its facets' values.
    """
    t0 = time.perf_counter()
    tree = KdTree(pts)
    timings[STAGE_MASKING] += time.perf_counter() - t0

    t0 = time.perf_counter()
    values = {}
    if subset_mode:
        values[0] = np.zeros(tri.simplices_by_dim[0].shape[0])
    else:
        verts = tri.points
        idx = tree.nearest_many(verts)
        values[0] = np.sqrt(rowwise_sq_dists(verts, pts[idx]))
    for k in range(1, tri.dim + 1):
        simp = tri.simplices_by_dim[k]
        links = tri.facet_links[k]
        vals = np.empty(simp.shape[0])
        for i, row in enumerate(simp):
            seed = (config.sampler_seed, k, i)
            sample = sample_simplex_uniform(tri.points[row], config.sampler_count, seed=seed)
            sample = np.vstack([tri.points[row], sample])
            idx = tree.nearest_many(sample)
            raw = float(np.sqrt(rowwise_sq_dists(sample, pts[idx]).max()))
            vals[i] = max(raw, float(values[k - 1][links[i]].max()))
        values[k] = vals
    timings[STAGE_FILTRATION] += time.perf_counter() - t0
    return values


def _validate_monotone(tri: Triangulation, values_by_dim) -> None:
    for k in range(1, tri.dim + 1):
        facet_vals = values_by_dim[k - 1][tri.facet_links[k]]
        bad = facet_vals > values_by_dim[k][:, None]
        if bad.any():
            raise IntegrityError(
                f"filtration not monotone: {int(bad.sum())} face pair(s) in dim {k}"
            )


def build_flood_filtration(X, L, config: FloodConfig | None = None) -> FilteredComplex:
    """Full pipeline: landmarks -> Delaunay -> per-simplex flood values.

    L is either a landmark count (selected by farthest-point sampling
    from config.fps_start) or an explicit (k, d) point set. Landmarks
    that are not a subset of the cloud are valued with exact
    nearest-neighbor queries (vertices get d(v, X)); subsets get the
    masked fast path and vertices at exactly 0.
    """
    config = config or FloodConfig()
    config.validate()
    cloud = X if isinstance(X, PointCloud) else PointCloud(np.asarray(X, dtype=np.float64))
    pts = cloud.points
    meta = {"config": config}
    timings = {
        STAGE_LANDMARKS: 0.0,
        STAGE_DELAUNAY: 0.0,
        STAGE_MASKING: 0.0,
        STAGE_FILTRATION: 0.0,
    }

    t0 = time.perf_counter()
    if isinstance(L, (int, np.integer)):
        landmark_idx = farthest_point_sampling(pts, int(L), start=config.fps_start)
        landmarks = pts[landmark_idx]
        subset_mode = True
        meta["landmark_indices"] = landmark_idx
    else:
        landmarks = as_points(L)
        subset_mode = _is_subset_of_cloud(landmarks, pts)
    meta["landmark_mode"] = "subset" if subset_mode else "external"
    timings[STAGE_LANDMARKS] = time.perf_counter() - t0

    t0 = time.perf_counter()
    tri = delaunay(landmarks, seed=config.delaunay_seed)
    timings[STAGE_DELAUNAY] = time.perf_counter() - t0
    meta["triangulation"] = tri
    meta["warnings"] = list(tri.warnings)

    backend = config.backend
    if not subset_mode and backend == "masked-batch":
        backend = "kdtree"
        meta["warnings"].append(
            "landmarks are not a subset of the cloud; masked backend is unsound, using kdtree"
        )
    meta["backend"] = backend

    if config.sampler == "uniform-random":
        values_by_dim = _random_sampler_values(pts, tri, config, subset_mode, timings)
    else:
        if backend == "masked-batch":
            msq_by_dim = _grid_values_masked(pts, tri, config, timings)
        else:
            msq_by_dim = _grid_values_kdtree(pts, tri, config, subset_mode, timings)
        for k, msq in msq_by_dim.items():
            if np.isnan(msq).any():
                raise IntegrityError(f"unvalued simplices in dimension {k}")
        values_by_dim = {k: np.sqrt(msq) for k, msq in msq_by_dim.items()}

    _validate_monotone(tri, values_by_dim)
    meta["timings"] = timings

    simplices = []
    for k in range(tri.dim + 1):
        vals = values_by_dim[k]
        for i, row in enumerate(tri.simplices_by_dim[k]):
            simplices.append((tuple(int(v) for v in row), k, float(vals[i])))
    ranks = sorted(range(len(simplices)), key=lambda i: (simplices[i][2], simplices[i][1], simplices[i][0]))
    order = np.empty(len(simplices), dtype=np.int64)
    order[ranks] = np.arange(len(simplices))
    return FilteredComplex(simplices=simplices, order=order, meta=meta)
