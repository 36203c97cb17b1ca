"""Delaunay triangulation of the landmark set, with full face closure.

Construction is delegated to qhull (scipy.spatial.Delaunay); this layer
adds what the pipeline actually consumes: deduplication, a deterministic
degeneracy policy, enumeration of all faces with incidence links, and an
independent empty-circumsphere validator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import Delaunay as _SciDelaunay
from scipy.spatial import QhullError, cKDTree

from .errors import DegeneracyError
from .geometry import as_points

# relative magnitude of the symbolic jitter applied when the input violates
# general position (cocircular/cospherical sites, flat cells)
_JITTER_SCALE = 1e-12
# how close to a circumsphere a non-cell landmark must be to count as a
# general-position violation
_GP_TOL = 1e-9


@dataclass(frozen=True)
class Triangulation:
    """Delaunay complex: simplices of every dimension plus face incidence.

    Vertex ids in the simplex tuples index into `points` (the deduplicated
    landmark coordinates); `vertices` maps them back to the caller's
    original landmark indices. simplices_by_dim[k] is an (n_k, k+1) int
    array with sorted rows in lexicographic order. facet_links[k][i, j] is
    the row (in dimension k-1) of the facet of simplex i obtained by
    dropping its j-th vertex.
    """

    dim: int
    points: np.ndarray
    vertices: np.ndarray
    simplices_by_dim: dict
    facet_links: dict
    dedup_dropped: np.ndarray
    jitter_applied: bool
    warnings: tuple

    @property
    def top_cells(self) -> np.ndarray:
        return self.simplices_by_dim[self.dim]

    def counts(self) -> dict:
        return {k: v.shape[0] for k, v in self.simplices_by_dim.items()}


def _dedup_rows(pts: np.ndarray):
    """Indices of the first occurrence of each distinct row, in input order."""
    seen = {}
    keep = []
    dropped = []
    for i, row in enumerate(pts):
        key = row.tobytes()
        if key in seen:
            dropped.append(i)
        else:
            seen[key] = i
            keep.append(i)
    return np.asarray(keep, dtype=np.int64), np.asarray(dropped, dtype=np.int64)


def _affine_rank(pts: np.ndarray) -> int:
    centered = pts - pts.mean(axis=0)
    return int(np.linalg.matrix_rank(centered, tol=1e-12 * max(1.0, np.abs(pts).max())))


def _try_qhull(pts: np.ndarray):
    tri = _SciDelaunay(pts)
    if len(tri.coplanar):
        # points qhull left out of the triangulation: treat as degeneracy
        raise QhullError("input has unrepresented (coplanar) points")
    return tri.simplices


def _violates_general_position(pts: np.ndarray, cells: np.ndarray) -> bool:
    """True if some top cell is flat or its circumsphere carries extra sites.

    More than dim+1 points on a common empty circumsphere means the
    triangulation choice is arbitrary; the caller then breaks the tie with
    a deterministic jitter.
    """
    dim = pts.shape[1]
    centers, radii = circumcenters(pts, cells)
    if not np.isfinite(radii).all():
        return True  # flat cell: circumcenter solve was singular
    tree = cKDTree(pts)
    scale = max(1.0, float(np.abs(pts).max()))
    for c, r in zip(centers, radii):
        if len(tree.query_ball_point(c, r + _GP_TOL * scale)) > dim + 1:
            return True
    return False


def delaunay(landmarks, seed: int = 0) -> Triangulation:
    """Triangulate the landmark set in R^2 or R^3.

    Exact duplicates are dropped with a warning record. If qhull cannot
    represent every point (exactly degenerate input), a deterministic
    seeded jitter of relative size 1e-12 is applied and construction is
    retried; inputs whose affine span is deficient raise DegeneracyError.
    Output is deterministic for a fixed (landmarks, seed).
    """
    pts = as_points(landmarks)
    n, dim = pts.shape
    warnings = []

    keep, dropped = _dedup_rows(pts)
    if dropped.size:
        warnings.append(f"dropped {dropped.size} duplicate landmark(s)")
        pts = pts[keep]
        n = pts.shape[0]
    if n < dim + 1:
        raise DegeneracyError(f"need at least {dim + 1} distinct points in R^{dim}, got {n}")
    if _affine_rank(pts) < dim:
        raise DegeneracyError("landmarks are affinely dependent (flat input)")

    # jitter fixes only the combinatorial choice on degenerate input; all
    # filtration values downstream are computed from the true coordinates
    jitter_applied = False
    scale = float(np.abs(pts).max()) or 1.0
    rng = np.random.Generator(np.random.Philox(seed))
    cells = None
    for attempt in range(4):
        work = pts
        if attempt > 0:
            jit = rng.uniform(-1.0, 1.0, size=pts.shape) * _JITTER_SCALE * scale * (10.0 ** (attempt - 1))
            work = pts + jit
        try:
            got = _try_qhull(work)
        except QhullError:
            continue
        # The occupancy test gates only the unjittered attempt: jittered
        # coordinates are still near-degenerate by any tolerance, but the
        # perturbation makes qhull's tie-break well defined and seeded.
        if attempt == 0 and _violates_general_position(work, np.sort(np.asarray(got, dtype=np.int64), axis=1)):
            continue
        cells = got
        if attempt > 0:
            jitter_applied = True
            warnings.append(
                f"input violates general position; applied seeded jitter "
                f"(relative {_JITTER_SCALE * 10.0 ** (attempt - 1):g})"
            )
        break
    if cells is None:
        raise DegeneracyError("could not triangulate landmarks even after jitter")

    cells = np.sort(np.asarray(cells, dtype=np.int64), axis=1)
    # unique lexicographically sorted rows per dimension, built by closing
    # the top cells under taking subsets
    simplices_by_dim = {}
    for k in range(dim + 1):
        if k == dim:
            faces = cells
        else:
            parts = [cells[:, list(c)] for c in combinations(range(dim + 1), k + 1)]
            faces = np.concatenate(parts, axis=0)
        simplices_by_dim[k] = np.unique(faces, axis=0)

    facet_links = {}
    for k in range(1, dim + 1):
        lower = simplices_by_dim[k - 1]
        index = {tuple(row): i for i, row in enumerate(lower)}
        simp = simplices_by_dim[k]
        links = np.empty((simp.shape[0], k + 1), dtype=np.int64)
        for i, row in enumerate(simp):
            t = tuple(row)
            for j in range(k + 1):
                links[i, j] = index[t[:j] + t[j + 1 :]]
        facet_links[k] = links

    return Triangulation(
        dim=dim,
        points=pts,
        vertices=keep,
        simplices_by_dim=simplices_by_dim,
        facet_links=facet_links,
        dedup_dropped=dropped,
        jitter_applied=jitter_applied,
        warnings=tuple(warnings),
    )


def circumcenters(points: np.ndarray, cells: np.ndarray):
    """Circumcenter and circumradius of each full-dimensional cell."""
    dim = points.shape[1]
    centers = np.empty((cells.shape[0], dim))
    radii = np.empty(cells.shape[0])
    for i, cell in enumerate(cells):
        v = points[cell]
        a = v[1:] - v[0]
        g = 0.5 * np.einsum("ij,ij->i", a, a)
        try:
            y = np.linalg.solve(a @ a.T, g)
        except np.linalg.LinAlgError:
            centers[i] = np.nan
            radii[i] = np.inf
            continue
        c = v[0] + y @ a
        centers[i] = c
        radii[i] = float(np.linalg.norm(c - v[0]))
    return centers, radii


def circumsphere_check(triangulation: Triangulation, tolerance: float = 1e-7) -> list:
    """Validate the empty-circumsphere property.

    Returns (cell_index, point_index) pairs where a landmark sits inside a
    top cell's circumsphere by more than `tolerance` (absolute depth).
    """
    pts = triangulation.points
    cells = triangulation.top_cells
    centers, radii = circumcenters(pts, cells)
    violations = []
    for i, cell in enumerate(cells):
        if not np.isfinite(radii[i]):
            continue
        d = np.linalg.norm(pts - centers[i], axis=1)
        inside = np.nonzero(d < radii[i] - tolerance)[0]
        for p in inside:
            if p not in cell:
                violations.append((i, int(p)))
    return violations
