"""Brute-force Cech filtration: the ground-truth diagram for small clouds.

Every subset of at most max_dim+1 points becomes a simplex valued by the
radius of its exact minimal enclosing ball. The subset count is
combinatorial, so the cloud size is guarded by a hard refusal.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import GuardError
from .filtration import FilteredComplex
from .geometry import EnclosingBall, as_points

MAX_ORACLE_POINTS = 24
MAX_ORACLE_DIM = 3

# relative slack when testing containment of candidate balls; far below the
# 1e-9 shrink margin the minimality tests use
_FEAS_EPS = 1e-12


def _circumball(points: np.ndarray):
    """Smallest ball with all given points on its boundary, or None if the
    points are affinely dependent (the solve is singular)."""
    v0 = points[0]
    if points.shape[0] == 1:
        return v0.copy(), 0.0
    a = points[1:] - v0
    g = 0.5 * np.einsum("ij,ij->i", a, a)
    try:
        y = np.linalg.solve(2.0 * (a @ a.T), 2.0 * g)
    except np.linalg.LinAlgError:
        return None
    center = v0 + y @ a
    radius = float(np.linalg.norm(center - v0))
    if not np.isfinite(radius):
        return None
    return center, radius


def min_enclosing_ball(points) -> EnclosingBall:
    """Exact minimal enclosing ball of at most d+1 points.

    Enumerates support subsets: the optimal ball is the circumball of some
    subset of the input, so the smallest feasible circumball is it.
    """
    pts = as_points(points)
    n, dim = pts.shape
    if not 1 <= n <= dim + 1:
        raise ValueError(f"expected between 1 and {dim + 1} points, got {n}")
    best = None
    for size in range(1, n + 1):
        for support in combinations(range(n), size):
            got = _circumball(pts[list(support)])
            if got is None:
                continue
            center, radius = got
            d2 = ((pts - center) ** 2).sum(axis=1)
            if (d2 <= radius * radius * (1.0 + _FEAS_EPS) + 1e-300).all():
                if best is None or radius < best[1]:
                    best = (center, radius)
    center, radius = best
    return EnclosingBall(center=center, radius=radius)


def cech_filtration(X, max_dim: int, max_points: int = MAX_ORACLE_POINTS) -> FilteredComplex:
    """All subsets of size <= max_dim+1 valued by enclosing-ball radius.

    Values are lifted to be face-monotone (a coface never sorts before a
    face), which moves them by at most a few ulps relative to the raw radii.
    The `max_points` guard is a hard refusal (raise, never truncate); the
    default matches what exhaustive subset enumeration tolerates, and
    callers running controlled experiments may raise it explicitly.
    """
    pts = as_points(X)
    n, dim = pts.shape
    if n > max_points:
        raise GuardError(
            f"cech oracle refuses {n} points (limit {max_points}): "
            f"subset enumeration is combinatorial"
        )
    if not 0 <= max_dim <= min(dim, MAX_ORACLE_DIM):
        raise ValueError(f"max_dim must be in [0, {min(dim, MAX_ORACLE_DIM)}]")
    simplices = []
    for k in range(max_dim + 1):
        for verts in combinations(range(n), k + 1):
            ball = min_enclosing_ball(pts[list(verts)])
            simplices.append((verts, k, ball.radius))
    # independent per-subset solves can undercut a facet by ulps near exact
    # ties (cocircular inputs); lift each value to its facets so face order
    # survives the strict comparisons the reduction uses
    index_of = {verts: i for i, (verts, _, _) in enumerate(simplices)}
    for i, (verts, k, value) in enumerate(simplices):
        if k == 0:
            continue
        lifted = max(simplices[index_of[f]][2] for f in combinations(verts, k))
        if lifted > value:
            simplices[i] = (verts, k, lifted)
    keys = [(v, d, verts) for verts, d, v in simplices]
    ranks = sorted(range(len(simplices)), key=lambda i: keys[i])
    order = np.empty(len(simplices), dtype=np.int64)
    order[ranks] = np.arange(len(simplices))
    return FilteredComplex(simplices=simplices, order=order, meta={"source": "cech"})
