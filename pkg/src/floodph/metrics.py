"""Distances between diagrams and between point clouds.

Bottleneck distance is computed exactly: binary search over the sorted
candidate costs (pairwise l-infinity distances plus diagonal projection
costs), deciding feasibility at each threshold with a maximum bipartite
matching. Essential classes (infinite death) are matched among themselves,
with infinity minus infinity treated as zero; an essential count mismatch
makes the distance infinite.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .geometry import as_points, directed_hausdorff
from .persistence import PersistenceDiagram


def _points_in_dim(dgm, k: int) -> list:
    if isinstance(dgm, PersistenceDiagram):
        return list(dgm.in_dim(k))
    return [(float(b), float(d)) for b, d in dgm]


def _essential_cost(births_a: list, births_b: list) -> float:
    if len(births_a) != len(births_b):
        return math.inf
    # sorted pairing minimizes the max difference for points on a line
    return max((abs(a - b) for a, b in zip(sorted(births_a), sorted(births_b))), default=0.0)


def _feasible(finite_a, finite_b, diag_a, diag_b, t: float) -> bool:
    """Perfect matching in the threshold-t graph?

    Left side: A points then diagonal copies for B; right side: B points
    then diagonal copies for A. A point reaches its own diagonal copy at
    its projection cost; copy-copy edges are free.
    """
    na, nb = len(finite_a), len(finite_b)
    n = na + nb
    if n == 0:
        return True
    rows, cols = [], []
    for i, (ba, da) in enumerate(finite_a):
        for j, (bb, db) in enumerate(finite_b):
            if max(abs(ba - bb), abs(da - db)) <= t:
                rows.append(i)
                cols.append(j)
        if diag_a[i] <= t:
            rows.append(i)
            cols.append(nb + i)
    for j in range(nb):
        if diag_b[j] <= t:
            rows.append(na + j)
            cols.append(j)
        for i in range(na):
            rows.append(na + j)
            cols.append(nb + i)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match != -1).sum()) == n


def bottleneck_distance(A, B, k: int = 0) -> float:
    """Exact bottleneck distance between dimension-k diagrams.

    Accepts PersistenceDiagram objects or raw (birth, death) lists.
    """
    pa = _points_in_dim(A, k)
    pb = _points_in_dim(B, k)
    finite_a = [(b, d) for b, d in pa if math.isfinite(d)]
    finite_b = [(b, d) for b, d in pb if math.isfinite(d)]
    essential = _essential_cost(
        [b for b, d in pa if not math.isfinite(d)],
        [b for b, d in pb if not math.isfinite(d)],
    )
    if math.isinf(essential):
        return math.inf
    diag_a = [(d - b) / 2.0 for b, d in finite_a]
    diag_b = [(d - b) / 2.0 for b, d in finite_b]
    candidates = {0.0}
    candidates.update(diag_a)
    candidates.update(diag_b)
    for ba, da in finite_a:
        for bb, db in finite_b:
            candidates.add(max(abs(ba - bb), abs(da - db)))
    costs = sorted(candidates)
    lo, hi = 0, len(costs) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(finite_a, finite_b, diag_a, diag_b, costs[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(costs[lo], essential)


def hausdorff_distance(A, B) -> float:
    """Symmetric Hausdorff distance: max of the two directed distances."""
    a = as_points(A)
    b = as_points(B)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("hausdorff distance needs non-empty point sets")
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))
