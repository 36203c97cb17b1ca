"""Persistence diagrams of a filtered complex, by Z/2 boundary reduction.

Columns are sorted order-index lists merged by symmetric difference. The
default reduction runs dimensions top-down and clears columns that were
already identified as pivots (the twist optimization); a flag switches to
the plain left-to-right sweep, which must produce identical diagrams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import IntegrityError
from .filtration import FilteredComplex


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse Z/2 boundary matrix over the filtration order.

    columns[j] lists the order indices of the facets of the j-th simplex,
    strictly increasing and all < j; dims[j] is its dimension.
    """

    columns: list
    dims: np.ndarray


@dataclass(frozen=True)
class PersistenceDiagram:
    """Bars per homology dimension, sorted by (birth, death).

    Deaths are floats or math.inf for essential classes.
    """

    bars: dict

    def in_dim(self, k: int) -> list:
        return self.bars.get(k, [])

    def dimensions(self) -> list:
        return sorted(self.bars)


def boundary_matrix(fc: FilteredComplex) -> BoundaryMatrix:
    """Boundary columns of every simplex, indexed by filtration rank."""
    ranked = fc.in_order()
    rank_of = {verts: i for i, (verts, _, _) in enumerate(ranked)}
    columns = []
    dims = np.empty(len(ranked), dtype=np.int64)
    for j, (verts, dim, _) in enumerate(ranked):
        dims[j] = dim
        if dim == 0:
            columns.append([])
            continue
        try:
            col = sorted(rank_of[f] for f in combinations(verts, dim))
        except KeyError as missing:
            raise IntegrityError(f"facet {missing} of {verts} absent from the complex")
        if col[-1] >= j:
            raise IntegrityError(f"face order violated at simplex {verts}")
        columns.append(col)
    return BoundaryMatrix(columns=columns, dims=dims)


def _xor_merge(a: list, b: list) -> list:
    """Symmetric difference of two strictly increasing index lists."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif a[i] > b[j]:
            out.append(b[j])
            j += 1
        else:
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _run_reduction(columns: list, dims: np.ndarray, clearing: bool) -> dict:
    """Reduce all columns; returns {pivot row i: column j} for every pair."""
    n = len(columns)
    low_inv: dict = {}
    stored: dict = {}
    if clearing and n and int(dims.max()) > 0:
        passes = [np.nonzero(dims == k)[0] for k in range(int(dims.max()), 0, -1)]
    else:
        passes = [np.arange(n)]
    cleared = np.zeros(n, dtype=bool)
    for idxs in passes:
        for j in idxs:
            if cleared[j]:
                continue
            col = columns[j]
            while col:
                other = low_inv.get(col[-1])
                if other is None:
                    break
                col = _xor_merge(col, stored[other])
            if col:
                low = col[-1]
                low_inv[low] = j
                stored[j] = col
                if clearing:
                    cleared[low] = True
    return low_inv


def reduce_and_extract(
    bm: BoundaryMatrix,
    fc: FilteredComplex,
    include_zero: bool = False,
    clearing: bool = True,
) -> PersistenceDiagram:
    """Pair simplices and read off the diagram.

    Pair (i, j) yields the bar (value_i, value_j) in dim(i); unpaired
    simplices are essential, (value_i, inf). Bars with birth == death are
    dropped unless include_zero is set.
    """
    ranked = fc.in_order()
    values = [v for _, _, v in ranked]
    low_inv = _run_reduction(bm.columns, bm.dims, clearing)
    maxdim = int(bm.dims.max()) if len(ranked) else 0
    bars = {k: [] for k in range(maxdim + 1)}
    paired = set(low_inv).union(low_inv.values())
    for i, j in low_inv.items():
        b, d = values[i], values[j]
        if include_zero or b != d:
            bars[int(bm.dims[i])].append((b, d))
    for j in range(len(ranked)):
        if j not in paired:
            bars[int(bm.dims[j])].append((values[j], math.inf))
    for k in bars:
        bars[k].sort()
    return PersistenceDiagram(bars=bars)


def betti_at(dgm: PersistenceDiagram, r: float, k: int) -> int:
    """Number of dimension-k classes alive at radius r (birth <= r < death)."""
    return sum(1 for b, d in dgm.in_dim(k) if b <= r < d)
