"""Scalar distance kernels for the filtration inner loop.

Both implementations (compiled and plain numpy) accumulate squared
differences coordinate by coordinate in ascending order and reduce over
candidates with a plain min, so their outputs are bit-identical. Every
filtration value in the package comes out of `min_sq_dists`; nothing else
may reformulate the distance.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False


def _min_sq_dists_np(grid: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    out = np.empty(grid.shape[0])
    # block over grid rows to bound the temporary at ~4e6 floats; the result
    # per row does not depend on the blocking
    step = max(1, 4_000_000 // max(1, candidates.shape[0]))
    for a in range(0, grid.shape[0], step):
        blk = grid[a : a + step]
        diff = candidates[None, :, :] - blk[:, None, :]
        sq = diff[:, :, 0] * diff[:, :, 0]
        for k in range(1, grid.shape[1]):
            sq = sq + diff[:, :, k] * diff[:, :, k]
        out[a : a + step] = sq.min(axis=1)
    return out


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _min_sq_dists_nb(grid, candidates):  # pragma: no cover - compiled
        g, d = grid.shape
        c = candidates.shape[0]
        out = np.empty(g)
        for i in range(g):
            best = np.inf
            for j in range(c):
                s = 0.0
                for k in range(d):
                    t = candidates[j, k] - grid[i, k]
                    s = s + t * t
                if s < best:
                    best = s
            out[i] = best
        return out


def min_sq_dists(grid: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Per grid row: min over candidate rows of the squared distance.

    Candidates are scanned in array order (callers pass ascending indices),
    though the min is order-independent anyway.
    """
    if candidates.shape[0] == 0:
        raise ValueError("empty candidate set")
    grid = np.ascontiguousarray(grid)
    candidates = np.ascontiguousarray(candidates)
    if HAVE_NUMBA:
        return _min_sq_dists_nb(grid, candidates)
    return _min_sq_dists_np(grid, candidates)


def sq_dists_to_point(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Squared distances from each row of `points` to one center, with the
    same coordinate-ascending accumulation as the min kernel."""
    diff = points - center
    out = diff[:, 0] * diff[:, 0]
    for k in range(1, points.shape[1]):
        out = out + diff[:, k] * diff[:, k]
    return out


def rowwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distance between paired rows of a and b (same accumulation)."""
    diff = b - a
    out = diff[:, 0] * diff[:, 0]
    for k in range(1, a.shape[1]):
        out = out + diff[:, k] * diff[:, k]
    return out


def warm_up() -> None:
    """Trigger compilation so timed sections never pay the JIT cost."""
    if HAVE_NUMBA:
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        _min_sq_dists_nb(pts, pts)
        pts3 = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
        _min_sq_dists_nb(pts3, pts3)
