"""Synthetic point clouds with known topology, deterministically seeded.

All randomness flows through a counter-based Philox generator, so outputs
are reproducible across platforms for a fixed seed (acceptance tests hash
them).
"""

from __future__ import annotations

import numpy as np

from .errors import GenerationError
from .geometry import PointCloud

# voids must be separated by this much so their topological features never
# interact
VOID_MARGIN = 1e-3

_PLACEMENT_TRIES = 10_000


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def gen_circle(n: int, mode: str = "uniform-angle", seed: int = 0) -> PointCloud:
    """n points on the unit circle; uniform-angle puts point j at 2*pi*j/n."""
    if n < 3:
        raise ValueError("need at least 3 points")
    if mode == "uniform-angle":
        ang = 2.0 * np.pi * np.arange(n) / n
    elif mode == "random":
        ang = _rng(seed).uniform(0.0, 2.0 * np.pi, size=n)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PointCloud(np.c_[np.cos(ang), np.sin(ang)])


def gen_swisscheese(
    n: int,
    k: int,
    box: float = 5.0,
    radius_range: tuple = (0.1, 0.5),
    seed: int = 0,
):
    """Uniform points in [0, box]^3 minus k disjoint balls.

    Returns (cloud, voids) where voids is a list of (center, radius) ground
    truth. Ball placement is rejection-based: centers keep the ball fully
    inside the box, and each new ball must clear every earlier one by
    VOID_MARGIN; failure to place after a bounded number of tries raises.
    """
    if n < 1:
        raise ValueError("need at least one point")
    if k < 0:
        raise ValueError("void count must be nonnegative")
    lo, hi = radius_range
    if not 0.0 < lo <= hi:
        raise ValueError("radius range must satisfy 0 < lo <= hi")
    if 2.0 * hi > box:
        raise ValueError("voids of the requested size cannot fit in the box")
    rng = _rng(seed)
    voids = []
    tries = 0
    while len(voids) < k:
        if tries >= _PLACEMENT_TRIES:
            raise GenerationError(
                f"could not place {k} disjoint voids after {_PLACEMENT_TRIES} tries"
            )
        tries += 1
        r = float(rng.uniform(lo, hi))
        c = rng.uniform(r, box - r, size=3)
        if all(
            np.linalg.norm(c - c2) >= r + r2 + VOID_MARGIN for c2, r2 in voids
        ):
            voids.append((c, r))

    kept = []
    needed = n
    while needed > 0:
        batch = rng.uniform(0.0, box, size=(max(2 * needed, 1024), 3))
        ok = np.ones(batch.shape[0], dtype=bool)
        for c, r in voids:
            d2 = ((batch - c) ** 2).sum(axis=1)
            ok &= d2 >= r * r
        accepted = batch[ok][:needed]
        kept.append(accepted)
        needed -= accepted.shape[0]
    return PointCloud(np.vstack(kept)), voids


def gen_torus(n: int, major: float = 2.0, minor: float = 0.5, seed: int = 0) -> PointCloud:
    """n points uniform in surface area on a torus around the z axis.

    Poloidal angles are rejection-sampled against the area element
    (major + minor cos t) dt, so the inner side is not oversampled.
    """
    if n < 1:
        raise ValueError("need at least one point")
    if not 0.0 < minor < major:
        raise ValueError("need 0 < minor < major")
    rng = _rng(seed)
    theta = np.empty(0)
    while theta.size < n:
        cand = rng.uniform(0.0, 2.0 * np.pi, size=2 * (n - theta.size) + 64)
        u = rng.uniform(0.0, 1.0, size=cand.size)
        accept = u <= (major + minor * np.cos(cand)) / (major + minor)
        theta = np.concatenate([theta, cand[accept]])
    theta = theta[:n]
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    ring = major + minor * np.cos(theta)
    return PointCloud(
        np.c_[ring * np.cos(phi), ring * np.sin(phi), minor * np.sin(theta)]
    )
