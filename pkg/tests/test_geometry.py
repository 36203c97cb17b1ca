import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floodph.geometry import (
    PointCloud,
    barycentric_grid,
    barycentric_grid_template,
    directed_hausdorff,
    farthest_point_sampling,
    grid_covering_bound,
    random_covering_count,
    ritter_enclosing_ball,
    sample_simplex_uniform,
)


# ---------------------------------------------------------------- PointCloud

def test_pointcloud_validates():
    pc = PointCloud(np.zeros((3, 2)))
    assert pc.dim == 2 and len(pc) == 3
    with pytest.raises(ValueError):
        PointCloud(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        PointCloud(np.zeros((3, 4)))
    bad = np.zeros((2, 3))
    bad[1, 2] = np.nan
    with pytest.raises(ValueError):
        PointCloud(bad)


# ----------------------------------------------------- farthest point sampling

def _fps_brute(pts, k, start):
    # independent greedy recomputation: full distance matrix each step
    chosen = [start]
    for _ in range(1, k):
        best_idx, best_d = -1, -1.0
        for i in range(len(pts)):
            if i in chosen:
                continue
            d = min(float(np.linalg.norm(pts[i] - pts[j])) for j in chosen)
            if d > best_d + 1e-15:
                best_idx, best_d = i, d
        chosen.append(best_idx)
    return chosen


def test_fps_circle_stagewise():
    # uniform circle, start at angle 0: picks the antipode, then the quarter points
    n = 4096
    ang = 2 * np.pi * np.arange(n) / n
    pts = np.c_[np.cos(ang), np.sin(ang)]
    idx = farthest_point_sampling(pts, 4, start=0)
    assert idx[0] == 0 and idx[1] == n // 2
    assert set(idx) == {0, n // 2, n // 4, 3 * n // 4}


def test_fps_k1():
    pts = np.random.default_rng(0).random((10, 3))
    assert list(farthest_point_sampling(pts, 1, start=7)) == [7]


def test_fps_matches_brute_force():
    rng = np.random.default_rng(42)
    pts = rng.random((10, 3))
    idx = farthest_point_sampling(pts, 10, start=0)
    assert sorted(idx) == list(range(10))
    assert list(idx) == _fps_brute(pts, 10, 0)
    # insertion distances are non-increasing
    dists = []
    for i in range(1, 10):
        d = min(float(np.linalg.norm(pts[idx[i]] - pts[idx[j]])) for j in range(i))
        dists.append(d)
    assert all(a >= b - 1e-12 for a, b in zip(dists, dists[1:]))


def test_fps_argument_errors():
    pts = np.zeros((4, 2))
    with pytest.raises(ValueError):
        farthest_point_sampling(pts, 0)
    with pytest.raises(ValueError):
        farthest_point_sampling(pts, 5)
    with pytest.raises(ValueError):
        farthest_point_sampling(pts, 2, start=4)


def test_fps_determinism_and_coverage_monotone():
    rng = np.random.default_rng(7)
    pts = rng.random((200, 2))
    a = farthest_point_sampling(pts, 50)
    b = farthest_point_sampling(pts, 50)
    assert np.array_equal(a, b)
    cover = [directed_hausdorff(pts, pts[a[:k]]) for k in range(1, 51)]
    assert all(x >= y - 1e-12 for x, y in zip(cover, cover[1:]))


def test_fps_distinct_with_duplicate_points():
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    idx = farthest_point_sampling(pts, 4, start=0)
    assert sorted(idx) == [0, 1, 2, 3]


# ------------------------------------------------------- ritter enclosing ball

def test_ritter_edge():
    ball = ritter_enclosing_ball([(0.0, 0.0), (2.0, 0.0)])
    assert np.allclose(ball.center, [1.0, 0.0])
    assert ball.radius == pytest.approx(1.0)


def test_ritter_triangles():
    # longest edge (0,0)-(4,0) in both; radius is the max center-to-vertex distance
    ball = ritter_enclosing_ball([(0.0, 0.0), (4.0, 0.0), (2.0, 1.0)])
    assert np.allclose(ball.center, [2.0, 0.0])
    assert ball.radius == pytest.approx(2.0)
    ball = ritter_enclosing_ball([(0.0, 0.0), (4.0, 0.0), (1.0, 2.0)])
    assert np.allclose(ball.center, [2.0, 0.0])
    assert ball.radius == pytest.approx(math.sqrt(5.0))


def test_ritter_regular_tetrahedron():
    # unit edge length; midpoint of any edge sees the two opposite vertices at sqrt(3)/2
    verts = np.array(
        [
            [1.0, 0.0, -1.0 / math.sqrt(2)],
            [-1.0, 0.0, -1.0 / math.sqrt(2)],
            [0.0, 1.0, 1.0 / math.sqrt(2)],
            [0.0, -1.0, 1.0 / math.sqrt(2)],
        ]
    ) * 0.5  # edge length 1 after scaling (original has edge 2)
    ball = ritter_enclosing_ball(verts)
    assert ball.radius == pytest.approx(math.sqrt(3.0) / 2.0)


def test_ritter_rejects_single_vertex():
    with pytest.raises(ValueError):
        ritter_enclosing_ball([(0.0, 0.0)])


def test_ritter_containment_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s = rng.integers(2, 5)
        d = int(rng.integers(2, 4))
        verts = rng.normal(size=(s, min(s - 1, d) if False else d))
        ball = ritter_enclosing_ball(verts)
        dists = np.linalg.norm(verts - ball.center, axis=1)
        assert (dists <= ball.radius + 1e-9).all()
        # independent recomputation of the rule
        pairs = list(combinations(range(s), 2))
        lens = [np.linalg.norm(verts[i] - verts[j]) for i, j in pairs]
        i, j = pairs[int(np.argmax(lens))]
        assert np.allclose(ball.center, 0.5 * (verts[i] + verts[j]))
        assert ball.radius == pytest.approx(float(np.max(np.linalg.norm(verts - ball.center, axis=1))))


# ------------------------------------------------------------ barycentric grids

def test_template_counts_and_sums():
    for k, m in [(1, 5), (2, 20), (3, 7)]:
        t = barycentric_grid_template(k, m)
        assert t.grid_size == math.comb(m + k, k)
        assert np.allclose(t.weights.sum(axis=1), 1.0, atol=1e-12)
        assert (t.weights >= 0).all()
    # the count convention: 20 per edge gives 231 per triangle, 1771 per tetrahedron
    assert barycentric_grid_template(2, 20).grid_size == 231
    assert barycentric_grid_template(3, 20).grid_size == 1771


def test_template_face_nesting_exact():
    # rows supported on a face, restricted to the face columns, equal the
    # face's own template bit for bit
    t = barycentric_grid_template(3, 6)
    for size in (1, 2, 3):
        for face in combinations(range(4), size):
            sub = t.weights[t.face_index_map[face]][:, list(face)]
            own = barycentric_grid_template(size - 1, 6).weights
            assert sub.shape == own.shape
            assert np.array_equal(sub, own)


def test_face_map_selects_zero_off_face():
    t = barycentric_grid_template(2, 4)
    sel = t.face_index_map[(0, 2)]
    assert (t.weights[sel][:, 1] == 0).all()
    other = np.setdiff1d(np.arange(t.grid_size), sel)
    assert (t.weights[other][:, 1] > 0).all()


def test_grid_edge_m2():
    t = barycentric_grid_template(1, 2)
    pts = barycentric_grid(t, [(0.0, 0.0), (1.0, 0.0)])
    assert np.array_equal(np.sort(pts[:, 0]), [0.0, 0.5, 1.0])
    assert (pts[:, 1] == 0).all()


def test_grid_m1_is_vertex_set():
    verts = np.array([[0.0, 0.0, 1.0], [2.0, 0.5, 0.0], [1.0, 3.0, 2.0], [4.0, 4.0, 4.0]])
    t = barycentric_grid_template(3, 1)
    pts = barycentric_grid(t, verts)
    got = {tuple(p) for p in pts}
    assert got == {tuple(v) for v in verts}


def test_grid_points_in_hull():
    rng = np.random.default_rng(11)
    verts = rng.normal(size=(3, 2))
    t = barycentric_grid_template(2, 9)
    pts = barycentric_grid(t, verts)
    # every point is the affine combination given by its weights
    recon = t.weights @ verts
    assert np.allclose(pts, recon, atol=1e-12)


def test_grid_face_rows_bitwise_equal_own_grid():
    # embedding a face via the parent's rows equals embedding the face directly
    rng = np.random.default_rng(5)
    verts = rng.normal(size=(4, 3))
    t3 = barycentric_grid_template(3, 8)
    g3 = barycentric_grid(t3, verts)
    for face in [(0, 1), (1, 3), (0, 2, 3), (1, 2, 3)]:
        tf = barycentric_grid_template(len(face) - 1, 8)
        gf = barycentric_grid(tf, verts[list(face)])
        assert np.array_equal(g3[t3.face_index_map[face]], gf)


# --------------------------------------------------------- grid covering bound

def test_covering_bound_unit_edge():
    assert grid_covering_bound([(0.0, 0.0), (1.0, 0.0)], 2) == pytest.approx(0.5)
    # actual covering radius of {0, 0.5, 1} on the segment is 0.25
    t = barycentric_grid_template(1, 2)
    grid = barycentric_grid(t, [(0.0, 0.0), (1.0, 0.0)])
    dense = np.c_[np.linspace(0, 1, 10001), np.zeros(10001)]
    assert directed_hausdorff(dense, grid) == pytest.approx(0.25, abs=1e-3)


def test_covering_bound_equilateral():
    verts = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
    assert grid_covering_bound(verts, 10) == pytest.approx(math.sqrt(3) / 10)


def test_covering_bound_degenerate():
    assert grid_covering_bound([(1.0, 1.0), (1.0, 1.0)], 4) == 0.0


def test_covering_bound_dominates_actual_distance():
    # 1000 random simplices, 100 random hull points each: distance to the
    # grid never exceeds the bound
    rng = np.random.default_rng(17)
    for _ in range(1000):
        k = int(rng.integers(1, 4))
        d = int(rng.integers(2, 4))
        if k > d:
            k = d
        verts = rng.normal(size=(k + 1, d)) * rng.uniform(0.1, 3.0)
        m = int(rng.integers(1, 7))
        t = barycentric_grid_template(k, m)
        grid = barycentric_grid(t, verts)
        w = rng.dirichlet(np.ones(k + 1), size=100)
        hull_pts = w @ verts
        bound = grid_covering_bound(verts, m)
        d2 = np.min(
            ((hull_pts[:, None, :] - grid[None, :, :]) ** 2).sum(-1), axis=1
        )
        assert float(np.sqrt(d2.max())) <= bound + 1e-12


# ------------------------------------------------------------ random covering

def test_random_covering_count_formula():
    d, eps, delta = 2, 0.25, 0.05
    expect = math.ceil((4 / eps) ** d * (d * math.log(4 / eps) + math.log(1 / delta)))
    assert random_covering_count(d, eps, delta) == expect
    with pytest.raises(ValueError):
        random_covering_count(2, 0.0, 0.05)


def test_random_covering_reaches_target_rate():
    # with the prescribed sample count the covering radius should stay under
    # eps * diam in at least 95% of trials (the bound is loose in practice)
    rng = np.random.default_rng(23)
    eps, delta = 0.3, 0.05
    ok = 0
    trials = 40
    for trial in range(trials):
        verts = rng.normal(size=(3, 2))
        diam = max(np.linalg.norm(verts[i] - verts[j]) for i, j in combinations(range(3), 2))
        count = random_covering_count(2, eps, delta)
        samples = sample_simplex_uniform(verts, count, seed=trial)
        dense = barycentric_grid(barycentric_grid_template(2, 64), verts)
        if directed_hausdorff(dense, samples) <= eps * diam:
            ok += 1
    assert ok / trials >= 0.95


def test_sample_simplex_reproducible():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    a = sample_simplex_uniform(verts, 50, seed=9)
    b = sample_simplex_uniform(verts, 50, seed=9)
    assert np.array_equal(a, b)
    assert (a >= -1e-12).all() and (a.sum(axis=1) <= 1 + 1e-9).all()


# --------------------------------------------------------- directed Hausdorff

def test_dh_single_pair():
    assert directed_hausdorff([(0.0, 0.0)], [(3.0, 4.0)]) == pytest.approx(5.0)


def test_dh_containment():
    rng = np.random.default_rng(1)
    b = rng.random((20, 3))
    a = b[::3]
    assert directed_hausdorff(a, b) == 0.0


def test_dh_two_to_one():
    assert directed_hausdorff([(0.0, 0.0), (1.0, 0.0)], [(0.0, 1.0)]) == pytest.approx(math.sqrt(2))


def test_dh_empty_error():
    with pytest.raises(ValueError):
        directed_hausdorff(np.zeros((0, 2)), [(0.0, 0.0)])


def test_dh_matches_brute():
    rng = np.random.default_rng(4)
    a, b = rng.random((37, 2)), rng.random((23, 2))
    brute = max(min(np.linalg.norm(x - y) for y in b) for x in a)
    assert directed_hausdorff(a, b) == pytest.approx(brute, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_dh_triangle_inequality(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    a = rng.normal(size=(rng.integers(1, 8), 2))
    b = rng.normal(size=(rng.integers(1, 8), 2))
    c = rng.normal(size=(rng.integers(1, 8), 2))
    dac = directed_hausdorff(a, c)
    dab = directed_hausdorff(a, b)
    dbc = directed_hausdorff(b, c)
    assert dac <= dab + dbc + 1e-9
