import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvdindex.delaunay import Triangulation, bulk_build, hilbert_order
from mvdindex.geometry import DuplicatePointError, GeometryError, Point
from oracles import (
    brute_force_delaunay_edges,
    convex_hull_size,
    covers_hull_exactly,
    empty_circle_violations,
    orient_exact,
    scan_nn,
)

# small integer grids produce plenty of collinear and cocircular subsets
grid_sets = st.lists(
    st.tuples(st.integers(0, 6), st.integers(0, 6)).map(lambda t: (float(t[0]), float(t[1]))),
    min_size=1, max_size=24, unique=True,
)
float_sets = st.lists(
    st.tuples(st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False)),
    min_size=1, max_size=24, unique=True,
)
point_sets = st.one_of(grid_sets, float_sets)


def labelled(coords):
    return [(i, Point(*p)) for i, p in enumerate(coords)]


def all_collinear(coords):
    return all(orient_exact(coords[0], coords[1], c) == 0 for c in coords[2:])


def unit_square():
    return [(0, Point(0.0, 0.0)), (1, Point(1.0, 0.0)), (2, Point(1.0, 1.0)), (3, Point(0.0, 1.0))]


class TestExamples:
    def test_unit_square_uses_diagonal_through_smallest_id(self):
        t = bulk_build(unit_square())
        assert t.n_triangles == 2
        assert t.edges() == {(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)}

    def test_unit_square_diagonal_follows_ids_not_positions(self):
        pts = [(1, Point(0.0, 0.0)), (0, Point(1.0, 0.0)), (3, Point(1.0, 1.0)), (2, Point(0.0, 1.0))]
        assert (0, 2) in bulk_build(pts).edges()

    def test_centre_insert_and_delete(self):
        t = bulk_build(unit_square())
        t.insert(4, Point(0.5, 0.5))
        t.check()
        assert t.n_triangles == 4
        assert sorted(t.neighbors(4)) == [0, 1, 2, 3]
        t.delete(4)
        t.check()
        assert t.edges() == bulk_build(unit_square()).edges()

    def test_small_sets_have_no_triangles(self):
        t = Triangulation()
        assert t.edges() == set()
        t.insert(5, Point(1.0, 1.0))
        assert t.neighbors(5) == []
        t.insert(2, Point(0.0, 0.0))
        assert t.edges() == {(2, 5)}
        t.insert(7, Point(2.0, 2.0))
        assert t.is_degenerate
        assert t.edges() == {(2, 5), (5, 7)}

    def test_collinear_then_lifted(self):
        t = Triangulation()
        for i, x in enumerate([3.0, 0.0, 2.0, 1.0]):
            t.insert(i, Point(x, 0.0))
        assert t.edges() == {(1, 3), (2, 3), (0, 2)}
        t.insert(9, Point(1.5, 1.0))
        t.check()
        assert not t.is_degenerate
        assert t.n_triangles == 3
        t.delete(9)
        assert t.is_degenerate
        assert t.edges() == {(1, 3), (2, 3), (0, 2)}

    def test_errors(self):
        t = bulk_build(unit_square())
        with pytest.raises(DuplicatePointError) as err:
            t.insert(9, Point(1.0, 1.0))
        assert err.value.ids == (2, 9)
        with pytest.raises(GeometryError):
            t.insert(0, Point(5.0, 5.0))
        with pytest.raises(KeyError):
            t.delete(42)
        with pytest.raises(KeyError):
            t.neighbors(42)
        with pytest.raises(LookupError):
            Triangulation().locate((0.0, 0.0))

    def test_hull_order(self):
        t = bulk_build(unit_square() + [(4, Point(0.5, 0.0)), (5, Point(0.4, 0.6))])
        assert t.hull() == [0, 4, 1, 2, 3]


class TestAgainstOracle:
    @given(point_sets)
    def test_edges_match_all_triples_oracle(self, coords):
        pts = labelled(coords)
        t = bulk_build(pts)
        t.check()
        assert t.edges() == brute_force_delaunay_edges(pts)

    @given(point_sets, st.randoms(use_true_random=False))
    def test_insertion_order_invariance(self, coords, rnd):
        pts = labelled(coords)
        shuffled = pts[:]
        rnd.shuffle(shuffled)
        t = Triangulation()
        for vid, p in shuffled:
            t.insert(vid, p, hint=rnd.choice([None] + [v for v in t]) if len(t) else None)
        t.check()
        assert t.edges() == bulk_build(pts).edges()

    @given(point_sets, st.randoms(use_true_random=False))
    def test_deletion_matches_rebuild(self, coords, rnd):
        pts = labelled(coords)
        t = bulk_build(pts)
        alive = dict(pts)
        for vid, _ in rnd.sample(pts, len(pts)):
            t.delete(vid)
            del alive[vid]
            t.check()
            assert t.edges() == bulk_build(alive.items()).edges()

    @given(point_sets)
    def test_triangles_are_empty_and_tile_the_hull(self, coords):
        pts = labelled(coords)
        t = bulk_build(pts)
        by_id = dict(pts)
        assert empty_circle_violations(by_id, t.triangles()) == []
        if not all_collinear(coords):
            assert covers_hull_exactly(by_id, t.triangles())


class TestStructure:
    @given(point_sets)
    def test_euler_and_edge_bound(self, coords):
        t = bulk_build(labelled(coords))
        v, e, f = t.euler_counts()
        if v == 0:
            return
        assert v - e + f == 2
        if v >= 3:
            assert e <= 3 * v - 6 or t.is_degenerate
        if not t.is_degenerate:
            h = convex_hull_size(coords)
            assert e == 3 * v - 3 - h
            assert t.n_triangles == 2 * v - 2 - h
            assert len(t.hull()) == h

    @given(point_sets)
    def test_nearest_neighbour_graph_is_contained(self, coords):
        pts = labelled(coords)
        t = bulk_build(pts)
        edges = t.edges()
        for i, p in pts:
            others = [(float(np.hypot(p.x - q.x, p.y - q.y)), j) for j, q in pts if j != i]
            if not others:
                continue
            best = min(others)[0]
            # some nearest neighbour is always adjacent; unique ones always are
            nearest = [j for d, j in others if d == best]
            assert any((min(i, j), max(i, j)) in edges for j in nearest)

    @given(point_sets)
    def test_connected(self, coords):
        pts = labelled(coords)
        t = bulk_build(pts)
        seen = {pts[0][0]}
        stack = [pts[0][0]]
        while stack:
            v = stack.pop()
            for w in t.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert seen == set(t)

    @given(point_sets, st.tuples(st.floats(-1, 2), st.floats(-1, 2)))
    def test_locate_finds_nearest(self, coords, q):
        pts = labelled(coords)
        t = bulk_build(pts)
        expected = scan_nn(pts, q)
        assert t.locate(q) == expected
        assert t.locate(q, hint=pts[-1][0]) == expected


def test_mean_degree_uniform_10k():
    rng = np.random.default_rng(3)
    xy = rng.random((10_000, 2))
    t = bulk_build((i, Point(float(x), float(y))) for i, (x, y) in enumerate(xy))
    v, e, _ = t.euler_counts()
    h = len(t.hull())
    # exact identity for a triangulation with h hull vertices
    assert 2 * e / v == pytest.approx(6 - (6 + 2 * h) / v)
    assert 5.97 <= 2 * e / v <= 6.0


def test_churn_keeps_triangulation_canonical():
    rng = random.Random(11)
    t = Triangulation()
    alive = {}
    next_id = 0
    for step in range(3000):
        if alive and rng.random() < 0.45:
            vid = rng.choice(list(alive))
            t.delete(vid)
            del alive[vid]
        else:
            # coarse coordinates force many cocircular and collinear configurations
            p = Point(float(rng.randrange(30)), float(rng.randrange(30)))
            if p in alive.values():
                continue
            t.insert(next_id, p)
            alive[next_id] = p
            next_id += 1
        if step % 250 == 0:
            t.check()
            assert t.edges() == bulk_build(alive.items()).edges()
    t.check()
    assert t.edges() == bulk_build(alive.items()).edges()


def test_hilbert_order_is_a_permutation():
    xy = np.random.default_rng(0).random((500, 2))
    order = hilbert_order(xy)
    assert sorted(order.tolist()) == list(range(500))
    # consecutive points along the curve are close on average
    steps = np.linalg.norm(np.diff(xy[order], axis=0), axis=1)
    assert steps.mean() < 0.1
