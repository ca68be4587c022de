"""Incremental 2-D Delaunay triangulation with vertex deletion.

Triangles are stored implicitly as a map from each directed edge ``(u, v)``
to the third vertex ``w`` of the counter-clockwise triangle ``(u, v, w)``.
The convex hull is closed by ghost triangles sharing a symbolic vertex
:data:`INF`; a ghost ``(u, v, INF)`` covers the open half-plane to the left
of ``u -> v`` (outside the hull) plus the open segment ``uv``.

Cocircular ties are broken by :func:`~mvdindex.geometry.in_circle_sos`,
which makes the triangulation a pure function of the point set: inserting
the same points in any order, or deleting back to a previous set, yields
the same edges.

Fewer than three points, or a set of collinear points, has no triangle;
such a layer is kept as a sorted list whose neighbours are the adjacent
entries.
"""

from __future__ import annotations

import bisect
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from .geometry import (
    DuplicatePointError,
    GeometryError,
    Point,
    closer,
    dist2,
    in_circle_det,
    in_circle_sos,
    make_point,
    orient_det,
)

__all__ = ["INF", "Triangulation", "bulk_build", "hilbert_order"]

INF = -1

Edge = Tuple[int, int]


class Triangulation:
    """A Delaunay triangulation over integer-labelled points."""

    def __init__(self):
        self._pts: Dict[int, Point] = {}
        self._by_coord: Dict[Point, int] = {}
        self._adj: Dict[Edge, int] = {}
        self._vedge: Dict[int, int] = {}
        self._n_tri = 0
        # sorted ids while there is no proper triangle
        self._line: Optional[List[int]] = []
        self._line_keys: List[Point] = []
        self._line_pos: Optional[Dict[int, int]] = None
        self._last: Optional[int] = None
        # neighbour tuples, dropped whenever a triangle at the vertex changes
        self._nbrs: Dict[int, Tuple[int, ...]] = {}

    # ------------------------------------------------------------------
    # basic accessors

    def __len__(self) -> int:
        return len(self._pts)

    def __contains__(self, vid) -> bool:
        return vid in self._pts

    def __iter__(self) -> Iterator[int]:
        return iter(self._pts)

    @property
    def is_degenerate(self) -> bool:
        """True while the vertices are fewer than three or all collinear."""
        return self._line is not None

    def ids(self) -> Set[int]:
        return set(self._pts)

    def point(self, vid: int) -> Point:
        try:
            return self._pts[vid]
        except KeyError:
            raise KeyError(f"unknown vertex id {vid}") from None

    def points(self) -> Dict[int, Point]:
        return dict(self._pts)

    def any_vertex(self) -> int:
        if not self._pts:
            raise LookupError("empty triangulation")
        if self._last is not None and self._last in self._pts:
            return self._last
        return next(iter(self._pts))

    # ------------------------------------------------------------------
    # triangle bookkeeping

    def _add_tri(self, a: int, b: int, c: int) -> None:
        adj = self._adj
        adj[(a, b)] = c
        adj[(b, c)] = a
        adj[(c, a)] = b
        nbrs = self._nbrs
        nbrs.pop(a, None)
        nbrs.pop(b, None)
        nbrs.pop(c, None)
        if a != INF and b != INF and c != INF:
            self._n_tri += 1

    def _del_tri(self, a: int, b: int, c: int) -> None:
        adj = self._adj
        del adj[(a, b)]
        del adj[(b, c)]
        del adj[(c, a)]
        nbrs = self._nbrs
        nbrs.pop(a, None)
        nbrs.pop(b, None)
        nbrs.pop(c, None)
        if a != INF and b != INF and c != INF:
            self._n_tri -= 1

    def _link(self, v: int) -> List[int]:
        """Neighbours of ``v`` in counter-clockwise order, INF included."""
        adj = self._adj
        u0 = self._vedge[v]
        out = [u0]
        u = adj[(v, u0)]
        while u != u0:
            out.append(u)
            u = adj[(v, u)]
        return out

    # ------------------------------------------------------------------
    # predicates with the ghost-vertex conventions

    def _between(self, p: Point, u: Point, w: Point) -> bool:
        # p is known to be collinear with u, w
        if u[0] != w[0]:
            return min(u[0], w[0]) < p[0] < max(u[0], w[0])
        return min(u[1], w[1]) < p[1] < max(u[1], w[1])

    def _ghost_contains(self, u: int, w: int, p: Point) -> bool:
        pu = self._pts[u]
        pw = self._pts[w]
        o = orient_det(pu[0], pu[1], pw[0], pw[1], p[0], p[1])
        if o:
            return o > 0
        return self._between(p, pu, pw)

    def _in_disk(self, a: int, b: int, c: int, p: Point, pid: int) -> bool:
        """Whether ``p`` lies in the (perturbed) circumdisk of triangle abc."""
        if a == INF:
            return self._ghost_contains(b, c, p)
        if b == INF:
            return self._ghost_contains(c, a, p)
        if c == INF:
            return self._ghost_contains(a, b, p)
        pts = self._pts
        return in_circle_sos(pts[a], pts[b], pts[c], p, a, b, c, pid) > 0

    # ------------------------------------------------------------------
    # insertion

    def insert(self, vid: int, p, hint: Optional[int] = None) -> None:
        """Insert vertex ``vid`` at ``p``; ``hint`` is a nearby existing vertex."""
        if not isinstance(p, Point):
            p = make_point(*p)
        if vid in self._pts:
            raise GeometryError(f"vertex id {vid} already present")
        if vid < 0:
            raise GeometryError(f"vertex ids must be non-negative, got {vid}")
        other = self._by_coord.get(p)
        if other is not None:
            raise DuplicatePointError(other, vid, p)

        if self._line is not None:
            self._insert_line(vid, p)
        else:
            if hint is None or hint not in self._pts:
                hint = self.any_vertex()
            self._pts[vid] = p
            self._by_coord[p] = vid
            self._insert_tri(vid, p, hint)
        self._last = vid

    def _insert_line(self, vid: int, p: Point) -> None:
        line = self._line
        keys = self._line_keys
        if len(line) >= 2:
            a = keys[0]
            b = keys[-1]
            if orient_det(a[0], a[1], b[0], b[1], p[0], p[1]) != 0:
                self._pts[vid] = p
                self._by_coord[p] = vid
                self._build_fan(line, vid)
                return
        i = bisect.bisect_left(keys, p)
        keys.insert(i, p)
        line.insert(i, vid)
        self._line_pos = None
        self._pts[vid] = p
        self._by_coord[p] = vid

    def _build_fan(self, chain: List[int], apex: int) -> None:
        """Triangulate a sorted collinear chain plus one point off its line."""
        pts = self._pts
        a = pts[chain[0]]
        b = pts[chain[-1]]
        c = pts[apex]
        ccw = orient_det(a[0], a[1], b[0], b[1], c[0], c[1]) > 0
        self._line = None
        self._line_keys = []
        self._line_pos = None
        for u, w in zip(chain, chain[1:]):
            if ccw:
                self._add_tri(u, w, apex)
            else:
                self._add_tri(w, u, apex)
        self._close_hull()
        self._reset_vedges()

    def _close_hull(self) -> None:
        adj = self._adj
        open_edges = [(u, w) for (u, w) in adj if (w, u) not in adj]
        for u, w in open_edges:
            self._add_tri(w, u, INF)

    def _reset_vedges(self) -> None:
        vedge = self._vedge
        vedge.clear()
        for (u, w) in self._adj:
            if u != INF and u not in vedge:
                vedge[u] = w

    def _insert_tri(self, vid: int, p: Point, hint: int) -> None:
        a, b, c = self._find_triangle(p, hint)
        adj = self._adj
        pts = self._pts
        px, py = p
        self._del_tri(a, b, c)
        stack = [(a, b), (b, c), (c, a)]
        boundary = []
        while stack:
            u, w = stack.pop()
            x = adj.get((w, u))
            if x is None:
                continue
            if u == INF or w == INF or x == INF:
                inside = self._in_disk(w, u, x, p, vid)
            else:
                pw = pts[w]
                pu = pts[u]
                px_ = pts[x]
                s = in_circle_det(pw[0], pw[1], pu[0], pu[1], px_[0], px_[1], px, py)
                if s == 0:
                    s = in_circle_sos(pw, pu, px_, p, w, u, x, vid)
                inside = s > 0
            if inside:
                self._del_tri(w, u, x)
                stack.append((u, x))
                stack.append((x, w))
            else:
                boundary.append((u, w))
        vedge = self._vedge
        for u, w in boundary:
            self._add_tri(u, w, vid)
            if u != INF:
                vedge[u] = w
            if w != INF:
                vedge[w] = vid
        for u, w in boundary:
            if u != INF:
                vedge[vid] = u
                break

    def _find_triangle(self, p: Point, start: int) -> Tuple[int, int, int]:
        """Visibility walk to a triangle whose circumdisk contains ``p``.

        Returns a real triangle containing ``p`` (closed), or a ghost triangle
        whose half-plane contains it when ``p`` is outside the hull.
        """
        adj = self._adj
        pts = self._pts
        px, py = p
        a = start
        b = self._vedge[a]
        c = adj[(a, b)]
        while True:
            if a == INF or b == INF or c == INF:
                if a == INF:
                    a, b, c = b, c, a
                elif b == INF:
                    a, b, c = c, a, b
                if self._ghost_contains(a, b, p):
                    return a, b, c
                x = adj[(b, a)]
                a, b, c = b, a, x
                continue
            pa = pts[a]
            pb = pts[b]
            pc = pts[c]
            if orient_det(pa[0], pa[1], pb[0], pb[1], px, py) < 0:
                a, b, c = b, a, adj[(b, a)]
            elif orient_det(pb[0], pb[1], pc[0], pc[1], px, py) < 0:
                a, b, c = c, b, adj[(c, b)]
            elif orient_det(pc[0], pc[1], pa[0], pa[1], px, py) < 0:
                a, b, c = a, c, adj[(a, c)]
            else:
                return a, b, c

    # ------------------------------------------------------------------
    # deletion

    def delete(self, vid: int) -> None:
        """Remove vertex ``vid`` and restore the Delaunay property."""
        if vid not in self._pts:
            raise KeyError(f"unknown vertex id {vid}")
        if self._line is not None:
            i = self._line.index(vid)
            del self._line[i]
            del self._line_keys[i]
            self._line_pos = None
            self._forget(vid)
            return

        link = self._link(vid)
        m = len(link)
        for i in range(m):
            self._del_tri(vid, link[i], link[(i + 1) % m])
        del self._vedge[vid]
        self._forget(vid)

        if len(self._pts) < 3 or (self._n_tri == 0 and self._collinear(self._pts)):
            self._to_line()
            return
        self._fill_hole(link)

    def _forget(self, vid: int) -> None:
        p = self._pts.pop(vid)
        del self._by_coord[p]
        if self._last == vid:
            self._last = None

    def _collinear(self, ids: Iterable[int]) -> bool:
        pts = self._pts
        it = iter(ids)
        a = pts[next(it)]
        b = pts[next(it)]
        for i in it:
            c = pts[i]
            if orient_det(a[0], a[1], b[0], b[1], c[0], c[1]) != 0:
                return False
        return True

    def _to_line(self) -> None:
        self._nbrs.clear()
        self._adj.clear()
        self._vedge.clear()
        self._n_tri = 0
        order = sorted(self._pts, key=self._pts.__getitem__)
        self._line = order
        self._line_keys = [self._pts[i] for i in order]
        self._line_pos = None

    def _fill_hole(self, poly: List[int]) -> None:
        """Re-triangulate the star of a removed vertex by clipping Delaunay ears."""
        poly = list(poly)
        vedge = self._vedge
        while len(poly) > 3:
            m = len(poly)
            for i in range(m):
                a = poly[i]
                b = poly[(i + 1) % m]
                c = poly[(i + 2) % m]
                if self._is_ear(a, b, c, poly):
                    break
            else:
                raise RuntimeError("no Delaunay ear found while deleting a vertex")
            self._add_tri(a, b, c)
            del poly[(i + 1) % m]
            for u, w in ((a, b), (b, c), (c, a)):
                if u != INF:
                    vedge[u] = w
        a, b, c = poly
        self._add_tri(a, b, c)
        for u, w in ((a, b), (b, c), (c, a)):
            if u != INF:
                vedge[u] = w

    def _is_ear(self, a: int, b: int, c: int, poly: Sequence[int]) -> bool:
        pts = self._pts
        if a == INF or b == INF or c == INF:
            if a == INF:
                u, w = b, c
            elif b == INF:
                u, w = c, a
            else:
                u, w = a, b
            for x in poly:
                if x != INF and x != u and x != w and self._ghost_contains(u, w, pts[x]):
                    return False
            return True
        pa = pts[a]
        pb = pts[b]
        pc = pts[c]
        if orient_det(pa[0], pa[1], pb[0], pb[1], pc[0], pc[1]) <= 0:
            return False
        for x in poly:
            if x == INF or x == a or x == b or x == c:
                continue
            if in_circle_sos(pa, pb, pc, pts[x], a, b, c, x) > 0:
                return False
        return True

    # ------------------------------------------------------------------
    # queries

    def neighbors(self, vid: int) -> Sequence[int]:
        """Delaunay neighbours (Voronoi neighbours) of ``vid``, real vertices only."""
        if self._line is not None:
            if vid not in self._pts:
                raise KeyError(f"unknown vertex id {vid}")
            pos = self._line_pos
            if pos is None:
                pos = self._line_pos = {v: i for i, v in enumerate(self._line)}
            i = pos[vid]
            line = self._line
            out = []
            if i > 0:
                out.append(line[i - 1])
            if i + 1 < len(line):
                out.append(line[i + 1])
            return out
        cached = self._nbrs.get(vid)
        if cached is not None:
            return cached
        try:
            u0 = self._vedge[vid]
        except KeyError:
            raise KeyError(f"unknown vertex id {vid}") from None
        adj = self._adj
        out = [] if u0 == INF else [u0]
        u = adj[(vid, u0)]
        while u != u0:
            if u != INF:
                out.append(u)
            u = adj[(vid, u)]
        cached = self._nbrs[vid] = tuple(out)
        return cached

    def locate(self, q, hint: Optional[int] = None) -> int:
        """Vertex whose Voronoi cell contains ``q`` (its nearest vertex).

        Ties are resolved towards the smaller id.
        """
        if not self._pts:
            raise LookupError("locate on an empty triangulation")
        pts = self._pts
        if self._line is not None:
            best = None
            for v, p in pts.items():
                d = dist2(p, q)
                if best is None or closer(q, d, v, p, best[0], best[1], pts[best[1]]):
                    best = (d, v)
            return best[1]
        cur = hint if hint is not None and hint in pts else self.any_vertex()
        bd = dist2(pts[cur], q)
        while True:
            moved = False
            best = cur
            for n in self.neighbors(cur):
                d = dist2(pts[n], q)
                if closer(q, d, n, pts[n], bd, best, pts[best]):
                    best = n
                    bd = d
                    moved = True
            if not moved:
                return cur
            cur = best

    # ------------------------------------------------------------------
    # structure inspection

    def edges(self) -> Set[Edge]:
        """Undirected edges between real vertices as ``(min, max)`` pairs."""
        if self._line is not None:
            return {(min(a, b), max(a, b)) for a, b in zip(self._line, self._line[1:])}
        return {(u, w) for (u, w) in self._adj if u != INF and w != INF and u < w}

    def triangles(self) -> List[Tuple[int, int, int]]:
        """Real triangles, counter-clockwise, each rotated to start at its smallest id."""
        out = []
        for (a, b), c in self._adj.items():
            if a == INF or b == INF or c == INF:
                continue
            if a < b and a < c:
                out.append((a, b, c))
        return out

    def hull(self) -> List[int]:
        """Convex-hull vertices in counter-clockwise order, collinear ones included."""
        if self._line is not None:
            return list(self._line)
        # ghost (u, w, INF) lies left of u -> w, so the hull runs w -> u
        nxt = {w: u for (u, w), x in self._adj.items() if x == INF}
        start = min(nxt)
        out = [start]
        v = nxt[start]
        while v != start:
            out.append(v)
            v = nxt[v]
        return out

    def euler_counts(self) -> Tuple[int, int, int]:
        """``(V, E, F)`` with F counting the outer face."""
        return len(self._pts), len(self.edges()), self._n_tri + 1

    @property
    def n_triangles(self) -> int:
        return self._n_tri

    def check(self) -> None:
        """Assert internal consistency of the adjacency structure (for tests)."""
        adj = self._adj
        if self._line is not None:
            assert not adj and self._n_tri == 0
            assert sorted(self._line) == sorted(self._pts)
            assert self._line_keys == [self._pts[v] for v in self._line]
            if len(self._line) >= 3:
                assert self._collinear(self._line)
            return
        for (u, w), x in adj.items():
            assert adj[(w, x)] == u and adj[(x, u)] == w, "triangle not closed"
            assert (w, u) in adj, f"edge {(u, w)} has no twin"
        for v in self._pts:
            assert (v, self._vedge[v]) in adj, f"stale vedge for {v}"
        real = sum(1 for (a, b), c in adj.items() if INF not in (a, b, c)) // 3
        assert real == self._n_tri
        pts = self._pts
        for a, b, c in self.triangles():
            pa, pb, pc = pts[a], pts[b], pts[c]
            assert orient_det(pa[0], pa[1], pb[0], pb[1], pc[0], pc[1]) > 0


def hilbert_order(xy: np.ndarray, bits: int = 16) -> np.ndarray:
    """Indices that sort 2-D points along a Hilbert curve over their bounding box."""
    xy = np.asarray(xy, dtype=float)
    n = len(xy)
    if n < 3:
        return np.arange(n)
    lo = xy.min(axis=0)
    span = xy.max(axis=0) - lo
    span[span == 0] = 1.0
    side = (1 << bits) - 1
    q = np.floor((xy - lo) / span * side).astype(np.int64)
    x = q[:, 0].copy()
    y = q[:, 1].copy()
    d = np.zeros(n, dtype=np.int64)
    s = 1 << (bits - 1)
    while s > 0:
        rx = (x & s) > 0
        ry = (y & s) > 0
        d += s * s * ((3 * rx) ^ ry)
        # rotate the quadrant
        flip = ~ry & rx
        x = np.where(flip, side - x, x)
        y = np.where(flip, side - y, y)
        swap = ~ry
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s >>= 1
    return np.argsort(d, kind="stable")


def bulk_build(points: Iterable[Tuple[int, Point]]) -> Triangulation:
    """Delaunay triangulation of ``(id, point)`` pairs.

    Points are inserted along a Hilbert curve, each walk starting from the
    previously inserted vertex.
    """
    items = [(int(i), p if isinstance(p, Point) else make_point(*p)) for i, p in points]
    t = Triangulation()
    if not items:
        return t
    order = hilbert_order(np.array([p for _, p in items]))
    prev = None
    for j in order:
        vid, p = items[j]
        t.insert(vid, p, hint=prev)
        prev = vid
    return t
