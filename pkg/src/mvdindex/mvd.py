"""Multi-layer Voronoi diagram (MVD) index.

Layer 0 is the Delaunay triangulation of every point; each higher layer
triangulates a random subset of the layer below, roughly ``1/k`` of its
size. A nearest-neighbour query walks greedily inside the top layer and
uses each answer to seed the walk one layer down, in the spirit of a skip
list. Points are ordered by exact squared distance to the query, ties going
to the smaller id, so answers are exact and deterministic. Float distances
decide every comparison they can certify; near-ties fall back to rational
arithmetic.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .delaunay import Triangulation, bulk_build
from .geometry import D2_ABS, D2_REL, GeometryError, Point, closer, dist2, exact_before, make_point

__all__ = [
    "DEFAULT_K",
    "DEFAULT_SEED",
    "QueryStats",
    "CandidateList",
    "MvdIndex",
    "build",
    "vd_nn",
    "nn",
    "knn",
    "insert",
    "delete",
]

DEFAULT_K = 100
DEFAULT_SEED = 20200101


@dataclass
class QueryStats:
    distance_evaluations: int = 0
    points_visited: int = 0
    layers_traversed: int = 0


class CandidateList:
    """Fixed-capacity list of ``(dist2, id, point)`` entries nearest to ``q`` first.

    Entries are ordered by exact squared distance to ``q``, then id; the
    stored float distances only speed up comparisons.
    """

    __slots__ = ("capacity", "q", "entries")

    def __init__(self, capacity: int, q=(0.0, 0.0)):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self.q = q
        self.entries: List[Tuple[float, int, Point]] = []

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def offer(self, d: float, i: int, p) -> bool:
        """Insert a point if it belongs among the best ``capacity``; True if kept."""
        entries = self.entries
        q = self.q
        full = len(entries) >= self.capacity
        if full:
            last = entries[-1]
            if not closer(q, d, i, p, last[0], last[1], last[2]):
                return False
        lo, hi = 0, len(entries)
        while lo < hi:
            mid = (lo + hi) // 2
            e = entries[mid]
            if closer(q, e[0], e[1], e[2], d, i, p):
                lo = mid + 1
            else:
                hi = mid
        entries.insert(lo, (d, i, p))
        if full:
            entries.pop()
        return True

    def ids(self) -> List[int]:
        return [e[1] for e in self.entries]


def _walk(layer: Triangulation, q, start: int, start_d: float, stats: QueryStats, seen: dict):
    # Greedy best-improvement walk; returns (dist2, id) of the layer NN.
    # ``seen`` maps ids to distances already computed for this query. Such
    # a point was beaten by the start of this walk (on this or a higher
    # layer), so it can never improve on the current best and is skipped.
    pts = layer._pts
    neighbors = layer.neighbors
    nbrs = layer._nbrs
    best = start
    bd = start_d
    lo = bd - bd * D2_REL - D2_ABS
    hi = bd + bd * D2_REL + D2_ABS
    evals = 0
    hops = 0
    qx, qy = q[0], q[1]
    while True:
        hops += 1
        cur = best
        for n in nbrs.get(cur) or neighbors(cur):
            if n in seen:
                continue
            p = pts[n]
            dx = p[0] - qx
            dy = p[1] - qy
            d = seen[n] = dx * dx + dy * dy
            evals += 1
            # near-ties are settled exactly
            if d < lo or (d <= hi and exact_before(q, p, n, pts[best], best)):
                best = n
                bd = d
                lo = bd - bd * D2_REL - D2_ABS
                hi = bd + bd * D2_REL + D2_ABS
        if best == cur:
            break
    stats.distance_evaluations += evals
    stats.points_visited += hops
    stats.layers_traversed += 1
    return bd, best


def vd_nn(layer: Triangulation, q, start: Optional[int] = None,
          stats: Optional[QueryStats] = None) -> int:
    """Nearest vertex of ``layer`` to ``q`` by greedy descent over Voronoi neighbours.

    Without ``start`` the walk begins at the smallest id in the layer.
    """
    if len(layer) == 0:
        raise LookupError("nearest-neighbour walk on an empty layer")
    if start is None:
        start = min(layer)
    elif start not in layer:
        raise KeyError(f"start vertex {start} is not in this layer")
    if stats is None:
        stats = QueryStats()
    stats.distance_evaluations += 1
    d = dist2(layer.point(start), q)
    return _walk(layer, q, start, d, stats, {start: d})[1]


class MvdIndex:
    """Layered Voronoi index over a dynamic 2-D point set.

    Parameters
    ----------
    k : int
        Construction parameter, the expected size ratio between adjacent
        layers and the inverse promotion probability.
    seed : int
        Seed for layer sampling and for the random choices made by
        :meth:`insert` and :meth:`delete`.
    demotion : bool
        Enable the probabilistic removal of a neighbouring point from layers
        that do not contain a deleted point.
    """

    def __init__(self, k: int = DEFAULT_K, seed: int = DEFAULT_SEED, demotion: bool = True):
        if not isinstance(k, int) or k < 2:
            raise ValueError(f"construction parameter k must be an integer >= 2, got {k!r}")
        self.k = k
        self.seed = int(seed)
        self.demotion = demotion
        self.layers: List[Triangulation] = [Triangulation()]
        self.mutations = 0
        self.next_id = 0
        self._top_start: Optional[int] = None

    # ------------------------------------------------------------------

    @classmethod
    def build(cls, points: Iterable[Tuple[int, Point]], k: int = DEFAULT_K,
              seed: int = DEFAULT_SEED, **kwargs) -> "MvdIndex":
        idx = cls(k=k, seed=seed, **kwargs)
        items = [(int(i), p if isinstance(p, Point) else make_point(*p)) for i, p in points]
        idx.layers = [bulk_build(items)]
        rng = random.Random(idx.seed)
        ids = sorted(i for i, _ in items)
        coords = dict(items)
        while len(ids) > k:
            ids = sorted(rng.sample(ids, math.ceil(len(ids) / k)))
            idx.layers.append(bulk_build((i, coords[i]) for i in ids))
        idx.next_id = max((i for i, _ in items), default=-1) + 1
        idx._refresh()
        return idx

    @classmethod
    def from_layers(cls, points: Iterable[Tuple[int, Point]], layer_ids: Sequence[Iterable[int]],
                    k: int, seed: int, mutations: int = 0, next_id: Optional[int] = None,
                    **kwargs) -> "MvdIndex":
        """Rebuild an index from explicit per-layer id sets (used by snapshots)."""
        idx = cls(k=k, seed=seed, **kwargs)
        coords = {int(i): (p if isinstance(p, Point) else make_point(*p)) for i, p in points}
        layers = [sorted(int(i) for i in ids) for ids in layer_ids] or [[]]
        if set(layers[0]) != set(coords):
            raise GeometryError("layer 0 must contain exactly the point table")
        idx.layers = [bulk_build((i, coords[i]) for i in ids) for ids in layers]
        idx.check_nesting()
        idx.mutations = mutations
        idx.next_id = next_id if next_id is not None else max(coords, default=-1) + 1
        idx._refresh()
        return idx

    def _refresh(self) -> None:
        while len(self.layers) > 1 and len(self.layers[-1]) == 0:
            self.layers.pop()
        top = self.layers[-1]
        self._top_start = min(top) if len(top) else None

    def _op_rng(self) -> random.Random:
        rng = random.Random(f"{self.seed}:{self.mutations}")
        self.mutations += 1
        return rng

    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.layers[0])

    def __contains__(self, vid) -> bool:
        return vid in self.layers[0]

    def point(self, vid: int) -> Point:
        return self.layers[0].point(vid)

    def points(self):
        return self.layers[0].points()

    def layer_sizes(self) -> List[int]:
        return [len(t) for t in self.layers]

    def layer_ids(self) -> List[List[int]]:
        return [sorted(t) for t in self.layers]

    def check_nesting(self) -> None:
        for i in range(len(self.layers) - 1):
            upper = self.layers[i + 1].ids()
            if not upper <= self.layers[i].ids():
                extra = sorted(upper - self.layers[i].ids())[:5]
                raise AssertionError(f"layer {i + 1} has ids missing from layer {i}: {extra}")

    # ------------------------------------------------------------------
    # queries

    def _descend(self, q, stats: QueryStats, cache: Optional[dict] = None) -> List[Tuple[float, int]]:
        start = self._top_start
        if start is None:
            raise LookupError("query on an empty index")
        if cache is None:
            cache = {}
        top = self.layers[-1]
        stats.distance_evaluations += 1
        d = cache[start] = dist2(top.point(start), q)
        key = (d, start)
        found = [None] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            key = _walk(self.layers[i], q, key[1], key[0], stats, cache)
            found[i] = key
        return found

    def nn(self, q) -> Tuple[int, QueryStats]:
        stats = QueryStats()
        return self._descend(q, stats)[0][1], stats

    def knn(self, q, k_query: int) -> Tuple[List[int], QueryStats]:
        """The ``k_query`` nearest ids, nearest first, ties by smaller id.

        When the index holds fewer points, all of them are returned; callers
        detect that case from the shorter result.
        """
        if k_query < 1:
            raise ValueError(f"k_query must be >= 1, got {k_query}")
        stats = QueryStats()
        cache: dict = {}
        first = self._descend(q, stats, cache)[0]
        cand = CandidateList(k_query, q)
        cand.offer(first[0], first[1], self.layers[0].point(first[1]))
        layer = self.layers[0]
        pts = layer._pts
        neighbors = layer.neighbors
        visited = {first[1]}
        qx, qy = q[0], q[1]
        evals = 0
        expanded = 0
        entries = cand.entries
        # rank r is final once all neighbours of ranks < r have been offered
        for r in range(k_query - 1):
            if r >= len(entries):
                break
            expanded += 1
            for n in neighbors(entries[r][1]):
                if n in visited:
                    continue
                visited.add(n)
                p = pts[n]
                d = cache.get(n)
                if d is None:
                    dx = p[0] - qx
                    dy = p[1] - qy
                    d = dx * dx + dy * dy
                    evals += 1
                cand.offer(d, n, p)
        stats.distance_evaluations += evals
        stats.points_visited += expanded
        return cand.ids(), stats

    # ------------------------------------------------------------------
    # maintenance

    def insert(self, vid: int, p) -> None:
        """Add a point to layer 0 and promote it upwards with probability ``1/k`` per layer."""
        p = p if isinstance(p, Point) else make_point(*p)
        vid = int(vid)
        base = self.layers[0]
        if vid in base:
            raise GeometryError(f"point id {vid} already indexed")
        if len(base) == 0:
            base.insert(vid, p)
            hints = [None]
        else:
            hints = [key[1] for key in self._descend(p, QueryStats())]
            base.insert(vid, p, hint=hints[0])
        self.next_id = max(self.next_id, vid + 1)
        rng = self._op_rng()
        i = 1
        while rng.random() < 1.0 / self.k:
            if i < len(self.layers):
                self.layers[i].insert(vid, p, hint=hints[i] if i < len(hints) else None)
                i += 1
            else:
                top = Triangulation()
                top.insert(vid, p)
                self.layers.append(top)
                break
        self._refresh()

    def delete(self, vid: int) -> None:
        """Remove a point from every layer, repairing layer sizes at random."""
        base = self.layers[0]
        if vid not in base:
            raise KeyError(f"unknown point id {vid}")
        p = base.point(vid)
        rng = self._op_rng()
        base.delete(vid)
        k = self.k
        layers = self.layers
        i = 1
        while i < len(layers):
            layer = layers[i]
            if vid in layer:
                layer.delete(vid)
                if rng.random() < 1.0 - 1.0 / k:
                    sub = _nearest_absent(layers[i - 1], p, layer)
                    if sub is not None:
                        hint = layer.locate(p) if len(layer) else None
                        layer.insert(sub, layers[i - 1].point(sub), hint=hint)
            elif self.demotion and rng.random() < 1.0 / k:
                victim = layer.locate(p)
                if i + 1 >= len(layers) or victim not in layers[i + 1]:
                    layer.delete(victim)
            if len(layer) == 0:
                del layers[i:]
                break
            i += 1
        self._refresh()


def _nearest_absent(lower: Triangulation, q, exclude: Triangulation) -> Optional[int]:
    """Nearest vertex of ``lower`` to ``q`` that is not a vertex of ``exclude``."""
    if len(lower) == 0:
        return None
    pts = lower._pts
    start = lower.locate(q)
    heap = [(dist2(pts[start], q), start)]
    seen = {start}
    while heap:
        _, v = heapq.heappop(heap)
        if v not in exclude:
            return v
        for n in lower.neighbors(v):
            if n not in seen:
                seen.add(n)
                heapq.heappush(heap, (dist2(pts[n], q), n))
    return None


# functional aliases mirroring the operation names


def build(points, k: int = DEFAULT_K, seed: int = DEFAULT_SEED, **kwargs) -> MvdIndex:
    return MvdIndex.build(points, k=k, seed=seed, **kwargs)


def nn(idx: MvdIndex, q) -> Tuple[int, QueryStats]:
    return idx.nn(q)


def knn(idx: MvdIndex, q, k_query: int) -> Tuple[List[int], QueryStats]:
    return idx.knn(q, k_query)


def insert(idx: MvdIndex, vid: int, p) -> None:
    idx.insert(vid, p)


def delete(idx: MvdIndex, vid: int) -> None:
    idx.delete(vid)
