"""Reference searchers: an exhaustive linear scan and a bulk-built kd-tree.

The linear scan is the correctness oracle for everything else. Both rank
points by exact squared distance to the query, then id: float distances
settle every comparison they can certify and near-ties are recomputed in
rational arithmetic.
"""

from __future__ import annotations

import heapq
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import D2_ABS, D2_REL, Point, dist2_exact, exact_before, make_point
from .mvd import CandidateList, QueryStats

__all__ = ["LinearScanIndex", "KdTree", "scan_nn", "scan_knn", "kd_build", "kd_nn", "kd_knn"]


class LinearScanIndex:
    def __init__(self, points: Iterable[Tuple[int, Point]]):
        items = list(points)
        self.ids = np.array([int(i) for i, _ in items], dtype=np.int64)
        xy = np.array([tuple(p) for _, p in items], dtype=float).reshape(-1, 2)
        self.xs = np.ascontiguousarray(xy[:, 0])
        self.ys = np.ascontiguousarray(xy[:, 1])

    def __len__(self):
        return len(self.ids)

    def _d2(self, q) -> np.ndarray:
        dx = self.xs - float(q[0])
        dy = self.ys - float(q[1])
        return dx * dx + dy * dy

    def _exact_order(self, q, sel: np.ndarray) -> np.ndarray:
        # sort candidate indices by (distance, id), exactly
        keys = [(dist2_exact((self.xs[j], self.ys[j]), q), int(self.ids[j])) for j in sel.tolist()]
        order = sorted(range(len(keys)), key=keys.__getitem__)
        return sel[order]

    def nn(self, q) -> Tuple[int, QueryStats]:
        if len(self.ids) == 0:
            raise LookupError("nearest-neighbour query on an empty point set")
        d = self._d2(q)
        m = d.min()
        sel = np.flatnonzero(d <= m + 2 * (m * D2_REL + D2_ABS))
        if len(sel) == 1:
            best = int(self.ids[sel[0]])
        else:
            best = int(self.ids[self._exact_order(q, sel)[0]])
        return best, QueryStats(len(self.ids), len(self.ids), 0)

    def knn(self, q, k_query: int) -> Tuple[List[int], QueryStats]:
        if k_query < 1:
            raise ValueError(f"k_query must be >= 1, got {k_query}")
        n = len(self.ids)
        if n == 0:
            raise LookupError("k-nearest query on an empty point set")
        d = self._d2(q)
        if k_query >= n:
            sel = np.arange(n)
        else:
            # keep everything that might tie with the k-th distance
            kth = np.partition(d, k_query - 1)[k_query - 1]
            sel = np.flatnonzero(d <= kth + 2 * (kth * D2_REL + D2_ABS))
        order = sel[np.lexsort((self.ids[sel], d[sel]))]
        ds = d[order]
        gaps = np.diff(ds) <= 2 * (ds[1:] * D2_REL + D2_ABS)
        if gaps.any():
            order = self._exact_order(q, order)
        return [int(i) for i in self.ids[order[:k_query]]], QueryStats(n, n, 0)


def scan_nn(idx: LinearScanIndex, q) -> int:
    return idx.nn(q)[0]


def scan_knn(idx: LinearScanIndex, q, k_query: int) -> List[int]:
    return idx.knn(q, k_query)[0]


class _Node:
    __slots__ = ("lo_x", "lo_y", "hi_x", "hi_y", "left", "right", "bucket")

    def __init__(self, lo_x, lo_y, hi_x, hi_y):
        self.lo_x = lo_x
        self.lo_y = lo_y
        self.hi_x = hi_x
        self.hi_y = hi_y
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.bucket: Optional[List[Tuple[float, float, int]]] = None

    def box_d2(self, qx: float, qy: float) -> float:
        if qx < self.lo_x:
            dx = self.lo_x - qx
        elif qx > self.hi_x:
            dx = qx - self.hi_x
        else:
            dx = 0.0
        if qy < self.lo_y:
            dy = self.lo_y - qy
        elif qy > self.hi_y:
            dy = qy - self.hi_y
        else:
            dy = 0.0
        return dx * dx + dy * dy


class KdTree:
    """Median-split kd-tree with leaf buckets and best-first search.

    Each node keeps the tight bounding box of its points, which is what the
    search prunes on, so ties on the splitting coordinate need no special
    handling.
    """

    def __init__(self, points: Iterable[Tuple[int, Point]], leaf_capacity: int = 100):
        if leaf_capacity < 1:
            raise ValueError("leaf_capacity must be at least 1")
        self.leaf_capacity = leaf_capacity
        items = [(int(i), p if isinstance(p, Point) else make_point(*p)) for i, p in points]
        self.size = len(items)
        self.root: Optional[_Node] = None
        if items:
            ids = np.array([i for i, _ in items], dtype=np.int64)
            xy = np.array([tuple(p) for _, p in items], dtype=float)
            self.root = self._build(xy, ids, 0)

    def __len__(self):
        return self.size

    def _build(self, xy: np.ndarray, ids: np.ndarray, depth: int) -> _Node:
        lo = xy.min(axis=0)
        hi = xy.max(axis=0)
        node = _Node(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        n = len(ids)
        if n <= self.leaf_capacity:
            node.bucket = [(float(x), float(y), int(i)) for (x, y), i in zip(xy, ids)]
            return node
        axis = depth % 2
        mid = n // 2
        part = np.argpartition(xy[:, axis], mid)
        left, right = part[:mid], part[mid:]
        node.left = self._build(xy[left], ids[left], depth + 1)
        node.right = self._build(xy[right], ids[right], depth + 1)
        return node

    def leaves(self):
        stack = [self.root] if self.root else []
        while stack:
            node = stack.pop()
            if node.bucket is not None:
                yield node
            else:
                stack.append(node.left)
                stack.append(node.right)

    def nn(self, q) -> Tuple[int, QueryStats]:
        if self.root is None:
            raise LookupError("nearest-neighbour query on an empty kd-tree")
        qx, qy = float(q[0]), float(q[1])
        stats = QueryStats()
        bd = float("inf")
        best = -1
        bp = None
        hi = bd
        heap = [(0.0, 0, self.root)]
        tick = 1
        evals = 0
        visited = 0
        q = (qx, qy)
        while heap:
            d, _, node = heapq.heappop(heap)
            # a box within rounding of the best may still hold a tie with a smaller id
            if d > hi:
                break
            visited += 1
            if node.bucket is not None:
                for x, y, i in node.bucket:
                    dx = x - qx
                    dy = y - qy
                    dd = dx * dx + dy * dy
                    if dd > hi:
                        continue
                    if bp is None or dd < bd - bd * D2_REL - D2_ABS or exact_before(q, (x, y), i, bp, best):
                        bd, best, bp = dd, i, (x, y)
                        hi = bd + bd * D2_REL + D2_ABS
                evals += len(node.bucket)
                continue
            for child in (node.left, node.right):
                cd = child.box_d2(qx, qy)
                if cd <= hi:
                    heapq.heappush(heap, (cd, tick, child))
                    tick += 1
        stats.distance_evaluations = evals
        stats.points_visited = visited
        return best, stats

    def knn(self, q, k_query: int) -> Tuple[List[int], QueryStats]:
        if k_query < 1:
            raise ValueError(f"k_query must be >= 1, got {k_query}")
        if self.root is None:
            raise LookupError("k-nearest query on an empty kd-tree")
        qx, qy = float(q[0]), float(q[1])
        stats = QueryStats()
        cand = CandidateList(k_query, (qx, qy))
        entries = cand.entries
        heap = [(0.0, 0, self.root)]
        tick = 1
        evals = 0
        visited = 0
        hi = float("inf")
        while heap:
            d, _, node = heapq.heappop(heap)
            if d > hi:
                break
            visited += 1
            if node.bucket is not None:
                for x, y, i in node.bucket:
                    dx = x - qx
                    dy = y - qy
                    dd = dx * dx + dy * dy
                    if dd <= hi:
                        cand.offer(dd, i, (x, y))
                evals += len(node.bucket)
                if len(entries) == k_query:
                    last = entries[-1][0]
                    hi = last + last * D2_REL + D2_ABS
                continue
            for child in (node.left, node.right):
                cd = child.box_d2(qx, qy)
                if cd <= hi:
                    heapq.heappush(heap, (cd, tick, child))
                    tick += 1
        stats.distance_evaluations = evals
        stats.points_visited = visited
        return cand.ids(), stats


def kd_build(points: Sequence[Tuple[int, Point]], leaf_capacity: int = 100) -> KdTree:
    return KdTree(points, leaf_capacity)


def kd_nn(tree: KdTree, q) -> Tuple[int, QueryStats]:
    return tree.nn(q)


def kd_knn(tree: KdTree, q, k_query: int) -> Tuple[List[int], QueryStats]:
    return tree.knn(q, k_query)
