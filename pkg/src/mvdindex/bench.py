"""Workload generation and the benchmark grid.

The primary metric is the number of point-to-query distance evaluations,
which does not depend on the machine; wall-clock times are reported next to
it. Every answer is checked against the linear-scan oracle, and a wrong
answer aborts the run with :class:`OracleMismatch`.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import KdTree, LinearScanIndex
from .geometry import Point
from .mvd import DEFAULT_K, DEFAULT_SEED, MvdIndex

__all__ = [
    "DISTRIBUTIONS",
    "INDEX_NAMES",
    "CSV_COLUMNS",
    "Workload",
    "BenchRow",
    "BenchReport",
    "OracleMismatch",
    "gen_points",
    "gen_queries",
    "build_index",
    "run_cell",
    "run_grid",
]

DISTRIBUTIONS = ("uniform", "exp", "file")
INDEX_NAMES = ("mvd", "kdtree", "scan")
CSV_COLUMNS = (
    "index", "n", "k_query", "trials", "mean_ns", "median_ns", "p95_ns",
    "mean_dist_evals", "mean_visited", "build_ms",
)

_DIST_CODES = {"uniform": 1, "exp": 2, "exponential": 2, "file": 3}
_QUERY_STREAM = 7
_POINT_STREAM = 3


class OracleMismatch(AssertionError):
    def __init__(self, index: str, query, expected, got):
        super().__init__(
            f"{index} answered {got!r} for query ({query[0]!r}, {query[1]!r}); oracle says {expected!r}"
        )
        self.index = index
        self.query = query
        self.expected = expected
        self.got = got


@dataclass(frozen=True)
class Workload:
    """A reproducible point set plus query stream.

    ``distribution`` is ``"uniform"`` (unit square), ``"exp"`` (rate-1
    exponential per coordinate, min-max rescaled into the unit square) or
    ``"file"`` (points read from ``input``).
    """

    distribution: str = "uniform"
    n: int = 1000
    seed: int = DEFAULT_SEED
    query_count: int = 1000
    k_query: Optional[int] = None
    dim: int = 2
    input: Optional[str] = None

    def __post_init__(self):
        if self.distribution == "exponential":
            object.__setattr__(self, "distribution", "exp")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.dim != 2:
            raise ValueError("only 2-D workloads are supported")
        if self.distribution == "file" and not self.input:
            raise ValueError("file workloads need an input path")

    def rng(self, stream: int) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed, _DIST_CODES[self.distribution], self.n, stream])
        return np.random.default_rng(ss)


def _draw(dist: str, rng: np.random.Generator, m: int) -> np.ndarray:
    if dist == "uniform":
        return rng.random((m, 2))
    return rng.exponential(1.0, (m, 2))


def _dedupe_redraw(dist, rng, xy: np.ndarray) -> np.ndarray:
    while True:
        _, first = np.unique(xy, axis=0, return_index=True)
        if len(first) == len(xy):
            return xy
        keep = np.sort(first)
        extra = _draw(dist, rng, len(xy) - len(keep))
        xy = np.concatenate([xy[keep], extra])


def _exp_bounds(xy: np.ndarray):
    lo = xy.min(axis=0)
    span = xy.max(axis=0) - lo
    span[span == 0] = 1.0
    return lo, span


def _raw_points(w: Workload) -> np.ndarray:
    rng = w.rng(_POINT_STREAM)
    xy = _dedupe_redraw(w.distribution, rng, _draw(w.distribution, rng, w.n))
    if w.distribution == "exp":
        # redraw until no two points collide after rescaling
        while True:
            lo, span = _exp_bounds(xy)
            scaled = (xy - lo) / span
            if len(np.unique(scaled, axis=0)) == len(scaled):
                break
            xy = _dedupe_redraw(w.distribution, rng, np.concatenate([xy[:-1], _draw("exp", rng, 1)]))
    return xy


def gen_points(w: Workload) -> List[Tuple[int, Point]]:
    """Points of a workload with dense ids ``0..n-1``; identical for identical fields."""
    if w.distribution == "file":
        from .dataio import read_points

        return read_points(w.input)
    if w.n < 1:
        raise ValueError("workload needs n >= 1")
    xy = _raw_points(w)
    if w.distribution == "exp":
        lo, span = _exp_bounds(xy)
        xy = (xy - lo) / span
    return [(i, Point(float(x), float(y))) for i, (x, y) in enumerate(xy)]


def gen_queries(w: Workload, points: Sequence[Tuple[int, Point]]) -> List[Point]:
    """Query points drawn from the workload's distribution, none equal to a data point.

    Exponential queries use the data's rescaling; file workloads draw
    uniformly over the data's bounding box.
    """
    rng = w.rng(_QUERY_STREAM)
    taken = {p for _, p in points}
    if w.distribution == "exp":
        lo, span = _exp_bounds(_raw_points(w))
    elif w.distribution == "file":
        xy = np.array([tuple(p) for _, p in points], dtype=float)
        lo = xy.min(axis=0)
        span = xy.max(axis=0) - lo
    out: List[Point] = []
    while len(out) < w.query_count:
        m = w.query_count - len(out)
        if w.distribution == "uniform":
            qs = rng.random((m, 2))
        elif w.distribution == "exp":
            qs = (rng.exponential(1.0, (m, 2)) - lo) / span
        else:
            qs = lo + rng.random((m, 2)) * span
        for x, y in qs:
            p = Point(float(x), float(y))
            if p not in taken:
                out.append(p)
    return out


@dataclass
class BenchRow:
    index: str
    n: int
    k_query: int
    trials: int
    mean_ns: float
    median_ns: float
    p95_ns: float
    mean_dist_evals: float
    mean_visited: float
    build_ms: float
    samples_ns: List[int] = field(default_factory=list, repr=False)

    def csv_values(self):
        return [
            self.index, self.n, self.k_query, self.trials,
            f"{self.mean_ns:.1f}", f"{self.median_ns:.1f}", f"{self.p95_ns:.1f}",
            f"{self.mean_dist_evals:.3f}", f"{self.mean_visited:.3f}", f"{self.build_ms:.3f}",
        ]


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}={self.metadata[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.csv_values())
        return buf.getvalue()

    def to_markdown(self) -> str:
        """Time and evaluation tables: one row per size (NN) or per k (kNN), one column per index."""
        if not self.rows:
            return ""
        knn = self.metadata.get("query") == "knn"
        key = (lambda r: r.k_query) if knn else (lambda r: r.n)
        label = "k" if knn else "Size"
        names = list(dict.fromkeys(r.index for r in self.rows))
        keys = list(dict.fromkeys(key(r) for r in self.rows))
        cell = {(r.index, key(r)): r for r in self.rows}
        out = []
        for title, attr, fmt in (
            ("Mean query time (ns)", "mean_ns", "{:.0f}"),
            ("Mean distance evaluations per query", "mean_dist_evals", "{:.1f}"),
        ):
            out.append(f"**{title}**")
            out.append("")
            out.append("| " + " | ".join([label] + names) + " |")
            out.append("|" + "---|" * (len(names) + 1))
            for k in keys:
                vals = [fmt.format(getattr(cell[(nm, k)], attr)) if (nm, k) in cell else "" for nm in names]
                out.append("| " + " | ".join([str(k)] + vals) + " |")
            out.append("")
        return "\n".join(out)


def build_index(name: str, points, k: int = DEFAULT_K, seed: int = DEFAULT_SEED, leaf_capacity: int = 100):
    if name == "mvd":
        return MvdIndex.build(points, k=k, seed=seed)
    if name == "kdtree":
        return KdTree(points, leaf_capacity=leaf_capacity)
    if name == "scan":
        return LinearScanIndex(points)
    raise ValueError(f"unknown index {name!r}")


def run_cell(name: str, index, queries: Sequence[Point], expected: Sequence,
             k_query: Optional[int], trials: int, n: int, build_ms: float,
             clock: Callable[[], int] = time.perf_counter_ns) -> BenchRow:
    """Time one index on one query list, checking every answer against ``expected``."""
    samples: List[int] = []
    evals = 0
    visited = 0
    count = 0
    for trial in range(trials):
        for q, want in zip(queries, expected):
            if k_query is None:
                t0 = clock()
                got, stats = index.nn(q)
                t1 = clock()
            else:
                t0 = clock()
                got, stats = index.knn(q, k_query)
                t1 = clock()
            if got != want:
                raise OracleMismatch(name, q, want, got)
            samples.append(t1 - t0)
            evals += stats.distance_evaluations
            visited += stats.points_visited
            count += 1
    ordered = sorted(samples)
    p95 = ordered[min(len(ordered) - 1, int(np.ceil(0.95 * len(ordered))) - 1)] if ordered else 0
    return BenchRow(
        index=name,
        n=n,
        k_query=1 if k_query is None else k_query,
        trials=trials,
        mean_ns=statistics.fmean(samples) if samples else 0.0,
        median_ns=float(statistics.median(samples)) if samples else 0.0,
        p95_ns=float(p95),
        mean_dist_evals=evals / count if count else 0.0,
        mean_visited=visited / count if count else 0.0,
        build_ms=build_ms,
        samples_ns=samples,
    )


def run_grid(indices: Sequence[str], sizes: Sequence[int], k_list: Sequence[int],
             template: Workload, trials: int = 5, k: int = DEFAULT_K,
             leaf_capacity: int = 100, log: Optional[Callable[[str], None]] = None) -> BenchReport:
    """Benchmark every (index, size, k_query) cell.

    An empty ``k_list`` runs nearest-neighbour queries (reported as
    ``k_query = 1``); otherwise each listed ``k_query`` runs a kNN query.
    For file workloads ``sizes`` is ignored and the file's size is used.
    """
    for name in indices:
        if name not in INDEX_NAMES:
            raise ValueError(f"unknown index {name!r}")
    report = BenchReport(metadata={
        "distribution": template.distribution,
        "query": "knn" if k_list else "nn",
        "seed": str(template.seed),
        "trials": str(trials),
        "queries_per_trial": str(template.query_count),
        "mvd_k": str(k),
        "kdtree_leaf_capacity": str(leaf_capacity),
        "aggregation": "mean/median/p95 over all timed queries of all trials",
    })
    if template.distribution == "exp":
        report.metadata["exp_generator"] = "rate 1 per coordinate, min-max rescaled to [0,1]^2"
    if template.distribution == "file":
        report.metadata["input"] = str(template.input)
        sizes = [None]
    ks: List[Optional[int]] = list(k_list) if k_list else [None]
    for size in sizes:
        w = template if size is None else replace(template, n=int(size))
        points = gen_points(w)
        n = len(points)
        if size is None:
            w = replace(w, n=n)
        queries = gen_queries(w, points)
        oracle = LinearScanIndex(points)
        built = {}
        for name in indices:
            t0 = time.perf_counter()
            built[name] = build_index(name, points, k=k, seed=w.seed, leaf_capacity=leaf_capacity)
            built[name + ":ms"] = (time.perf_counter() - t0) * 1e3
        for kq in ks:
            if kq is None:
                expected = [oracle.nn(q)[0] for q in queries]
            else:
                expected = [oracle.knn(q, kq)[0] for q in queries]
            for name in indices:
                row = run_cell(name, built[name], queries, expected, kq, trials, n, built[name + ":ms"])
                report.rows.append(row)
                if log:
                    log(f"{name:>6} n={n:<7} k_query={row.k_query:<3} mean={row.mean_ns:10.0f} ns "
                        f"evals={row.mean_dist_evals:8.1f}")
    return report
