"""Command-line interface: ``mvd {gen,build,query,update,bench}``.

Output formats
--------------
``build`` and ``update`` print one machine-readable summary line on stdout::

    n=4 k=100 seed=20200101 layers=1 layer_sizes=4

Timings and other human-oriented text go to stderr, so stdout is stable
across runs. ``query`` prints a CSV table followed by a counter line::

    rank,id,x,y,distance
    1,0,0.0,0.0,0.1414213562373095
    # distance_evaluations=4 points_visited=1 layers_traversed=1

Exit status is 0 on success, 1 on invalid input or a benchmark correctness
failure, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import List, Optional, Sequence

from .bench import OracleMismatch, Workload, gen_points, run_grid
from .dataio import (
    PointFileError,
    SnapshotError,
    load_snapshot,
    read_id_file,
    read_point_file,
    save_snapshot,
    write_point_file,
)
from .geometry import GeometryError, Point
from .mvd import DEFAULT_K, DEFAULT_SEED, MvdIndex

__all__ = ["main", "make_parser", "summary_line", "format_query"]


class CliError(Exception):
    """Invalid input; reported on stderr with exit status 1."""


def _int_list(text: str) -> List[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _construction_k(text: str) -> int:
    v = _positive(text)
    if v < 2:
        raise argparse.ArgumentTypeError("--k must be at least 2")
    return v


def parse_query_point(text: str) -> Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"query point must look like 'x,y', got {text!r}")
    try:
        x, y = float(parts[0]), float(parts[1])
    except ValueError:
        raise CliError(f"query point must look like 'x,y', got {text!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise CliError(f"query point must be finite, got {text!r}")
    return Point(x, y)


def summary_line(idx: MvdIndex) -> str:
    sizes = idx.layer_sizes()
    return (
        f"n={len(idx)} k={idx.k} seed={idx.seed} layers={len(sizes)} "
        f"layer_sizes={','.join(str(s) for s in sizes)}"
    )


def format_query(idx: MvdIndex, q: Point, k_query: Optional[int]) -> str:
    if k_query is None:
        best, stats = idx.nn(q)
        ids = [best]
    else:
        ids, stats = idx.knn(q, k_query)
    lines = ["rank,id,x,y,distance"]
    for rank, i in enumerate(ids, start=1):
        p = idx.point(i)
        d = math.hypot(p.x - q.x, p.y - q.y)
        lines.append(f"{rank},{i},{p.x!r},{p.y!r},{d!r}")
    lines.append(
        f"# distance_evaluations={stats.distance_evaluations} "
        f"points_visited={stats.points_visited} layers_traversed={stats.layers_traversed}"
    )
    return "\n".join(lines) + "\n"


def _err(msg: str) -> None:
    print(f"mvd: error: {msg}", file=sys.stderr)


# ----------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    w = Workload(distribution=args.dist, n=args.n, seed=args.seed)
    pts = gen_points(w)
    if args.output == "-":
        sys.stdout.write("id,x,y\n")
        for i, p in pts:
            sys.stdout.write(f"{i},{p.x!r},{p.y!r}\n")
    else:
        write_point_file(args.output, pts)
        print(f"wrote {len(pts)} points to {args.output}", file=sys.stderr)
    return 0


def cmd_build(args) -> int:
    records = read_point_file(args.input)
    if not records:
        raise CliError(f"{args.input}: no points")
    points = [(r.id if r.id is not None else i, r.point) for i, r in enumerate(records)]
    t0 = time.perf_counter()
    idx = MvdIndex.build(points, k=args.k, seed=args.seed)
    ms = (time.perf_counter() - t0) * 1e3
    save_snapshot(idx, args.output)
    print(summary_line(idx))
    print(f"built {len(idx)} points in {ms:.1f} ms, snapshot written to {args.output}", file=sys.stderr)
    return 0


def cmd_query(args) -> int:
    idx = load_snapshot(args.input)
    if len(idx) == 0:
        raise CliError(f"{args.input}: index is empty")
    q = parse_query_point(args.point)
    sys.stdout.write(format_query(idx, q, args.k_query))
    return 0


def cmd_update(args) -> int:
    idx = load_snapshot(args.input)
    deletes = read_id_file(args.deletes) if args.deletes else []
    inserts = read_point_file(args.inserts) if args.inserts else []

    # validate the whole batch before touching the index
    removed = set()
    for line, vid in deletes:
        if vid not in idx:
            raise CliError(f"{args.deletes}:{line}: unknown id {vid}")
        if vid in removed:
            raise CliError(f"{args.deletes}:{line}: id {vid} deleted twice")
        removed.add(vid)
    live_coords = {p: i for i, p in idx.points().items() if i not in removed}
    next_id = idx.next_id
    planned = []
    for r in inserts:
        if r.id is None:
            vid = next_id
        else:
            vid = r.id
            if vid in idx and vid not in removed:
                raise CliError(f"{args.inserts}:{r.line}: id {vid} already indexed")
        next_id = max(next_id, vid + 1)
        if r.point in live_coords:
            raise CliError(
                f"{args.inserts}:{r.line}: point ({r.point.x!r}, {r.point.y!r}) "
                f"already indexed as id {live_coords[r.point]}"
            )
        live_coords[r.point] = vid
        planned.append((vid, r.point))

    t0 = time.perf_counter()
    for _, vid in deletes:
        idx.delete(vid)
    for vid, p in planned:
        idx.insert(vid, p)
    ms = (time.perf_counter() - t0) * 1e3
    out = args.output or args.input
    save_snapshot(idx, out)
    print(summary_line(idx))
    print(f"deleted {len(deletes)}, inserted {len(planned)} in {ms:.1f} ms, snapshot written to {out}",
          file=sys.stderr)
    return 0


def cmd_bench(args, parser) -> int:
    if args.dist == "file" and not args.input:
        parser.error("--dist file requires --input")
    if args.dist != "file" and args.input:
        parser.error(f"--input conflicts with --dist {args.dist}")
    template = Workload(distribution=args.dist, seed=args.seed, query_count=args.queries,
                        input=args.input, n=1)
    indices = [s.strip() for s in args.indices.split(",") if s.strip()]
    log = (lambda s: print(s, file=sys.stderr)) if not args.quiet else None
    sizes = args.sizes or ([10000] if args.k_list else [10, 100, 1000, 10000, 100000])
    report = run_grid(indices, sizes, args.k_list or [], template,
                      trials=args.trials, k=args.k, log=log)
    csv_text = report.to_csv()
    md_text = report.to_markdown()
    if args.output == "-":
        sys.stdout.write(csv_text)
    else:
        base, ext = os.path.splitext(args.output)
        md_path = (base if ext.lower() == ".csv" else args.output) + ".md"
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
        with open(md_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(md_text)
        print(f"wrote {len(report.rows)} rows to {args.output} and {md_path}", file=sys.stderr)
    return 0


# ----------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvd", description="Multi-layer Voronoi nearest-neighbour index")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic point file")
    p.add_argument("--dist", choices=["uniform", "exp"], default="uniform")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", required=True, help="point file to write, or - for stdout")

    p = sub.add_parser("build", help="build an index snapshot from a point file")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=_construction_k, default=DEFAULT_K)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", required=True)

    p = sub.add_parser("query", help="nearest-neighbour or k-nearest query on a snapshot")
    p.add_argument("--input", required=True, help="snapshot file")
    p.add_argument("--point", required=True, help="query point as x,y")
    p.add_argument("--k-query", type=_positive, default=None)

    p = sub.add_parser("update", help="apply deletes then inserts to a snapshot")
    p.add_argument("--input", required=True, help="snapshot file")
    p.add_argument("--inserts", help="point file of points to insert")
    p.add_argument("--deletes", help="file with one id per line to delete")
    p.add_argument("--output", help="snapshot to write (default: overwrite --input)")

    p = sub.add_parser("bench", help="run the benchmark grid")
    p.add_argument("--dist", choices=["uniform", "exp", "file"], default="uniform")
    p.add_argument("--input", help="point file (only with --dist file)")
    p.add_argument("--sizes", type=_int_list, default=None,
                   help="point counts (default 10..100000 for NN, 10000 for kNN)")
    p.add_argument("--k-list", type=_int_list, default=None,
                   help="k_query values for a kNN report; omit for a nearest-neighbour report")
    p.add_argument("--trials", type=_positive, default=5)
    p.add_argument("--queries", type=_positive, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--k", type=_construction_k, default=DEFAULT_K)
    p.add_argument("--indices", default="mvd,kdtree,scan")
    p.add_argument("--output", default="bench.csv", help="CSV path (Markdown goes next to it), or -")
    p.add_argument("--quiet", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "build":
            return cmd_build(args)
        if args.command == "query":
            return cmd_query(args)
        if args.command == "update":
            return cmd_update(args)
        return cmd_bench(args, parser)
    except OracleMismatch as exc:
        _err(f"correctness failure: {exc}")
        return 1
    except (CliError, PointFileError, SnapshotError, GeometryError, KeyError, LookupError, ValueError) as exc:
        _err(exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc))
        return 1
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror or exc}")
        return 1

