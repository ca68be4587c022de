"""Point-file ingestion and index snapshots.

Point files are UTF-8 text with one ``id,x,y`` or ``x,y`` record per line.
Lines starting with ``#`` and blank lines are ignored, and the first record
may be a header. Every record in a file must have the same number of fields.

Snapshots are JSON documents::

    {"format": "mvd-snapshot", "version": 1,
     "k": 100, "seed": 20200101, "mutations": 0, "next_id": 4,
     "layers": [[0, 1, 2, 3]],
     "points": [[0, 0.0, 0.0], ...]}

``layers`` lists the sorted vertex ids of each layer, bottom first;
``points`` is the full point table sorted by id. ``mutations`` counts
inserts and deletes since the build and, together with ``seed``, fixes the
random choices of later updates. Triangulations are not stored: they are
rebuilt on load, and since every layer's triangulation is a function of its
point set, the reloaded index answers identically.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .geometry import Point
from .mvd import MvdIndex

__all__ = [
    "SNAPSHOT_FORMAT",
    "SNAPSHOT_VERSION",
    "PointFileError",
    "SnapshotError",
    "PointRecord",
    "parse_point_lines",
    "read_point_file",
    "read_points",
    "write_point_file",
    "read_id_file",
    "save_snapshot",
    "load_snapshot",
    "dump_snapshot",
    "loads_snapshot",
]

SNAPSHOT_FORMAT = "mvd-snapshot"
SNAPSHOT_VERSION = 1


class PointFileError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class PointRecord:
    line: int
    id: Optional[int]
    point: Point


def _parse_float(text: str) -> Optional[float]:
    try:
        return float(text)
    except ValueError:
        return None


def parse_point_lines(lines, source: str = "<input>") -> List[PointRecord]:
    """Parse point records, validating arity, finiteness and uniqueness."""
    records: List[PointRecord] = []
    arity = None
    seen_coords: Dict[Point, int] = {}
    seen_ids: Dict[int, int] = {}
    first = True
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        values = [_parse_float(f) for f in fields]
        if first and any(v is None for v in values):
            first = False
            if len(fields) not in (2, 3):
                raise PointFileError(source, lineno, f"header must have 2 or 3 columns, got {len(fields)}")
            continue
        first = False
        if len(fields) not in (2, 3):
            raise PointFileError(source, lineno, f"expected 'x,y' or 'id,x,y', got {len(fields)} fields")
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise PointFileError(source, lineno, f"expected {arity} fields like earlier records, got {len(fields)}")
        if any(v is None for v in values):
            raise PointFileError(source, lineno, f"malformed number in {line!r}")
        pid = None
        if arity == 3:
            try:
                pid = int(fields[0])
            except ValueError:
                raise PointFileError(source, lineno, f"id must be an integer, got {fields[0]!r}") from None
            if pid < 0:
                raise PointFileError(source, lineno, f"id must be non-negative, got {pid}")
            if pid in seen_ids:
                raise PointFileError(source, lineno, f"duplicate id {pid} (first on line {seen_ids[pid]})")
            seen_ids[pid] = lineno
        x, y = values[-2], values[-1]
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PointFileError(source, lineno, f"non-finite coordinate in {line!r}")
        p = Point(x, y)
        if p in seen_coords:
            raise PointFileError(
                source, lineno, f"duplicate coordinates ({x!r}, {y!r}) (first on line {seen_coords[p]})"
            )
        seen_coords[p] = lineno
        records.append(PointRecord(lineno, pid, p))
    return records


def read_point_file(path) -> List[PointRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_point_lines(fh, source=os.fspath(path))


def read_points(path) -> List[Tuple[int, Point]]:
    """Read a point file into ``(id, point)`` pairs; missing ids become 0..n-1."""
    records = read_point_file(path)
    return [(r.id if r.id is not None else i, r.point) for i, r in enumerate(records)]


def write_point_file(path, points, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write("id,x,y\n")
        for i, p in points:
            fh.write(f"{int(i)},{float(p[0])!r},{float(p[1])!r}\n")


def read_id_file(path) -> List[Tuple[int, int]]:
    """Read one integer id per line; returns ``(line, id)`` pairs."""
    out = []
    source = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                out.append((lineno, int(line)))
            except ValueError:
                raise PointFileError(source, lineno, f"expected an integer id, got {line!r}") from None
    return out


def dump_snapshot(idx: MvdIndex) -> str:
    pts = idx.points()
    lines = [
        "{",
        f'"format": "{SNAPSHOT_FORMAT}",',
        f'"version": {SNAPSHOT_VERSION},',
        f'"k": {idx.k},',
        f'"seed": {idx.seed},',
        f'"mutations": {idx.mutations},',
        f'"next_id": {idx.next_id},',
        '"layers": [',
    ]
    layer_ids = idx.layer_ids()
    for j, ids in enumerate(layer_ids):
        sep = "," if j + 1 < len(layer_ids) else ""
        lines.append(json.dumps(ids) + sep)
    lines.append("],")
    lines.append('"points": [')
    order = sorted(pts)
    for j, i in enumerate(order):
        p = pts[i]
        sep = "," if j + 1 < len(order) else ""
        lines.append(f"[{i}, {json.dumps(p.x)}, {json.dumps(p.y)}]{sep}")
    lines.append("]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_snapshot(text: str) -> MvdIndex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"snapshot is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotError("not an MVD snapshot")
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {doc.get('version')!r}")
    try:
        points = [(int(i), Point(float(x), float(y))) for i, x, y in doc["points"]]
        return MvdIndex.from_layers(
            points,
            doc["layers"],
            k=int(doc["k"]),
            seed=int(doc["seed"]),
            mutations=int(doc.get("mutations", 0)),
            next_id=int(doc["next_id"]) if "next_id" in doc else None,
        )
    except (KeyError, TypeError, ValueError, AssertionError) as exc:
        raise SnapshotError(f"malformed snapshot: {exc}") from None


def save_snapshot(idx: MvdIndex, path) -> None:
    text = dump_snapshot(idx)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_snapshot(path) -> MvdIndex:
    with open(path, encoding="utf-8") as fh:
        return loads_snapshot(fh.read())
