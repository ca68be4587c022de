"""Exact nearest-neighbour search over dynamic 2-D point sets with a multi-layer Voronoi index."""

from .baselines import KdTree, LinearScanIndex
from .delaunay import Triangulation, bulk_build
from .geometry import (
    CirclePosition,
    DegeneratePredicateError,
    DuplicatePointError,
    GeometryError,
    Orientation,
    Point,
    dist2,
    in_circle,
    orient,
)
from .mvd import DEFAULT_K, DEFAULT_SEED, CandidateList, MvdIndex, QueryStats, vd_nn

__all__ = [
    "CandidateList",
    "CirclePosition",
    "DEFAULT_K",
    "DEFAULT_SEED",
    "DegeneratePredicateError",
    "DuplicatePointError",
    "GeometryError",
    "KdTree",
    "LinearScanIndex",
    "MvdIndex",
    "Orientation",
    "Point",
    "QueryStats",
    "Triangulation",
    "bulk_build",
    "dist2",
    "in_circle",
    "orient",
    "vd_nn",
]
