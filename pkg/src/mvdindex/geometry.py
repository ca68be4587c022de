"""Planar primitives: points, squared distances and exact predicates.

``orient`` and ``in_circle`` use a floating-point filter with the static
error bounds from Shewchuk's predicates and fall back to exact rational
arithmetic (``fractions.Fraction`` represents every double exactly) when the
filter cannot certify the sign.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import NamedTuple

__all__ = [
    "Point",
    "Orientation",
    "CirclePosition",
    "GeometryError",
    "DegeneratePredicateError",
    "DuplicatePointError",
    "dist2",
    "dist2_exact",
    "closer",
    "exact_before",
    "orient",
    "orient_det",
    "in_circle",
    "in_circle_det",
    "in_circle_sos",
    "make_point",
]

_EPS = 2.0 ** -53
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS
# The static bounds assume no underflow; below this magnitude go exact.
_TINY = 2.0 ** -900


class Point(NamedTuple):
    x: float
    y: float


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class CirclePosition(enum.IntEnum):
    OUTSIDE = -1
    ON = 0
    INSIDE = 1


class GeometryError(ValueError):
    pass


class DegeneratePredicateError(GeometryError):
    """Raised when a circle test is asked about a collinear triangle."""


class DuplicatePointError(GeometryError):
    def __init__(self, first: int, second: int, point):
        super().__init__(
            f"points {first} and {second} share coordinates ({point[0]!r}, {point[1]!r})"
        )
        self.ids = (first, second)


def make_point(x, y) -> Point:
    """Validate and build a point; rejects NaN and infinities."""
    x = float(x)
    y = float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate ({x!r}, {y!r})")
    return Point(x, y)


def dist2(a, b) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


# |dist2 - exact| stays below D2_REL * exact + D2_ABS: four roundings of at
# most one unit each, plus underflow slack. Two float distances further apart
# than this compare the same way as the exact ones.
D2_REL = 2e-15
D2_ABS = 1e-290


def dist2_exact(a, b) -> Fraction:
    dx = Fraction(a[0]) - Fraction(b[0])
    dy = Fraction(a[1]) - Fraction(b[1])
    return dx * dx + dy * dy


def exact_before(q, pa, ia: int, pb, ib: int) -> bool:
    """``(|pa - q|^2, ia) < (|pb - q|^2, ib)`` in exact arithmetic."""
    ea = dist2_exact(pa, q)
    eb = dist2_exact(pb, q)
    if ea != eb:
        return ea < eb
    return ia < ib


def closer(q, da: float, ia: int, pa, db: float, ib: int, pb) -> bool:
    """Exact ``(distance, id)`` comparison using the float distances as a filter.

    ``da`` and ``db`` are :func:`dist2` of ``pa`` and ``pb`` to ``q``.
    """
    tol = D2_REL * (da if da > db else db) + D2_ABS
    if da < db - tol:
        return True
    if db < da - tol:
        return False
    return exact_before(q, pa, ia, pb, ib)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient_det(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the orientation determinant of three points given by coordinates.

    +1 when a, b, c turn counter-clockwise, -1 clockwise, 0 when collinear.
    """
    l1 = ax - cx
    l2 = by - cy
    r1 = ay - cy
    r2 = bx - cx
    detleft = l1 * l2
    detright = r1 * r2
    if (-_TINY < detleft < _TINY and l1 and l2) or (-_TINY < detright < _TINY and r1 and r2):
        return _orient_exact(ax, ay, bx, by, cx, cy)
    det = detleft - detright
    if detleft > 0.0:
        if detright <= 0.0:
            return (det > 0.0) - (det < 0.0)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return (det > 0.0) - (det < 0.0)
        detsum = -detleft - detright
    else:
        return (det > 0.0) - (det < 0.0)
    errbound = _CCW_ERRBOUND * detsum
    if det >= errbound:
        return 1 if det else 0
    if -det >= errbound:
        return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def orient(a, b, c) -> Orientation:
    return Orientation(orient_det(a[0], a[1], b[0], b[1], c[0], c[1]))


def _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = map(Fraction, (ax, ay, bx, by, cx, cy, dx, dy))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdx * cdy - cdx * bdy)
        + blift * (cdx * ady - adx * cdy)
        + clift * (adx * bdy - bdx * ady)
    )
    return _sign(det)


def in_circle_det(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """Sign of the in-circle determinant.

    Positive when d is inside the circle through a, b, c taken in
    counter-clockwise order; the sign flips for clockwise input.
    """
    adx = ax - dx
    bdx = bx - dx
    cdx = cx - dx
    ady = ay - dy
    bdy = by - dy
    cdy = cy - dy

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    if permanent < _TINY:
        return _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy)
    errbound = _ICC_ERRBOUND * permanent
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _in_circle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def in_circle(a, b, c, d) -> CirclePosition:
    """Exact position of ``d`` relative to the circumcircle of ``a, b, c``.

    The triangle may be given in either orientation. A collinear triangle
    has no circumcircle and raises :class:`DegeneratePredicateError`.
    """
    o = orient_det(a[0], a[1], b[0], b[1], c[0], c[1])
    if o == 0:
        raise DegeneratePredicateError(f"collinear triangle {a}, {b}, {c}")
    s = in_circle_det(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    return CirclePosition(s * o)


def in_circle_sos(a, b, c, d, ia: int, ib: int, ic: int, id_: int) -> int:
    """In-circle test with cocircular ties broken symbolically.

    ``a, b, c`` must be counter-clockwise. Returns +1 (inside) or -1
    (outside), never 0 for four distinct points. Each point's paraboloid
    lift is lowered by an infinitesimal weight that dominates the weights
    of all larger ids, so the smallest id among the four decides a tie. The
    induced triangulation is the unique regular triangulation for those
    weights, which orders query distances exactly like the ``(dist2, id)``
    key. For a cocircular quadrilateral this selects the diagonal incident
    to the smallest id.
    """
    s = in_circle_det(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    if s:
        return s
    m = min(ia, ib, ic, id_)
    if m == id_:
        return 1
    # Lowering a triangle vertex lowers the lifted plane at d by its
    # barycentric weight; d ends up inside iff that weight is negative.
    if m == ia:
        w = orient_det(d[0], d[1], b[0], b[1], c[0], c[1])
    elif m == ib:
        w = orient_det(a[0], a[1], d[0], d[1], c[0], c[1])
    else:
        w = orient_det(a[0], a[1], b[0], b[1], d[0], d[1])
    return 1 if w < 0 else -1
