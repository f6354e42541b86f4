"""Exact geometric kernel.

Vertex coordinates are rationals (:class:`fractions.Fraction`).  The six cone
rays sit at multiples of 60 degrees, so anything derived from them (corners of
canonical triangles, projections on bisectors, intersections with lines
perpendicular to a bisector) lives in Q[sqrt(3)] and is represented by
:class:`QS3`.  Every predicate here is exact.

Directions are classified into six *sectors*: sector ``k`` is the open angular
range ``(60k, 60k + 60)`` degrees measured counterclockwise from the positive
x-axis.  Cone labels (:class:`ConeId`) are a naming layer on top of sectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DegenerateDirection, NotInPositiveCone

SQRT3 = math.sqrt(3.0)

LEFT, RIGHT, COLLINEAR = 1, -1, 0


class QS3:
    """Exact number ``a + b*sqrt(3)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if type(a) is Fraction else Fraction(a)
        self.b = b if type(b) is Fraction else Fraction(b)

    @staticmethod
    def _lift(other):
        if isinstance(other, QS3):
            return other
        if isinstance(other, (int, Fraction)):
            return QS3(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = QS3._lift(other)
        if o is NotImplemented:
            return o
        return QS3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = QS3._lift(other)
        if o is NotImplemented:
            return o
        return QS3(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = QS3._lift(other)
        if o is NotImplemented:
            return o
        return QS3(o.a - self.a, o.b - self.b)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QS3(self.a * other, self.b * other)
        if not isinstance(other, QS3):
            return NotImplemented
        return QS3(self.a * other.a + 3 * self.b * other.b, self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QS3":
        return QS3(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2`` (zero only for zero)."""
        return self.a * self.a - 3 * self.b * self.b

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QS3(self.a / other, self.b / other)
        if not isinstance(other, QS3):
            return NotImplemented
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q[sqrt3]")
        num = self * other.conjugate()
        return QS3(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = QS3._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return QS3(-self.a, -self.b)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs; a^2 == 3 b^2 is impossible for nonzero rationals
        if a > 0:
            return 1 if a * a > 3 * b * b else -1
        return -1 if a * a > 3 * b * b else 1

    def _cmp(self, other) -> int:
        o = QS3._lift(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QS3 with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = QS3._lift(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT3

    def __repr__(self):
        return f"QS3({self.a}, {self.b})"


Number = Union[int, Fraction, QS3]


def sgn(x) -> int:
    if isinstance(x, QS3):
        return x.sign()
    return (x > 0) - (x < 0)


class Point:
    """Immutable plane point; coordinates are rationals or :class:`QS3`."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    def __iter__(self):
        yield self.x
        yield self.y

    def __eq__(self, other):
        return isinstance(other, Point) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scale(self, k) -> "Point":
        return Point(self.x * k, self.y * k)

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def to_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __repr__(self):
        return f"Point({self.x}, {self.y})"


def P(x, y) -> Point:
    """Build a rational point from ints, Fractions or rational literals."""
    return Point(parse_rational(x), parse_rational(y))


def parse_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string literal instead")
    return Fraction(str(value).strip())


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# basic predicates


def cross(u: Point, v: Point):
    return u.x * v.y - u.y * v.x


def dot(u: Point, v: Point):
    return u.x * v.x + u.y * v.y


def orient(p: Point, q: Point, r: Point) -> int:
    """Sign of the signed area of ``pqr``: LEFT (+1), RIGHT (-1) or COLLINEAR (0)."""
    return sgn((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x))


def segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True iff open segments ab and cd cross at a point interior to both."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return False
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o3 != 0 and o4 != 0 and o3 != o4


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)) and (min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share at least one point."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return on_segment(c, a, b) or on_segment(d, a, b) or on_segment(a, c, d) or on_segment(b, c, d)


def line_intersection(a: Point, b: Point, c: Point, d: Point) -> Point:
    """Intersection of the (non-parallel) lines ab and cd."""
    r = b - a
    s = d - c
    den = cross(r, s)
    if sgn(den) == 0:
        raise ValueError("parallel lines")
    lam = cross(c - a, s) / den
    return a + r.scale(lam)


def dist(p: Point, q: Point) -> float:
    dx = float(p.x - q.x)
    dy = float(p.y - q.y)
    return math.hypot(dx, dy)


# ---------------------------------------------------------------------------
# rays, sectors, bisectors
#
# Ray j points at angle 60j degrees.  It is stored doubled, as
# (RAY_X[j], RAY_Y3[j] * sqrt(3)), so both parts stay integral.

RAY_X = (2, 1, -1, -2, -1, 1)
RAY_Y3 = (0, 1, 1, 0, -1, -1)


def ray_vector(j: int) -> Point:
    j %= 6
    return Point(QS3(RAY_X[j]), QS3(0, RAY_Y3[j]))


def ray_cross(j: int, d: Point):
    """cross(ray_j, d) as an exact number (QS3 when d is rational)."""
    j %= 6
    if isinstance(d.x, QS3) or isinstance(d.y, QS3):
        return cross(ray_vector(j), d)
    return QS3(RAY_X[j] * d.y, -RAY_Y3[j] * d.x)


def sector_of(d: Point) -> int:
    """Sector index 0..5 of a nonzero direction; DegenerateDirection on a ray."""
    dx, dy = d.x, d.y
    if isinstance(dx, QS3) or isinstance(dy, QS3):
        return _sector_generic(d)
    if dy == 0:
        if dx == 0:
            raise DegenerateDirection("zero direction")
        raise DegenerateDirection(f"direction {d} lies on a horizontal ray")
    # dy^2 == 3 dx^2 has no nonzero rational solution, so the 60/120 degree
    # rays can never be hit exactly by a rational direction.
    steep = dy * dy > 3 * dx * dx
    if dy > 0:
        if steep:
            return 1
        return 0 if dx > 0 else 2
    if steep:
        return 4
    return 5 if dx > 0 else 3


def _sector_generic(d: Point) -> int:
    for k in range(6):
        if sgn(ray_cross(k, d)) > 0 and sgn(ray_cross(k + 1, d)) < 0:
            return k
    raise DegenerateDirection(f"direction {d} lies on a cone ray")


def in_sector(d: Point, k: int) -> bool:
    """Open-sector membership test that never raises."""
    return sgn(ray_cross(k, d)) > 0 and sgn(ray_cross(k + 1, d)) < 0


def in_closed_sector(d: Point, k: int) -> bool:
    return sgn(ray_cross(k, d)) >= 0 and sgn(ray_cross(k + 1, d)) <= 0 and sgn(dot(d, bisector_vector(k))) > 0


def bisector_vector(k: int) -> Point:
    """Sum of the two doubled bounding rays of sector k; length 2*sqrt(3)."""
    k %= 6
    j = (k + 1) % 6
    return Point(QS3(RAY_X[k] + RAY_X[j]), QS3(0, RAY_Y3[k] + RAY_Y3[j]))


def bisector_dot(k: int, d: Point):
    """Dot product of d with :func:`bisector_vector` of sector k (exact)."""
    k %= 6
    j = (k + 1) % 6
    bx = RAY_X[k] + RAY_X[j]
    by3 = RAY_Y3[k] + RAY_Y3[j]
    if isinstance(d.x, QS3) or isinstance(d.y, QS3):
        return d.x * bx + d.y * QS3(0, by3)
    return QS3(bx * d.x, by3 * d.y)


# Half-graph labels per sector (standard orientation): C0 at sector 1, then
# counterclockwise C2-bar, C1, C0-bar, C2, C1-bar.
_HALF_LABEL = {1: (True, 0), 2: (False, 2), 3: (True, 1), 4: (False, 0), 5: (True, 2), 0: (False, 1)}
_HALF_SECTOR = {v: k for k, v in _HALF_LABEL.items()}

FAMILIES = ("theta6", "half_plus", "half_minus")


def is_positive_sector(k: int, family: str) -> bool:
    """Whether sector k is a positive cone of the given half-graph family."""
    if family == "half_plus":
        return k % 2 == 1
    if family == "half_minus":
        return k % 2 == 0
    raise ValueError(f"family {family!r} has no positive/negative split")


@dataclass(frozen=True)
class ConeId:
    """Cone label.

    ``kind="theta6"``: ``index`` 0..5 counterclockwise, cone 0 contains +y.
    ``kind="half"``: ``index`` 0..2 plus ``positive`` (C_i vs C-bar_i), in the
    standard orientation.
    """

    kind: str
    index: int
    positive: bool | None = None

    @property
    def sector(self) -> int:
        if self.kind == "theta6":
            return (self.index + 1) % 6
        return _HALF_SECTOR[(bool(self.positive), self.index)]

    @classmethod
    def from_sector(cls, k: int, kind: str = "half") -> "ConeId":
        k %= 6
        if kind == "theta6":
            return cls("theta6", (k - 1) % 6)
        positive, index = _HALF_LABEL[k]
        return cls("half", index, positive)

    def __str__(self):
        if self.kind == "theta6":
            return f"T{self.index}"
        return f"C{self.index}" if self.positive else f"C{self.index}bar"


def cone_of(apex: Point, v: Point, kind: str = "half") -> ConeId:
    if apex == v:
        raise DegenerateDirection("apex and v coincide")
    return ConeId.from_sector(sector_of(v - apex), kind)


def opposite_cone_symmetry_check(u: Point, v: Point) -> bool:
    cu = cone_of(u, v)
    cv = cone_of(v, u)
    return cu.index == cv.index and cu.positive != cv.positive


def project_on_bisector(apex: Point, cone: ConeId, v: Point) -> QS3:
    """Squared distance from apex to the projection of v on the cone bisector."""
    k = cone.sector
    d = v - apex
    if not in_closed_sector(d, k):
        raise ValueError(f"{v} is not in cone {cone} of {apex}")
    b = bisector_dot(k, d)
    return (b * b) / 12


def projection_key(k: int, d: Point):
    """Monotone stand-in for the projection length of d on sector k's bisector."""
    return bisector_dot(k, d)


# ---------------------------------------------------------------------------
# canonical triangles


@dataclass(frozen=True)
class CanonicalTriangle:
    apex: int | None
    target: int | None
    cone: ConeId
    apex_point: Point
    a: Point
    b: Point

    def corners(self) -> tuple[Point, Point, Point]:
        return self.apex_point, self.b, self.a

    def contains(self, p: Point, closed: bool = True) -> bool:
        return point_in_triangle(p, self.apex_point, self.b, self.a, closed=closed)


def corner_on_ray(apex: Point, k: int, j: int, level) -> Point:
    """Point on ray j from apex whose bisector_dot for sector k equals level."""
    r = ray_vector(j)
    lam = level / bisector_dot(k, r)
    return apex + r.scale(lam)


def canonical_triangle(u: Point, w: Point, family: str = "half_plus", *,
                       apex_id: int | None = None, target_id: int | None = None) -> CanonicalTriangle:
    """Canonical triangle of apex u towards w (w in a positive cone of u)."""
    k = sector_of(w - u)
    if not is_positive_sector(k, family):
        raise NotInPositiveCone(f"{w} lies in negative cone {ConeId.from_sector(k)} of {u}")
    return canonical_triangle_in_sector(u, w, k, apex_id=apex_id, target_id=target_id)


def canonical_triangle_in_sector(u: Point, w: Point, k: int, *, apex_id=None, target_id=None) -> CanonicalTriangle:
    level = bisector_dot(k, w - u)
    a = corner_on_ray(u, k, k + 1, level)  # counterclockwise ("upper-left") corner
    b = corner_on_ray(u, k, k, level)
    return CanonicalTriangle(apex_id, target_id, ConeId.from_sector(k), u, a, b)


def point_in_triangle(p: Point, a: Point, b: Point, c: Point, closed: bool = True) -> bool:
    o1, o2, o3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    if closed:
        return (o1 >= 0 and o2 >= 0 and o3 >= 0) or (o1 <= 0 and o2 <= 0 and o3 <= 0)
    return (o1 > 0 and o2 > 0 and o3 > 0) or (o1 < 0 and o2 < 0 and o3 < 0)


def perpendicular_hit(s: Point, t: Point, p: Point, k: int) -> Point:
    """Intersection of line st with the line through p perpendicular to sector k's bisector."""
    den = bisector_dot(k, t - s)
    mu = bisector_dot(k, p - s) / den
    return s + (t - s).scale(mu)


# ---------------------------------------------------------------------------
# simple polygons (exact)


def point_strictly_in_polygon(poly: list[Point], p: Point) -> bool:
    """Winding-number test; points on the boundary count as outside."""
    n = len(poly)
    wn = 0
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if on_segment(p, a, b):
            return False
        if a.y <= p.y:
            if b.y > p.y and orient(a, b, p) > 0:
                wn += 1
        elif b.y <= p.y and orient(a, b, p) < 0:
            wn -= 1
    return wn != 0


def _param_on(a: Point, b: Point, q: Point):
    d = b - a
    return dot(q - a, d) / dot(d, d)


def segment_meets_polygon_interior(poly: list[Point], a: Point, b: Point) -> bool:
    """Whether the closed segment ab passes through the open interior of poly."""
    params = {Fraction(0), Fraction(1)}
    n = len(poly)
    for i in range(n):
        c, d = poly[i], poly[(i + 1) % n]
        if segments_properly_intersect(a, b, c, d):
            params.add(_param_on(a, b, line_intersection(a, b, c, d)))
            continue
        for q in (c, d):
            if on_segment(q, a, b):
                params.add(_param_on(a, b, q))
        for q in (a, b):
            if on_segment(q, c, d):
                params.add(_param_on(a, b, q))
    ordered = sorted(params, key=_exact_key)
    for lo, hi in zip(ordered, ordered[1:]):
        if sgn(hi - lo) == 0:
            continue
        mid = (lo + hi) / 2
        if point_strictly_in_polygon(poly, a + (b - a).scale(mid)):
            return True
    return False


class _exact_key:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return sgn(self.v - other.v) < 0
