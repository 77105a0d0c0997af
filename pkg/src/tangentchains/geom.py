"""Plane primitives and the numeric predicates the incidence checks are built from.

Every predicate is tolerance based.  Tolerances are relative: they are scaled by
the size of the objects involved (radii, bounding diagonals), so a configuration
and any similar copy of it get the same answers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    AllParallel,
    CoincidentObjects,
    DuplicatePoints,
    GeometryError,
    NoIntersection,
    NotTangent,
    PointNotOnCircle,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite point ({x}, {y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, f: float) -> Point:
        return Point(self.x * f, self.y * f)

    __rmul__ = __mul__

    def __truediv__(self, f: float) -> Point:
        return Point(self.x / f, self.y / f)

    def __neg__(self) -> Point:
        return Point(-self.x, -self.y)

    def dot(self, other: Point) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y

    def dist(self, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def unit(self) -> Point:
        return self / self.norm()

    def perp(self) -> Point:
        """Counter-clockwise quarter turn."""
        return Point(-self.y, self.x)

    def rotate(self, angle: float) -> Point:
        c, s = math.cos(angle), math.sin(angle)
        return Point(c * self.x - s * self.y, s * self.x + c * self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)

    @classmethod
    def polar(cls, r: float, angle: float) -> Point:
        return cls(r * math.cos(angle), r * math.sin(angle))


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise GeometryError(f"circle radius must be positive and finite, got {r}")
        object.__setattr__(self, "radius", r)

    def point_at(self, angle: float) -> Point:
        return self.center + Point.polar(self.radius, angle)

    def power(self, p: Point) -> float:
        return (p - self.center).norm2() - self.radius ** 2


@dataclass(frozen=True, slots=True)
class Line:
    """The set ``normal . p == offset`` with a unit normal."""

    normal: Point
    offset: float

    def __post_init__(self):
        if abs(self.normal.norm() - 1.0) > 1e-12:
            raise GeometryError(f"line normal must be a unit vector, got {self.normal}")
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, p: Point, q: Point) -> Line:
        d = q - p
        if d.norm() == 0.0:
            raise DuplicatePoints("a line needs two distinct points")
        n = d.unit().perp()
        return cls(n, n.dot(p))

    @classmethod
    def from_normal(cls, normal: Point, offset: float) -> Line:
        k = normal.norm()
        return cls(normal / k, offset / k)

    @property
    def direction(self) -> Point:
        return Point(self.normal.y, -self.normal.x)

    def signed_distance(self, p: Point) -> float:
        return self.normal.dot(p) - self.offset

    def foot(self, p: Point) -> Point:
        return p - self.normal * self.signed_distance(p)


GeneralizedCircle = Union[Circle, Line]


@dataclass(frozen=True, slots=True)
class LineSeg2:
    """A line given by two of its points (the chords p_i and tangents t_i)."""

    p: Point
    q: Point

    def __post_init__(self):
        scale = max(self.p.norm(), self.q.norm(), 1.0)
        if self.p.dist(self.q) <= 1e-12 * scale:
            raise DuplicatePoints("line segment endpoints coincide")

    @classmethod
    def from_direction(cls, p: Point, direction: Point) -> LineSeg2:
        return cls(p, p + direction)

    def as_line(self) -> Line:
        return Line.through(self.p, self.q)


class TangencyKind(enum.Enum):
    EXTERNAL = "externally_tangent"
    INTERNAL = "internally_tangent"
    INTERSECTING = "intersecting"
    DISJOINT = "disjoint"
    NESTED = "nested"

    @property
    def is_tangent(self) -> bool:
        return self in (TangencyKind.EXTERNAL, TangencyKind.INTERNAL)


class Tangency(NamedTuple):
    kind: TangencyKind
    residual: float


class Concyclicity(NamedTuple):
    residual: float
    degenerate: bool


def as_line(obj: Union[Line, LineSeg2]) -> Line:
    return obj.as_line() if isinstance(obj, LineSeg2) else obj


def distance_to(g: GeneralizedCircle, p: Point) -> float:
    """Unsigned Euclidean distance from ``p`` to the curve ``g``."""
    if isinstance(g, Circle):
        return abs(p.dist(g.center) - g.radius)
    return abs(g.signed_distance(p))


def reflect_point(p: Point, line: Line) -> Point:
    return p - line.normal * (2.0 * line.signed_distance(p))


def bounding_scale(points: Sequence[Point]) -> float:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


def same_gcircle(a: GeneralizedCircle, b: GeneralizedCircle, tol: float = 1e-10) -> bool:
    if isinstance(a, Circle) and isinstance(b, Circle):
        scale = max(a.radius, b.radius)
        return a.center.dist(b.center) <= tol * scale and abs(a.radius - b.radius) <= tol * scale
    if isinstance(a, Line) and isinstance(b, Line):
        s = 1.0 if a.normal.dot(b.normal) > 0 else -1.0
        scale = max(abs(a.offset), 1.0)
        return (a.normal - b.normal * s).norm() <= tol and abs(a.offset - s * b.offset) <= tol * scale
    return False


def circle_from_3_points(p1: Point, p2: Point, p3: Point, tol: float = 1e-10) -> GeneralizedCircle:
    pts = (p1, p2, p3)
    pairs = [(0, 1), (0, 2), (1, 2)]
    dists = [pts[i].dist(pts[j]) for i, j in pairs]
    longest = max(dists)
    if min(dists) <= 1e-12 * longest or longest == 0.0:
        raise DuplicatePoints("circle through three points needs distinct points")
    b, c = p2 - p1, p3 - p1
    area2 = b.cross(c)
    if abs(area2) / longest <= tol * longest:
        i, j = pairs[dists.index(longest)]
        return Line.through(pts[i], pts[j])
    den = 2.0 * area2
    bb, cc = b.norm2(), c.norm2()
    u = Point((c.y * bb - b.y * cc) / den, (b.x * cc - c.x * bb) / den)
    # radius as the mean of the three distances keeps it symmetric in the inputs
    center = p1 + u
    radius = (center.dist(p1) + center.dist(p2) + center.dist(p3)) / 3.0
    return Circle(center, radius)


def tangency_classify(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = DEFAULT_TOL) -> Tangency:
    if isinstance(c1, Line) and isinstance(c2, Line):
        sine = abs(c1.normal.cross(c2.normal))
        if sine <= tol:
            return Tangency(TangencyKind.DISJOINT, sine)
        return Tangency(TangencyKind.INTERSECTING, sine)
    if isinstance(c1, Line) or isinstance(c2, Line):
        line, circle = (c1, c2) if isinstance(c1, Line) else (c2, c1)
        h = abs(line.signed_distance(circle.center))
        res = abs(h - circle.radius) / circle.radius
        if res <= tol:
            return Tangency(TangencyKind.EXTERNAL, res)
        return Tangency(TangencyKind.DISJOINT if h > circle.radius else TangencyKind.INTERSECTING, res)

    r1, r2 = c1.radius, c2.radius
    d = c1.center.dist(c2.center)
    total = r1 + r2
    ext = abs(d - total)
    inner = abs(d - abs(r1 - r2))
    res = min(ext, inner) / total
    if ext <= tol * total:
        return Tangency(TangencyKind.EXTERNAL, res)
    if inner <= tol * total:
        return Tangency(TangencyKind.INTERNAL, res)
    if d > total:
        return Tangency(TangencyKind.DISJOINT, res)
    if d < abs(r1 - r2):
        return Tangency(TangencyKind.NESTED, res)
    return Tangency(TangencyKind.INTERSECTING, res)


def tangency_point(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = DEFAULT_TOL) -> Point:
    kind, _ = tangency_classify(c1, c2, tol)
    if not kind.is_tangent:
        raise NotTangent(f"objects are {kind.value}, not tangent")
    if isinstance(c1, Line) or isinstance(c2, Line):
        line, circle = (c1, c2) if isinstance(c1, Line) else (c2, c1)
        return line.foot(circle.center)
    v = c2.center - c1.center
    d = v.norm()
    if kind is TangencyKind.EXTERNAL:
        return c1.center + v * (c1.radius / d)
    if d == 0.0:
        raise NotTangent("coincident circles have no single tangency point")
    big, small = (c1, c2) if c1.radius >= c2.radius else (c2, c1)
    w = small.center - big.center
    return big.center + w * (big.radius / w.norm())


def orthogonality_residual(c1: GeneralizedCircle, c2: GeneralizedCircle) -> float:
    """Zero iff the two objects cross at right angles."""
    if isinstance(c1, Line) and isinstance(c2, Line):
        return abs(c1.normal.dot(c2.normal))
    if isinstance(c1, Line) or isinstance(c2, Line):
        line, circle = (c1, c2) if isinstance(c1, Line) else (c2, c1)
        return abs(line.signed_distance(circle.center)) / circle.radius
    d2 = (c1.center - c2.center).norm2()
    s = c1.radius ** 2 + c2.radius ** 2
    return abs(d2 - s) / s


def _heron_area(a: float, b: float, c: float) -> float:
    a, b, c = sorted((a, b, c), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(prod, 0.0))


def intersection_angle(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = DEFAULT_TOL) -> float:
    """Acute angle in [0, pi/2] between the tangent lines at a common point."""
    kind, _ = tangency_classify(c1, c2, tol)
    if kind.is_tangent:
        return 0.0
    if isinstance(c1, Line) and isinstance(c2, Line):
        if kind is TangencyKind.DISJOINT:
            return 0.0
        return math.atan2(abs(c1.normal.cross(c2.normal)), abs(c1.normal.dot(c2.normal)))
    if kind in (TangencyKind.DISJOINT, TangencyKind.NESTED):
        raise NoIntersection(f"objects are {kind.value}")
    if isinstance(c1, Line) or isinstance(c2, Line):
        line, circle = (c1, c2) if isinstance(c1, Line) else (c2, c1)
        h = abs(line.signed_distance(circle.center))
        chord_half = math.sqrt(max(circle.radius ** 2 - h * h, 0.0))
        return math.atan2(h, chord_half)
    r1, r2 = c1.radius, c2.radius
    d = c1.center.dist(c2.center)
    cos_part = abs(r1 * r1 + r2 * r2 - d * d)
    sin_part = 4.0 * _heron_area(r1, r2, d)
    return math.atan2(sin_part, cos_part)


def _as_points(points) -> list[Point]:
    if len(points) == 1 and not isinstance(points[0], Point):
        points = points[0]
    return list(points)


def normalize_points(points: Sequence[Point], target_rms: float = 1.0) -> tuple[np.ndarray, Point, float]:
    """Shift to the centroid and scale to the requested RMS radius.

    Returns the normalized ``(n, 2)`` array, the centroid and the scale factor
    applied after the shift.
    """
    arr = np.array([p.as_tuple() for p in points], dtype=float)
    centroid = arr.mean(axis=0)
    shifted = arr - centroid
    rms = math.sqrt(float(np.mean(np.sum(shifted ** 2, axis=1))))
    if rms == 0.0:
        raise DuplicatePoints("all points coincide")
    k = target_rms / rms
    return shifted * k, Point(*centroid), k


def concyclicity_residual(*points, tol: float = 1e-10) -> Concyclicity:
    pts = _as_points(points)
    if len(pts) != 4:
        raise ValueError("concyclicity needs exactly four points")
    arr, _, _ = normalize_points(pts)
    for i in range(4):
        for j in range(i + 1, 4):
            if np.hypot(*(arr[i] - arr[j])) <= 1e-12:
                raise DuplicatePoints(f"points {i} and {j} coincide")
    rows = np.column_stack([np.sum(arr ** 2, axis=1), arr, np.ones(4)])
    residual = abs(float(np.linalg.det(rows)))
    smallest = np.linalg.svd(arr, compute_uv=False)[-1]
    return Concyclicity(residual, bool(smallest <= tol * 2.0))


def concurrency(lines: Sequence[Union[Line, LineSeg2]]) -> tuple[Point, float]:
    """Least-squares common point of the lines, and its worst normalized miss."""
    if len(lines) < 2:
        raise AllParallel("concurrency needs at least two lines")
    normal_form = [as_line(ln) for ln in lines]
    N = np.array([ln.normal.as_tuple() for ln in normal_form])
    c = np.array([ln.offset for ln in normal_form])
    eig = np.linalg.eigvalsh(N.T @ N)
    if eig[0] <= 1e-12 * eig[-1]:
        raise AllParallel("all lines are parallel")
    sol, *_ = np.linalg.lstsq(N, c, rcond=None)
    point = Point(*sol)
    anchors = [point]
    for ln, raw in zip(normal_form, lines):
        if isinstance(raw, LineSeg2):
            anchors += [raw.p, raw.q]
        else:
            anchors.append(ln.foot(point))
    diameter = bounding_scale(anchors) or 1.0
    miss = max(abs(ln.signed_distance(point)) for ln in normal_form)
    return point, miss / diameter


def tangent_line_at(c: GeneralizedCircle, p: Point, tol: float = DEFAULT_TOL) -> LineSeg2:
    if isinstance(c, Line):
        scale = max(abs(c.offset), p.norm(), 1.0)
        if abs(c.signed_distance(p)) > tol * scale:
            raise PointNotOnCircle(f"{p} is not on {c}")
        return LineSeg2.from_direction(p, c.direction * scale)
    radial = p - c.center
    if abs(radial.norm() - c.radius) > tol * c.radius:
        raise PointNotOnCircle(f"{p} is not on {c}")
    return LineSeg2.from_direction(p, radial.perp())


def intersect(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = DEFAULT_TOL) -> tuple[Point, ...]:
    if isinstance(c1, Line) and isinstance(c2, Line):
        det = c1.normal.cross(c2.normal)
        if abs(det) <= tol:
            s = 1.0 if c1.normal.dot(c2.normal) > 0 else -1.0
            if abs(c1.offset - s * c2.offset) <= tol * max(abs(c1.offset), 1.0):
                raise CoincidentObjects("identical lines")
            return ()
        x = (c1.offset * c2.normal.y - c2.offset * c1.normal.y) / det
        y = (c1.normal.x * c2.offset - c2.normal.x * c1.offset) / det
        return (Point(x, y),)

    if same_gcircle(c1, c2, tol):
        raise CoincidentObjects("identical circles")
    kind, _ = tangency_classify(c1, c2, tol)
    if kind.is_tangent:
        return (tangency_point(c1, c2, tol),)
    if kind in (TangencyKind.DISJOINT, TangencyKind.NESTED):
        return ()

    if isinstance(c1, Line) or isinstance(c2, Line):
        line, circle = (c1, c2) if isinstance(c1, Line) else (c2, c1)
        f = line.foot(circle.center)
        h = f.dist(circle.center)
        half = math.sqrt(max(circle.radius ** 2 - h * h, 0.0))
        u = line.direction
        return (f + u * half, f - u * half)

    v = c2.center - c1.center
    d = v.norm()
    u = v / d
    a = (d * d + c1.radius ** 2 - c2.radius ** 2) / (2.0 * d)
    h = math.sqrt(max(c1.radius ** 2 - a * a, 0.0))
    base = c1.center + u * a
    return (base + u.perp() * h, base - u.perp() * h)
