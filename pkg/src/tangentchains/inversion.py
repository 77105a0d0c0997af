"""Circle inversion on points and generalized circles.

``p -> c + power * (p - c) / |p - c|**2``.  Circles and lines map to circles and
lines, tangency and angles are preserved.  Two derived constructors pick the
inversion that straightens a tangent pair into parallel lines, and the one that
makes a nested pair concentric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import CenterIsSingular, GeometryError, NotNested, NotTangent
from .geom import (
    Circle,
    GeneralizedCircle,
    Line,
    Point,
    TangencyKind,
    tangency_classify,
    tangency_point,
)

THROUGH_CENTER_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class Inversion:
    center: Point
    power: float = 1.0

    def __post_init__(self):
        p = float(self.power)
        if not (math.isfinite(p) and p > 0):
            raise GeometryError(f"inversion power must be positive, got {p}")
        object.__setattr__(self, "power", p)

    @property
    def radius(self) -> float:
        return math.sqrt(self.power)

    def __call__(self, obj):
        if isinstance(obj, Point):
            return invert_point(self, obj)
        return invert_gcircle(self, obj)


def invert_point(inv: Inversion, p: Point) -> Point:
    v = p - inv.center
    d2 = v.norm2()
    scale = max(inv.center.norm(), p.norm(), inv.radius)
    if d2 <= (1e-14 * scale) ** 2:
        raise CenterIsSingular(f"{p} is the inversion center")
    return inv.center + v * (inv.power / d2)


def invert_gcircle(inv: Inversion, g: GeneralizedCircle) -> GeneralizedCircle:
    c = inv.center
    if isinstance(g, Line):
        h = g.signed_distance(c)
        if abs(h) <= THROUGH_CENTER_TOL * max(1.0, c.norm(), abs(g.offset)):
            return g
        foot = g.foot(c)
        far = invert_point(inv, foot)
        return Circle((c + far) / 2.0, far.dist(c) / 2.0)

    v = g.center - c
    d2 = v.norm2()
    r = g.radius
    d = math.sqrt(d2)
    if abs(d - r) <= THROUGH_CENTER_TOL * max(r, d):
        # the point diametrically opposite the center maps to the nearest point of the image line
        n = v / d
        near = c + v * (inv.power / (2.0 * d2))
        return Line(n, n.dot(near))
    den = d2 - r * r
    return Circle(c + v * (inv.power / den), inv.power * r / abs(den))


class StripFrame(NamedTuple):
    """Inversion at the contact point of a tangent pair, plus what it does to them."""

    inversion: Inversion
    contact: Point
    external: bool


def tangent_pair_frame(l: GeneralizedCircle, m: GeneralizedCircle, tol: float = 1e-9) -> StripFrame:
    if not (isinstance(l, Circle) and isinstance(m, Circle)):
        raise NotTangent("strip frames are built from two circles")
    kind, _ = tangency_classify(l, m, tol)
    if not kind.is_tangent:
        raise NotTangent(f"pair is {kind.value}")
    a = tangency_point(l, m, tol)
    return StripFrame(Inversion(a, 1.0), a, kind is TangencyKind.EXTERNAL)


def concentricizing_inversion(l: GeneralizedCircle, m: GeneralizedCircle, tol: float = 1e-9) -> Inversion:
    """Inversion centred at the limiting point inside the inner circle of a nested pair."""
    if not (isinstance(l, Circle) and isinstance(m, Circle)):
        raise NotNested("both objects must be circles")
    kind, _ = tangency_classify(l, m, tol)
    if kind is not TangencyKind.NESTED:
        raise NotNested(f"pair is {kind.value}")
    outer, inner = (l, m) if l.radius > m.radius else (m, l)
    v = inner.center - outer.center
    d = v.norm()
    if d <= 1e-12 * outer.radius:
        return Inversion(outer.center, 1.0)
    u = v / d
    R, r = outer.radius, inner.radius
    # limiting points X = O + t u satisfy t1 * t2 = R^2 and t1 + t2 = S
    s = (R * R + d * d - r * r) / d
    disc = math.sqrt(max(s * s - 4.0 * R * R, 0.0))
    t_far = (s + disc) / 2.0
    t_near = R * R / t_far
    t = t_near if abs(t_near - d) < r else t_far
    return Inversion(outer.center + u * t, 1.0)
