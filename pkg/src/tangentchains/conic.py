"""Conic fitting, classification, Sampson residuals and foci.

A conic ``A x^2 + B xy + C y^2 + D x + E y + F = 0`` is kept twice: in world
coordinates (unit norm, first non-zero coefficient positive) and in the
normalized frame it was fitted in.  Residuals are measured in that frame, which
makes them relative to the size of the fitted point cloud.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotCentral, RankDeficient
from .geom import Point, normalize_points

KIND_TOL = 1e-10
RANK_TOL = 1e-9
FIT_RMS = math.sqrt(2.0)


class ConicKind(enum.Enum):
    ELLIPSE = "ellipse"
    CIRCLE = "circle"
    HYPERBOLA = "hyperbola"
    PARABOLA = "parabola"
    DEGENERATE_LINES = "degenerate_lines"

    def matches(self, expected: str) -> bool:
        if expected in (None, "any"):
            return True
        if expected == "ellipse":
            return self in (ConicKind.ELLIPSE, ConicKind.CIRCLE)
        return self.value == expected


def canonical(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    c = c / np.linalg.norm(c)
    for v in c:
        if abs(v) > 1e-12:
            return c if v > 0 else -c
    return c


def _to_world(local: np.ndarray, origin: Point, scale: float) -> np.ndarray:
    # local coords X = scale * (x - ox), Y = scale * (y - oy)
    a, b, c, d, e, f = local
    s = scale
    ox, oy = origin.x, origin.y
    A = a * s * s
    B = b * s * s
    C = c * s * s
    D = -2 * a * s * s * ox - b * s * s * oy + d * s
    E = -2 * c * s * s * oy - b * s * s * ox + e * s
    F = (a * s * s * ox * ox + b * s * s * ox * oy + c * s * s * oy * oy
         - d * s * ox - e * s * oy + f)
    return canonical([A, B, C, D, E, F])


def classify_coefficients(coeffs, tol: float = KIND_TOL) -> ConicKind:
    a, b, c, d, e, f = canonical(coeffs)
    mat = np.array([[a, b / 2, d / 2], [b / 2, c, e / 2], [d / 2, e / 2, f]])
    if abs(np.linalg.det(mat)) <= tol:
        return ConicKind.DEGENERATE_LINES
    disc = b * b - 4 * a * c
    if disc < -tol:
        if abs(b) <= tol and abs(a - c) <= tol:
            return ConicKind.CIRCLE
        return ConicKind.ELLIPSE
    if disc > tol:
        return ConicKind.HYPERBOLA
    return ConicKind.PARABOLA


@dataclass(frozen=True)
class Conic:
    coefficients: tuple
    kind: ConicKind
    origin: Point = Point(0.0, 0.0)
    scale: float = 1.0
    local: tuple = field(default=None, repr=False)

    @classmethod
    def from_coefficients(cls, coeffs, origin: Point = Point(0.0, 0.0), scale: float = 1.0,
                          local=None) -> Conic:
        world = canonical(coeffs)
        loc = canonical(local if local is not None else coeffs)
        if local is None and (origin != Point(0.0, 0.0) or scale != 1.0):
            raise ValueError("a non-trivial frame needs explicit local coefficients")
        return cls(tuple(float(v) for v in world), classify_coefficients(loc),
                   origin, float(scale), tuple(float(v) for v in loc))

    def to_local(self, p: Point) -> tuple[float, float]:
        return ((p.x - self.origin.x) * self.scale, (p.y - self.origin.y) * self.scale)

    def to_world(self, x: float, y: float) -> Point:
        return Point(x / self.scale + self.origin.x, y / self.scale + self.origin.y)

    def value(self, p: Point) -> float:
        a, b, c, d, e, f = self.local
        x, y = self.to_local(p)
        return a * x * x + b * x * y + c * y * y + d * x + e * y + f


def _design(arr: np.ndarray) -> np.ndarray:
    x, y = arr[:, 0], arr[:, 1]
    return np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])


def _fit(points: Sequence[Point], null_dim_index: int) -> Conic:
    arr, centroid, k = normalize_points(points, FIT_RMS)
    design = _design(arr)
    _, sv, vt = np.linalg.svd(design, full_matrices=True)
    full = np.zeros(6)
    full[: len(sv)] = sv
    # second-smallest singular value of the 6-column design tells whether the null space is unique
    if full[null_dim_index] <= RANK_TOL * full[0]:
        raise RankDeficient("points do not determine a unique conic")
    local = canonical(vt[-1])
    world = _to_world(local, centroid, k)
    return Conic(tuple(float(v) for v in world), classify_coefficients(local), centroid, k,
                 tuple(float(v) for v in local))


def fit_exact_5(points: Sequence[Point]) -> Conic:
    if len(points) != 5:
        raise ValueError("fit_exact_5 takes exactly five points")
    return _fit(points, 4)


def fit_min_residual(points: Sequence[Point]) -> Conic:
    if len(points) < 6:
        raise ValueError("fit_min_residual needs at least six points")
    return _fit(points, 4)


def fit_projective_5(points: Sequence[Point], directions: Sequence[Point]) -> Conic:
    """Conic through finite points and points at infinity (given by direction), five in all.

    The frame is normalized on the finite points; a direction (dx, dy) adds the
    row [dx^2, dx dy, dy^2, 0, 0, 0], unchanged by the shift and scaling.
    """
    if len(points) + len(directions) != 5:
        raise ValueError("fit_projective_5 takes five constraints")
    if len(points) < 2:
        raise RankDeficient("need at least two finite points to fix the frame")
    arr, centroid, k = normalize_points(points, FIT_RMS)
    rows = [_design(arr)]
    for d in directions:
        u = d.unit()
        rows.append(np.array([[u.x * u.x, u.x * u.y, u.y * u.y, 0.0, 0.0, 0.0]]))
    design = np.vstack(rows)
    _, sv, vt = np.linalg.svd(design, full_matrices=True)
    if sv[4] <= RANK_TOL * sv[0]:
        raise RankDeficient("constraints do not determine a unique conic")
    local = canonical(vt[-1])
    world = _to_world(local, centroid, k)
    return Conic(tuple(float(v) for v in world), classify_coefficients(local), centroid, k,
                 tuple(float(v) for v in local))


def direction_residual(conic: Conic, d: Point) -> float:
    """How far the point at infinity in direction ``d`` is from the conic."""
    a, b, c = conic.local[:3]
    u = d.unit()
    return abs(a * u.x * u.x + b * u.x * u.y + c * u.y * u.y) / math.sqrt(a * a + b * b + c * c)


def residual(conic: Conic, p: Point) -> float:
    """Sampson distance in the conic's fitting frame."""
    a, b, c, d, e, f = conic.local
    x, y = conic.to_local(p)
    q = a * x * x + b * x * y + c * y * y + d * x + e * y + f
    gx = 2 * a * x + b * y + d
    gy = b * x + 2 * c * y + e
    g = math.hypot(gx, gy)
    if g < 1e-12:
        return abs(q)
    return abs(q) / g


def classify(conic: Conic) -> ConicKind:
    return classify_coefficients(conic.local)


def conic_center(conic: Conic) -> Point:
    a, b, c, d, e, _ = conic.local
    m = np.array([[2 * a, b], [b, 2 * c]])
    if abs(np.linalg.det(m)) <= KIND_TOL:
        raise NotCentral("conic has no unique centre")
    x, y = np.linalg.solve(m, [-d, -e])
    return conic.to_world(x, y)


def principal_axes(conic: Conic):
    """Centre, unit axis directions and signed squared semi-axes, in world units."""
    if conic.kind not in (ConicKind.ELLIPSE, ConicKind.CIRCLE, ConicKind.HYPERBOLA):
        raise NotCentral(f"{conic.kind.value} has no foci pair")
    a, b, c, d, e, f = conic.local
    m = np.array([[2 * a, b], [b, 2 * c]])
    x0, y0 = np.linalg.solve(m, [-d, -e])
    f0 = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 + d * x0 + e * y0 + f
    lam, vec = np.linalg.eigh(np.array([[a, b / 2], [b / 2, c]]))
    semi = -f0 / lam  # signed squared semi-axes in the local frame
    s2 = conic.scale ** 2
    return conic.to_world(x0, y0), [Point(*vec[:, 0]), Point(*vec[:, 1])], [semi[0] / s2, semi[1] / s2]


def central_foci(conic: Conic) -> tuple[Point, Point]:
    center, axes, semi = principal_axes(conic)
    if conic.kind is ConicKind.HYPERBOLA:
        i = 0 if semi[0] > 0 else 1
        c = math.sqrt(abs(semi[0]) + abs(semi[1]))
    else:
        i = 0 if semi[0] >= semi[1] else 1
        c = math.sqrt(abs(semi[0] - semi[1]))
    f1, f2 = center + axes[i] * c, center - axes[i] * c
    return tuple(sorted((f1, f2), key=lambda p: (p.x, p.y)))


def sample(conic: Conic, count: int = 256, span: float = 3.0) -> list[list[Point]]:
    """Polyline branches tracing the conic; ``span`` bounds hyperbola and parabola parameters."""
    if conic.kind in (ConicKind.ELLIPSE, ConicKind.CIRCLE):
        center, axes, semi = principal_axes(conic)
        ra, rb = math.sqrt(abs(semi[0])), math.sqrt(abs(semi[1]))
        ts = np.linspace(0.0, 2 * math.pi, count)
        return [[center + axes[0] * (ra * math.cos(t)) + axes[1] * (rb * math.sin(t)) for t in ts]]
    if conic.kind is ConicKind.HYPERBOLA:
        center, axes, semi = principal_axes(conic)
        i = 0 if semi[0] > 0 else 1
        ra, rb = math.sqrt(abs(semi[i])), math.sqrt(abs(semi[1 - i]))
        ts = np.linspace(-span, span, count)
        return [[center + axes[i] * (sgn * ra * math.cosh(t)) + axes[1 - i] * (rb * math.sinh(t)) for t in ts]
                for sgn in (1.0, -1.0)]
    if conic.kind is ConicKind.PARABOLA:
        return [_sample_parabola(conic, count, span)]
    return []


def _sample_parabola(conic: Conic, count: int, span: float) -> list[Point]:
    a, b, c, d, e, f = conic.local
    lam, vec = np.linalg.eigh(np.array([[a, b / 2], [b / 2, c]]))
    i = int(np.argmax(np.abs(lam)))
    u, v = vec[:, i], vec[:, 1 - i]
    # in (s, t) = (u.X, v.X): lam s^2 + du s + dv t + f = 0
    du, dv = d * u[0] + e * u[1], d * v[0] + e * v[1]
    pts = []
    for s in np.linspace(-span, span, count):
        t = -(lam[i] * s * s + du * s + f) / dv
        pts.append(conic.to_world(*(u * s + v * t)))
    return pts
