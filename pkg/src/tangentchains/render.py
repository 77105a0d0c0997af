"""Deterministic SVG 1.1 drawings of built scenes.

World y points up; the document flips it.  Every coordinate is written with
six fractional digits and elements are emitted in a fixed order, so equal
scenes give byte-identical files.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .chains import Chain, ChainPair
from .conic import Conic, sample
from .geom import Circle, Line, LineSeg2, Point, as_line
from .incidence import IncidenceReport, LocusProblem
from .report import RenderSpec

CONIC_SAMPLES = 256
DOT_PX = 2.0

STYLE = {
    "parent": "#1f3a93",
    "member": "#222222",
    "line": "#999999",
    "point": "#c0392b",
    "secondary": "#27ae60",
    "conic": "#8e44ad",
}


class UnwritablePath(OSError):
    pass


def _f(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _bbox_of(obj) -> list[tuple[float, float, float, float]]:
    out = []

    def add_circle(c):
        if isinstance(c, Circle):
            out.append((c.center.x - c.radius, c.center.y - c.radius, c.center.x + c.radius, c.center.y + c.radius))

    if isinstance(obj, Chain):
        add_circle(obj.outer)
        add_circle(obj.inner)
        for k in obj.circles:
            add_circle(k)
    elif isinstance(obj, ChainPair):
        for ch in (obj.first, obj.second):
            out += _bbox_of(ch)
    elif isinstance(obj, tuple):
        for c in obj:
            add_circle(c)
    elif isinstance(obj, LocusProblem):
        add_circle(Circle(Point(0.0, 0.0), 1.0))
        add_circle(Circle(obj.omega_center, obj.omega_radius))
    return out


def auto_viewbox(built: dict, margin: float = 0.05) -> list[float]:
    boxes = [b for obj in built.values() for b in _bbox_of(obj)]
    if not boxes:
        return [-1.0, -1.0, 2.0, 2.0]
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[2] for b in boxes)
    y1 = max(b[3] for b in boxes)
    w, h = x1 - x0, y1 - y0
    side = max(w, h) * (1 + 2 * margin)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    return [cx - side / 2, cy - side / 2, side, side]


def clip_line(line: Line, box: list[float]) -> Optional[tuple[Point, Point]]:
    """The part of an infinite line inside the world rectangle ``[x, y, w, h]``."""
    x0, y0, w, h = box
    x1, y1 = x0 + w, y0 + h
    p = line.foot(Point((x0 + x1) / 2, (y0 + y1) / 2))
    d = line.direction
    lo, hi = -math.inf, math.inf
    for pc, dc, a, b in ((p.x, d.x, x0, x1), (p.y, d.y, y0, y1)):
        if abs(dc) < 1e-15:
            if not a <= pc <= b:
                return None
            continue
        t0, t1 = (a - pc) / dc, (b - pc) / dc
        lo, hi = max(lo, min(t0, t1)), min(hi, max(t0, t1))
    if lo >= hi:
        return None
    return p + d * lo, p + d * hi


class _Doc:
    def __init__(self, box: list[float], spec: RenderSpec):
        self.box = box
        self.spec = spec
        self.px = box[2] / spec.width_px  # world units per pixel
        self.parts: list[str] = []

    def sw(self, factor: float = 1.0) -> str:
        return _f(self.spec.stroke_width * factor * self.px)

    def circle(self, c: Circle, color: str, factor: float = 1.0):
        self.parts.append(
            f'<circle cx="{_f(c.center.x)}" cy="{_f(-c.center.y)}" r="{_f(c.radius)}" '
            f'fill="none" stroke="{color}" stroke-width="{self.sw(factor)}"/>'
        )

    def gline(self, ln: Line, color: str, factor: float = 1.0):
        seg = clip_line(ln, self.box)
        if seg is None:
            return
        a, b = seg
        self.parts.append(
            f'<line x1="{_f(a.x)}" y1="{_f(-a.y)}" x2="{_f(b.x)}" y2="{_f(-b.y)}" '
            f'stroke="{color}" stroke-width="{self.sw(factor)}"/>'
        )

    def gcircle(self, g, color: str, factor: float = 1.0):
        if isinstance(g, Circle):
            self.circle(g, color, factor)
        elif isinstance(g, (Line, LineSeg2)):
            self.gline(as_line(g), color, factor)

    def dot(self, p: Point, color: str):
        self.parts.append(f'<circle cx="{_f(p.x)}" cy="{_f(-p.y)}" r="{_f(DOT_PX * self.px)}" fill="{color}"/>')

    def polyline(self, pts: Iterable[Point], color: str):
        coords = " ".join(f"{_f(p.x)},{_f(-p.y)}" for p in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{self.sw()}"/>')

    def group(self, name: str):
        self.parts.append(f'<g id="{name}">')

    def end(self):
        if self.parts and self.parts[-1].startswith("<g "):
            self.parts.pop()  # drop empty groups
        else:
            self.parts.append("</g>")


def _chains(obj) -> list[Chain]:
    if isinstance(obj, Chain):
        return [obj]
    if isinstance(obj, ChainPair):
        return [obj.first, obj.second]
    return []


def render_svg(built: dict, reports: list[IncidenceReport], spec: Optional[RenderSpec] = None) -> str:
    """SVG text for the built objects plus the circles, points and conics found by the checks."""
    spec = spec or RenderSpec()
    box = list(spec.viewbox) if spec.viewbox else auto_viewbox(built)
    doc = _Doc(box, spec)
    layers = spec.layers
    names = sorted(built)

    if layers.get("chains", True):
        doc.group("chains")
        for name in names:
            obj = built[name]
            for ch in _chains(obj):
                doc.gcircle(ch.outer, STYLE["parent"], 1.5)
                doc.gcircle(ch.inner, STYLE["parent"], 1.5)
                for k in ch.circles:
                    doc.gcircle(k, STYLE["member"])
            if isinstance(obj, tuple):
                for c in obj:
                    doc.gcircle(c, STYLE["parent"], 1.5)
            if isinstance(obj, LocusProblem):
                doc.circle(Circle(Point(0.0, 0.0), 1.0), STYLE["parent"], 1.5)
                doc.gline(Line(Point(1.0, 0.0), obj.line_offset), STYLE["line"])
                doc.circle(Circle(obj.omega_center, obj.omega_radius), STYLE["secondary"])
        doc.end()
    if layers.get("lines", True):
        doc.group("lines")
        for name in names:
            for ch in _chains(built[name]):
                for seg in (*ch.p_lines, *ch.t_lines):
                    doc.gline(seg.as_line(), STYLE["line"], 0.5)
        doc.end()
    if layers.get("secondary", True):
        doc.group("secondary")
        for r in reports:
            for key in ("circle", "orthogonal"):
                g = r.artifacts.get(key)
                if g is not None:
                    doc.gcircle(g, STYLE["secondary"])
        doc.end()
    if layers.get("conics", True):
        doc.group("conics")
        for r in reports:
            conic = r.artifacts.get("conic")
            if isinstance(conic, Conic):
                for branch in sample(conic, CONIC_SAMPLES):
                    doc.polyline(branch, STYLE["conic"])
            line = r.artifacts.get("line")
            if isinstance(line, Line):
                doc.gline(line, STYLE["conic"])
        doc.end()
    if layers.get("points", True):
        doc.group("points")
        for name in names:
            for ch in _chains(built[name]):
                for p in (*ch.L, *ch.M, *ch.N):
                    doc.dot(p, STYLE["point"])
        for r in reports:
            for key in ("B",):
                p = r.artifacts.get(key)
                if isinstance(p, Point):
                    doc.dot(p, STYLE["point"])
            for p in r.artifacts.get("centers", []) or []:
                doc.dot(p, STYLE["conic"])
        doc.end()

    x, y, w, h = box
    vb = f"{_f(x)} {_f(-(y + h))} {_f(w)} {_f(h)}"
    height = int(round(spec.width_px * h / w))
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width_px}" height="{height}" '
        f'viewBox="{vb}">\n'
        f'<rect x="{_f(x)}" y="{_f(-(y + h))}" width="{_f(w)}" height="{_f(h)}" fill="white" '
        f'stroke="#cccccc" stroke-width="{doc.sw()}"/>\n'
    )
    return head + "\n".join(doc.parts) + ("\n" if doc.parts else "") + "</svg>\n"


def write_svg(text: str, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise UnwritablePath(f"cannot write {path}: {e}") from None
