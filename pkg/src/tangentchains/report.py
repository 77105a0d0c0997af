"""Scene configuration, check execution and the JSON report (schema v1).

A scene names the objects to build (chains, pairs, nested pairs, locus
problems) and lists checks against them.  Angles in a scene are degrees.
Numbers in emitted JSON carry 17 significant digits so every double
round-trips exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from . import __version__
from .chains import (
    Chain,
    ChainPair,
    Direction,
    Family,
    FamilySelector,
    IndexRule,
    Side,
    build_mirrored_steiner_pair,
    build_orthogonal_pappus_pair,
    build_pappus,
    build_steiner_concentric,
    build_transplanted_pair,
    open_chain,
    orthogonal_circle_at,
    transplant,
)
from .conic import Conic, ConicKind
from .errors import ConfigError, GeometryError
from .geom import Circle, Line, LineSeg2, Point
from .incidence import (
    CONIC_TOL,
    FAIL_FLOOR,
    POINT_TOL,
    Branch,
    IncidenceReport,
    LocusProblem,
    check_center_conic,
    check_no_orthogonal_annulus,
    check_omega_tangency,
    check_ortho_circle,
    check_orthogonal_parents,
    check_pair_concyclic,
    check_pappus_concurrency,
    check_varpi_angle,
    common_chord_bisector,
    locus_lemma45,
)
from .inversion import Inversion

SCHEMA_VERSION = 1

# ---------------------------------------------------------------- JSON writing


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return format(x, ".1f")
    return format(x, ".17g")


def dumps(obj: Any, indent: Optional[int] = 2, sort_keys: bool = False) -> str:
    """JSON text with floats at 17 significant digits; key order is preserved unless sorted.

    Arrays of scalars stay on one line.  Non-finite floats become null.
    """
    colon = ":" if indent is None else ": "

    def brk(level):
        return "" if indent is None else "\n" + " " * (indent * level)

    def enc(o, level):
        if o is None or isinstance(o, bool):
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _num(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = sorted(o.items()) if sort_keys else o.items()
            body = ",".join(f"{brk(level + 1)}{json.dumps(str(k))}{colon}{enc(v, level + 1)}" for k, v in items)
            return "{" + body + brk(level) + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(v is None or isinstance(v, (int, float, str, bool)) for v in o):
                return "[" + ("," if indent is None else ", ").join(enc(v, level) for v in o) + "]"
            return "[" + ",".join(f"{brk(level + 1)}{enc(v, level + 1)}" for v in o) + brk(level) + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0)


def to_jsonable(o: Any) -> Any:
    """Geometry objects and reports as plain JSON values."""
    if isinstance(o, Point):
        return [o.x, o.y]
    if isinstance(o, Circle):
        return {"type": "circle", "center": [o.center.x, o.center.y], "radius": o.radius}
    if isinstance(o, Line):
        return {"type": "line", "normal": [o.normal.x, o.normal.y], "offset": o.offset}
    if isinstance(o, LineSeg2):
        return {"type": "segment", "p": to_jsonable(o.p), "q": to_jsonable(o.q)}
    if isinstance(o, Conic):
        return {"type": "conic", "coefficients": list(o.coefficients), "kind": o.kind.value}
    if isinstance(o, ConicKind):
        return o.value
    if isinstance(o, IncidenceReport):
        return report_to_dict(o)
    if isinstance(o, dict):
        return {str(k): to_jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [to_jsonable(v) for v in o]
    if isinstance(o, (bool, int, str)) or o is None:
        return o
    if isinstance(o, float):
        return o
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def report_to_dict(r: IncidenceReport, target: Optional[str] = None) -> dict:
    out = {"check_name": r.check_name}
    if target is not None:
        out["target"] = target
    out.update(
        tolerance=r.tolerance,
        max_residual=r.max_residual,
        **{"pass": r.passed},
        expect_fail=r.expect_fail,
        as_expected=r.as_expected,
        residuals=[[k, v] for k, v in r.residuals],
        artifacts=to_jsonable(r.artifacts),
    )
    return out


# ---------------------------------------------------------------- scene config


OBJECT_TYPES = ("pappus", "steiner", "ortho_pair", "mirrored_pair", "transplanted_pair", "nested_pair", "locus")
CHECK_NAMES = (
    "orthogonal_parents",
    "pappus_concurrency",
    "ortho_circle",
    "varpi_angle",
    "omega_tangency",
    "center_conic",
    "pair_concyclic",
    "no_orthogonal_annulus",
    "locus_lemma45",
)


@dataclass
class CheckSpec:
    check_name: str
    target: str
    params: dict = field(default_factory=dict)
    tolerance: Optional[float] = None
    expect_fail: bool = False

    def to_dict(self) -> dict:
        return {"check_name": self.check_name, "target": self.target, "params": self.params,
                "tolerance": self.tolerance, "expect_fail": self.expect_fail}


@dataclass
class RenderSpec:
    width_px: int = 800
    viewbox: Optional[list] = None
    stroke_width: float = 1.0
    layers: dict = field(default_factory=lambda: {"chains": True, "points": True, "secondary": True,
                                                  "conics": True, "lines": True})

    def to_dict(self) -> dict:
        return {"width_px": self.width_px, "viewbox": self.viewbox, "stroke_width": self.stroke_width,
                "layers": dict(self.layers)}


@dataclass
class SceneConfig:
    version: int = SCHEMA_VERSION
    objects: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    render: RenderSpec = field(default_factory=RenderSpec)

    def to_dict(self) -> dict:
        return {"version": self.version, "objects": self.objects,
                "checks": [c.to_dict() for c in self.checks], "render": self.render.to_dict()}

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    def input_hash(self) -> str:
        return hashlib.sha256(dumps(self.to_dict(), indent=None, sort_keys=True).encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> SceneConfig:
        if not isinstance(d, dict):
            raise ConfigError("<root>", "expected an object")
        version = d.get("version")
        if version != SCHEMA_VERSION:
            raise ConfigError("version", f"expected {SCHEMA_VERSION}, got {version!r}")
        objects = d.get("objects", {})
        if not isinstance(objects, dict):
            raise ConfigError("objects", "expected an object keyed by name")
        checks = []
        for n, c in enumerate(d.get("checks", [])):
            where = f"checks[{n}]"
            if not isinstance(c, dict):
                raise ConfigError(where, "expected an object")
            unknown = set(c) - {"check_name", "target", "params", "tolerance", "expect_fail"}
            if unknown:
                raise ConfigError(where, f"unknown fields {sorted(unknown)}")
            for key in ("check_name", "target"):
                if key not in c:
                    raise ConfigError(f"{where}.{key}", "missing")
            checks.append(CheckSpec(c["check_name"], c["target"], dict(c.get("params") or {}),
                                    c.get("tolerance"), bool(c.get("expect_fail", False))))
        r = d.get("render") or {}
        base = RenderSpec()
        render = RenderSpec(int(r.get("width_px", base.width_px)), r.get("viewbox"),
                            float(r.get("stroke_width", base.stroke_width)),
                            {**base.layers, **(r.get("layers") or {})})
        scene = cls(version, {str(k): dict(v) for k, v in objects.items()}, checks, render)
        validate(scene)
        return scene

    @classmethod
    def from_json(cls, text: str) -> SceneConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"line {e.lineno}", e.msg) from None
        return cls.from_dict(data)


# ---------------------------------------------------------------- validation and building


def _triple(value, where: str) -> Circle:
    try:
        x, y, r = (float(v) for v in value)
        return Circle(Point(x, y), r)
    except (TypeError, ValueError, GeometryError) as e:
        raise ConfigError(where, f"expected [cx, cy, r] with r > 0 ({e})") from None


def _pair(value, where: str) -> Point:
    try:
        x, y = (float(v) for v in value)
        return Point(x, y)
    except (TypeError, ValueError, GeometryError) as e:
        raise ConfigError(where, f"expected [x, y] ({e})") from None


def _need(spec: dict, key: str, where: str):
    if key not in spec or spec[key] is None:
        raise ConfigError(f"{where}.{key}", "missing")
    return spec[key]


def _int(spec: dict, key: str, where: str, default=None, minimum=None) -> int:
    v = spec.get(key, default)
    if v is None:
        raise ConfigError(f"{where}.{key}", "missing")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key}", f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key}", f"must be >= {minimum}")
    return v


def _float(spec: dict, key: str, where: str, default=None) -> float:
    v = spec.get(key, default)
    if v is None:
        raise ConfigError(f"{where}.{key}", "missing")
    try:
        out = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {v!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{where}.{key}", "must be finite")
    return out


def _inversion(spec, where: str) -> Optional[Inversion]:
    if spec is None:
        return None
    if not isinstance(spec, dict):
        raise ConfigError(where, "expected {center: [x, y], power: p}")
    try:
        return Inversion(_pair(_need(spec, "center", where), f"{where}.center"), float(spec.get("power", 1.0)))
    except GeometryError as e:
        raise ConfigError(where, str(e)) from None


def build_object(name: str, spec: dict, built: dict):
    """Construct one named object; construction errors surface as ConfigError on that object."""
    where = f"objects.{name}"
    kind = spec.get("type")
    if kind not in OBJECT_TYPES:
        raise ConfigError(f"{where}.type", f"expected one of {list(OBJECT_TYPES)}, got {kind!r}")
    try:
        if kind == "pappus":
            return build_pappus(_triple(_need(spec, "outer", where), f"{where}.outer"),
                                _triple(_need(spec, "inner", where), f"{where}.inner"),
                                _int(spec, "count", where, 12, 2), Side(spec.get("side", "up")))
        if kind == "steiner":
            chain = build_steiner_concentric(_int(spec, "n", where, None, 3),
                                             _float(spec, "outer_radius", where, 1.0),
                                             math.radians(_float(spec, "start_angle_deg", where, 0.0)))
            inv = _inversion(spec.get("post_inversion"), f"{where}.post_inversion")
            if inv is not None:
                chain = transplant(chain, inv)
            return open_chain(chain) if spec.get("open", False) else chain
        if kind == "ortho_pair":
            base = built.get(_need(spec, "base", where))
            if not isinstance(base, Chain):
                raise ConfigError(f"{where}.base", "must name a Pappus chain defined earlier")
            return build_orthogonal_pappus_pair(base, _int(spec, "shared_index", where, 0, 0),
                                                Direction(spec.get("direction", "left")),
                                                spec.get("count"))
        if kind == "mirrored_pair":
            return build_mirrored_steiner_pair(
                _int(spec, "n", where, None, 3), _float(spec, "outer_radius", where, 1.0),
                math.radians(_float(spec, "shared_angle_deg", where, 0.0)),
                math.radians(_float(spec, "mirror_angle_deg", where, 60.0)),
                _inversion(spec.get("post_inversion"), f"{where}.post_inversion"))
        if kind == "transplanted_pair":
            n = _int(spec, "n", where, None, 3)
            R = _float(spec, "outer_radius", where, 3.0)
            shared_angle = math.radians(_float(spec, "shared_angle_deg", where, 0.0))
            omega = _need(spec, "omega", where)
            if len(omega) == 2:
                shared = build_steiner_concentric(n, R, shared_angle).circles[0]
                omega_c = orthogonal_circle_at(_pair(omega, f"{where}.omega"), shared)
            else:
                omega_c = _triple(omega, f"{where}.omega")
            kw = {}
            if spec.get("twist_deg") is not None:
                kw["twist"] = math.radians(_float(spec, "twist_deg", where))
            return build_transplanted_pair(n, R, shared_angle, omega_c, **kw)
        if kind == "nested_pair":
            return (_triple(_need(spec, "l", where), f"{where}.l"), _triple(_need(spec, "k", where), f"{where}.k"))
        if kind == "locus":
            return LocusProblem(_float(spec, "chord", where), _float(spec, "line_offset", where),
                                _pair(_need(spec, "omega_center", where), f"{where}.omega_center"),
                                _float(spec, "omega_radius", where, 1.0), Branch(spec.get("branch", "plus")))
    except ConfigError:
        raise
    except (GeometryError, ValueError) as e:
        raise ConfigError(where, f"{type(e).__name__}: {e}") from None
    raise AssertionError(kind)


def validate(scene: SceneConfig) -> None:
    """Static checks that do not need any geometry to be built."""
    names = list(scene.objects)
    for name, spec in scene.objects.items():
        if not isinstance(spec, dict):
            raise ConfigError(f"objects.{name}", "expected an object")
        if spec.get("type") not in OBJECT_TYPES:
            raise ConfigError(f"objects.{name}.type", f"expected one of {list(OBJECT_TYPES)}")
        if spec.get("type") == "ortho_pair":
            base = spec.get("base")
            if base not in names or names.index(base) >= names.index(name):
                raise ConfigError(f"objects.{name}.base", f"{base!r} is not defined before {name!r}")
    for n, c in enumerate(scene.checks):
        if c.check_name not in CHECK_NAMES:
            raise ConfigError(f"checks[{n}].check_name", f"unknown check {c.check_name!r}")
        if c.target not in scene.objects:
            raise ConfigError(f"checks[{n}].target", f"undefined object {c.target!r}")
        if c.tolerance is not None and not (isinstance(c.tolerance, (int, float)) and c.tolerance > 0):
            raise ConfigError(f"checks[{n}].tolerance", "must be a positive number")


def build_scene(scene: SceneConfig) -> dict:
    built: dict = {}
    for name, spec in scene.objects.items():
        built[name] = build_object(name, spec, built)
    return built


def _selector(p: dict, where: str) -> FamilySelector:
    try:
        return FamilySelector(Family(p.get("family", "omega")), int(p.get("k", 1)),
                              IndexRule(p.get("index_rule", "fixed_difference")))
    except ValueError as e:
        raise ConfigError(where, str(e)) from None


def _foci_line(obj, spec) -> Optional[Line]:
    if spec in (None, "none"):
        return None
    if isinstance(obj, Chain):
        if spec == "axis":
            return Line.through(obj.outer.center, obj.inner.center)
    elif isinstance(obj, ChainPair):
        first, second = obj.first, obj.second
        if spec == "l_chord":
            return common_chord_bisector(first.outer, second.outer)
        if spec == "m_chord":
            return common_chord_bisector(first.inner, second.inner)
    raise ConfigError("params.foci_line", f"{spec!r} does not apply to this target")


def run_check(spec: CheckSpec, obj, default_tol: Optional[float] = None, where: str = "check") -> IncidenceReport:
    p = spec.params
    name = spec.check_name
    if spec.tolerance is not None:
        tol = float(spec.tolerance)
    elif spec.expect_fail:
        tol = FAIL_FLOOR
    elif default_tol is not None:
        tol = default_tol
    else:
        tol = CONIC_TOL if name in ("center_conic", "locus_lemma45") else POINT_TOL
    try:
        if name == "pappus_concurrency":
            r = check_pappus_concurrency(obj, tol)
        elif name == "ortho_circle":
            r = check_ortho_circle(obj, tol)
        elif name == "varpi_angle":
            r = check_varpi_angle(obj, int(p.get("i", 0)), int(p.get("j", 1)), tol)
        elif name == "omega_tangency":
            r = check_omega_tangency(obj, int(p.get("i", 0)), int(p.get("j", 0)), tol)
        elif name == "center_conic":
            r = check_center_conic(obj, _selector(p, f"{where}.params"), p.get("expected_kind", "any"),
                                   _foci_line(obj, p.get("foci_line")), tol)
        elif name == "orthogonal_parents":
            r = check_orthogonal_parents(obj, tol)
        elif name == "pair_concyclic":
            idx = p.get("indices")
            r = check_pair_concyclic(obj, Family(p.get("family", "c_nn")),
                                     None if idx is None else [tuple(i) if isinstance(i, list) else i for i in idx],
                                     tol)
        elif name == "no_orthogonal_annulus":
            r = check_no_orthogonal_annulus(*obj, int(p.get("trials", 8)), int(p.get("seed", 0)), tol)
        elif name == "locus_lemma45":
            yr = p.get("y_range", [-3.0, 3.0])
            r = locus_lemma45(obj, 5, int(p.get("holdout", 100)), (float(yr[0]), float(yr[1])), tol)
        else:
            raise ConfigError(f"{where}.check_name", f"unknown check {name!r}")
    except ConfigError:
        raise
    except (GeometryError, TypeError, ValueError, IndexError) as e:
        raise ConfigError(where, f"{type(e).__name__}: {e}") from None
    r.expect_fail = spec.expect_fail
    return r


@dataclass
class RunReport:
    tool_version: str
    input_hash: str
    checks: list
    targets: list
    wall_time: float

    @property
    def overall_pass(self) -> bool:
        return all(r.as_expected for r in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": "tangentchains.report",
            "version": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "input_hash": self.input_hash,
            "overall_pass": self.overall_pass,
            "wall_time_s": self.wall_time,
            "checks": [report_to_dict(r, t) for r, t in zip(self.checks, self.targets)],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"


def run_scene(scene: SceneConfig, default_tol: Optional[float] = None) -> tuple[RunReport, dict]:
    """Build every object and run every check, in input order."""
    t0 = time.perf_counter()
    built = build_scene(scene)
    reports = [run_check(c, built[c.target], default_tol, f"checks[{n}]") for n, c in enumerate(scene.checks)]
    report = RunReport(__version__, scene.input_hash(), reports, [c.target for c in scene.checks],
                       time.perf_counter() - t0)
    return report, built
