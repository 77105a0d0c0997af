"""Command-line front end.

    tangentchains verify pappus --outer 0,0,1 --inner 0.5,0,0.5 -n 12 --all
    tangentchains verify counterexample --n 6 --omega 5,1
    tangentchains verify --config scene.json --json-out report.json
    tangentchains render --fixture ortho-pair --svg-out pair.svg
    tangentchains fixture mirrored-60
    tangentchains locus --chord 1 --offset 2 --omega 0,3

Exit status: 0 when every check behaves as expected, 1 when one does not,
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .errors import ConfigError, UnknownFixture
from .fixtures import FIXTURE_NAMES, _pair_concyclic, _pappus_all, emit_fixture, fixture_dict
from .render import UnwritablePath, render_svg, write_svg
from .report import SceneConfig, run_scene

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
TARGETS = ("pappus", "steiner", "ortho-pair", "mirrored", "counterexample", "annulus")


def _floats(text: str, count: int, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(flag, f"expected {count} comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise ConfigError(flag, f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _need(args, name: str, flag: str):
    v = getattr(args, name, None)
    if v is None:
        raise ConfigError(flag, "missing")
    return v


def _post(args) -> Optional[dict]:
    if args.post is None:
        return None
    vals = [float(v) for v in args.post.split(",")]
    if len(vals) not in (2, 3):
        raise ConfigError("--post", "expected x,y or x,y,power")
    return {"center": vals[:2], "power": vals[2] if len(vals) == 3 else 1.0}


def scene_from_flags(args) -> SceneConfig:
    """Translate ``verify <target>`` flags into the same scene a config file would give."""
    t = args.target
    objects: dict = {}
    checks: list = []
    if t in ("pappus", "ortho-pair"):
        outer = _floats(_need(args, "outer", "--outer"), 3, "--outer")
        inner = _floats(_need(args, "inner", "--inner"), 3, "--inner")
        count = args.n if args.n is not None else (12 if t == "pappus" else 20)
        objects["chain"] = {"type": "pappus", "outer": outer, "inner": inner, "count": count, "side": args.side}
        if t == "pappus":
            checks = _pappus_all("chain") if args.all else _pappus_all("chain")[:2]
        else:
            objects["pair"] = {"type": "ortho_pair", "base": "chain", "shared_index": args.shared,
                               "direction": args.direction}
            checks = _pair_concyclic("pair", ["c_i", "c_ll", "c_mm", "c_nn"])
            if args.all:
                checks.append({"check_name": "center_conic", "target": "pair",
                               "params": {"family": "c_nn", "k": 2, "index_rule": "pappus_pair"}})
    elif t == "steiner":
        n = _need(args, "n", "--n")
        objects["chain"] = {"type": "steiner", "n": n, "outer_radius": args.radius,
                            "start_angle_deg": args.start, "post_inversion": _post(args)}
        checks = [{"check_name": "center_conic", "target": "chain",
                   "params": {"family": f, "k": 1, "expected_kind": "ellipse", "foci_line": "axis"}}
                  for f in ("varpi", "omega")]
    elif t == "mirrored":
        n = _need(args, "n", "--n")
        objects["pair"] = {"type": "mirrored_pair", "n": n, "outer_radius": args.radius,
                           "mirror_angle_deg": args.mirror, "post_inversion": _post(args)}
        checks = _pair_concyclic("pair", ["c_nn", "c_ll", "c_mm", "c_i"])
        checks.append({"check_name": "center_conic", "target": "pair",
                       "params": {"family": "c_nn", "k": 2, "index_rule": "steiner_cyclic"}})
    elif t == "counterexample":
        n = args.n if args.n is not None else 6
        omega = _floats(_need(args, "omega", "--omega"), 2, "--omega")
        spec = {"type": "transplanted_pair", "n": n, "outer_radius": args.radius, "omega": omega}
        if args.twist is not None:
            spec["twist_deg"] = args.twist
        objects["pair"] = spec
        checks = _pair_concyclic("pair", ["c_mm", "c_ll"], expect_fail=True)
        checks.append({"check_name": "center_conic", "target": "pair", "expect_fail": True,
                       "params": {"family": "c_nn", "k": 2, "index_rule": "steiner_cyclic"}})
    elif t == "annulus":
        objects["pair"] = {"type": "nested_pair",
                           "l": _floats(_need(args, "l", "--l"), 3, "--l"),
                           "k": _floats(_need(args, "k", "--k"), 3, "--k")}
        checks = [{"check_name": "no_orthogonal_annulus", "target": "pair",
                   "params": {"trials": args.trials, "seed": args.seed}}]
    return SceneConfig.from_dict({"version": 1, "objects": objects, "checks": checks})


def _load(args) -> SceneConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                return SceneConfig.from_json(fh.read())
        except OSError as e:
            raise ConfigError("--config", str(e)) from None
    if getattr(args, "fixture", None):
        try:
            return emit_fixture(args.fixture)
        except UnknownFixture:
            raise ConfigError("--fixture", f"unknown fixture {args.fixture!r}; choose from {list(FIXTURE_NAMES)}")
    if getattr(args, "target", None):
        return scene_from_flags(args)
    raise ConfigError("target", "give a target, --config or --fixture")


def _emit(args, scene: SceneConfig, out) -> int:
    report, built = run_scene(scene, args.tol)
    text = report.to_json()
    if args.json_out:
        try:
            with open(args.json_out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise ConfigError("--json-out", str(e)) from None
    else:
        out.write(text)
    if args.svg_out:
        write_svg(render_svg(built, report.checks, scene.render), args.svg_out)
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def cmd_verify(args, out) -> int:
    return _emit(args, _load(args), out)


def cmd_render(args, out) -> int:
    scene = _load(args)
    report, built = run_scene(scene, args.tol)
    svg = render_svg(built, report.checks, scene.render)
    if args.svg_out:
        write_svg(svg, args.svg_out)
    else:
        out.write(svg)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def cmd_fixture(args, out) -> int:
    try:
        scene = SceneConfig.from_dict(fixture_dict(args.name))
    except UnknownFixture:
        raise ConfigError("name", f"unknown fixture {args.name!r}; choose from {list(FIXTURE_NAMES)}")
    out.write(scene.to_json())
    return EXIT_OK


def cmd_locus(args, out) -> int:
    omega = _floats(args.omega, 2, "--omega")
    y0, y1 = _floats(args.y_range, 2, "--y-range")
    scene = SceneConfig.from_dict({
        "version": 1,
        "objects": {"locus": {"type": "locus", "chord": args.chord, "line_offset": args.offset,
                              "omega_center": omega, "omega_radius": args.rho, "branch": args.branch}},
        "checks": [{"check_name": "locus_lemma45", "target": "locus",
                    "params": {"holdout": args.holdout, "y_range": [y0, y1]}}],
    })
    return _emit(args, scene, out)


def _globals(p: argparse.ArgumentParser, top: bool) -> None:
    # accepted before or after the subcommand; the subparser copy must not clobber the top one
    d = None if top else argparse.SUPPRESS
    p.add_argument("--tol", type=float, default=d, help="override the default tolerance of every check")
    p.add_argument("--json-out", default=d, help="write the JSON report here instead of stdout")
    p.add_argument("--svg-out", default=d, help="also render the scene to this SVG file")
    p.add_argument("--seed", type=int, default=0 if top else argparse.SUPPRESS,
                   help="seed for randomized checks")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tangentchains", description="Build tangent circle chains and verify "
                                "their incidence properties numerically.")
    _globals(p, True)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks on a built-in target or a scene file")
    _globals(v, False)
    v.add_argument("target", nargs="?", choices=TARGETS)
    v.add_argument("--config", help="scene JSON file")
    v.add_argument("--fixture", help="built-in scene name")
    v.add_argument("--outer", help="cx,cy,r of the outer parent")
    v.add_argument("--inner", help="cx,cy,r of the inner parent")
    v.add_argument("-n", "--n", type=int, help="chain length")
    v.add_argument("--side", choices=("up", "down"), default="up")
    v.add_argument("--shared", type=int, default=0, help="shared member index of an orthogonal pair")
    v.add_argument("--direction", choices=("left", "right"), default="left")
    v.add_argument("--radius", type=float, default=3.0, help="outer radius of concentric Steiner chains")
    v.add_argument("--start", type=float, default=0.0, help="start angle in degrees")
    v.add_argument("--mirror", type=float, default=60.0, help="mirror angle in degrees")
    v.add_argument("--post", help="post-inversion x,y[,power]")
    v.add_argument("--omega", help="centre x,y of the inversion circle of the counterexample")
    v.add_argument("--twist", type=float, help="counterexample twist in degrees")
    v.add_argument("--l", help="cx,cy,r of the inner circle of a nested pair")
    v.add_argument("--k", help="cx,cy,r of the outer circle of a nested pair")
    v.add_argument("--trials", type=int, default=8)
    v.add_argument("--all", action="store_true", help="run every check for the target")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="write an SVG of a scene")
    _globals(r, False)
    r.add_argument("--config", help="scene JSON file")
    r.add_argument("--fixture", help="built-in scene name")
    r.set_defaults(func=cmd_render)

    f = sub.add_parser("fixture", help="print a built-in scene")
    f.add_argument("name")
    f.set_defaults(func=cmd_fixture)

    lo = sub.add_parser("locus", help="centre locus of inverted circles cutting a fixed chord")
    _globals(lo, False)
    lo.add_argument("--chord", type=float, default=1.0)
    lo.add_argument("--offset", type=float, default=2.0)
    lo.add_argument("--omega", default="0,3")
    lo.add_argument("--rho", type=float, default=1.0)
    lo.add_argument("--branch", choices=("plus", "minus"), default="plus")
    lo.add_argument("--holdout", type=int, default=100)
    lo.add_argument("--y-range", default="-3,3")
    lo.set_defaults(func=cmd_locus)
    return p


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UnwritablePath as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
