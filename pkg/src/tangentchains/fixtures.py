"""Built-in scenes: the worked configurations used by the examples and tests."""

from __future__ import annotations

import copy

from .errors import UnknownFixture
from .report import SceneConfig

PAPPUS_OUTER = [0.0, 0.0, 1.0]
PAPPUS_INNER = [0.5, 0.0, 0.5]


def _pappus_all(target: str) -> list[dict]:
    return [
        {"check_name": "pappus_concurrency", "target": target},
        {"check_name": "ortho_circle", "target": target},
        {"check_name": "varpi_angle", "target": target, "params": {"i": 0, "j": 1}},
        {"check_name": "omega_tangency", "target": target, "params": {"i": 0, "j": 0}},
        {"check_name": "center_conic", "target": target,
         "params": {"family": "omega", "k": 1, "expected_kind": "ellipse", "foci_line": "axis"}},
    ]


def _pair_concyclic(target: str, families, expect_fail=False) -> list[dict]:
    return [{"check_name": "pair_concyclic", "target": target, "params": {"family": f},
             "expect_fail": expect_fail} for f in families]


_FIXTURES = {
    "pappus-basic": {
        "objects": {"chain": {"type": "pappus", "outer": PAPPUS_OUTER, "inner": PAPPUS_INNER, "count": 12}},
        "checks": _pappus_all("chain"),
    },
    "ortho-pair": {
        "objects": {
            "base": {"type": "pappus", "outer": PAPPUS_OUTER, "inner": PAPPUS_INNER, "count": 20},
            "pair": {"type": "ortho_pair", "base": "base", "shared_index": 0, "direction": "left"},
        },
        "checks": [{"check_name": "orthogonal_parents", "target": "pair"}]
        + _pair_concyclic("pair", ["c_i", "c_ll", "c_mm", "c_nn"]) + [
            {"check_name": "center_conic", "target": "pair",
             "params": {"family": "c_nn", "k": 2, "index_rule": "pappus_pair", "expected_kind": "hyperbola"}},
        ],
    },
    "steiner-6": {
        "objects": {"chain": {"type": "steiner", "n": 6, "outer_radius": 3.0,
                              "post_inversion": {"center": [7.0, 0.0], "power": 1.0}}},
        "checks": [
            {"check_name": "center_conic", "target": "chain",
             "params": {"family": "varpi", "k": 1, "expected_kind": "ellipse", "foci_line": "axis"}},
            {"check_name": "center_conic", "target": "chain",
             "params": {"family": "omega", "k": 1, "expected_kind": "ellipse", "foci_line": "axis"}},
        ],
    },
    "mirrored-60": {
        "objects": {"pair": {"type": "mirrored_pair", "n": 6, "outer_radius": 3.0, "mirror_angle_deg": 60.0,
                             "post_inversion": {"center": [7.0, 0.0], "power": 1.0}}},
        "checks": _pair_concyclic("pair", ["c_nn", "c_ll", "c_mm", "c_i"]) + [
            {"check_name": "center_conic", "target": "pair",
             "params": {"family": "c_nn", "k": 2, "index_rule": "steiner_cyclic"}},
        ],
    },
    "counterexample": {
        "objects": {"pair": {"type": "transplanted_pair", "n": 6, "outer_radius": 3.0, "omega": [5.0, 1.0]}},
        "checks": _pair_concyclic("pair", ["c_mm", "c_ll"], expect_fail=True) + [
            {"check_name": "center_conic", "target": "pair", "expect_fail": True,
             "params": {"family": "c_nn", "k": 2, "index_rule": "steiner_cyclic"}},
        ],
    },
    "locus-default": {
        "objects": {"locus": {"type": "locus", "chord": 1.0, "line_offset": 2.0, "omega_center": [0.0, 3.0],
                              "omega_radius": 1.0, "branch": "plus"}},
        "checks": [{"check_name": "locus_lemma45", "target": "locus",
                    "params": {"holdout": 100, "y_range": [-3.0, 3.0]}}],
    },
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture_dict(name: str) -> dict:
    if name not in _FIXTURES:
        raise UnknownFixture(name)
    return {"version": 1, **copy.deepcopy(_FIXTURES[name])}


def emit_fixture(name: str) -> SceneConfig:
    return SceneConfig.from_dict(fixture_dict(name))
