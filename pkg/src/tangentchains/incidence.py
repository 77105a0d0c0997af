"""Numeric checkers for the incidence statements about chains and chain pairs.

Each checker builds the objects a statement talks about, measures how far the
claimed incidences are from holding, and returns an :class:`IncidenceReport`.
Residuals are dimensionless (divided by a natural length of the configuration)
so that the same tolerance works at any scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np

from .chains import (
    Chain,
    ChainKind,
    ChainPair,
    Family,
    FamilySelector,
    PairKind,
    distinct_points,
    family_indices,
    family_points,
    omega_points,
    secondary_circles,
    varpi_points,
)
from .conic import (
    Conic,
    ConicKind,
    central_foci,
    direction_residual,
    fit_exact_5,
    fit_min_residual,
    fit_projective_5,
    residual as conic_residual,
)
from .errors import (
    BadChord,
    BadCount,
    DuplicatePoints,
    GeometryError,
    IndexOutOfRange,
    NotNested,
    NotTangent,
    RankDeficient,
    WrongKind,
)
from .geom import (
    Circle,
    GeneralizedCircle,
    Line,
    LineSeg2,
    Point,
    TangencyKind,
    as_line,
    bounding_scale,
    circle_from_3_points,
    concurrency,
    concyclicity_residual,
    distance_to,
    intersect,
    intersection_angle,
    orthogonality_residual,
    same_gcircle,
    tangency_classify,
    tangency_point,
)
from .inversion import Inversion, concentricizing_inversion, invert_gcircle

POINT_TOL = 1e-9
CONIC_TOL = 1e-7
FAIL_FLOOR = 1e-3
FOCAL_TOL = 1e-6
POLE_TOL = 1e-6


@dataclass
class IncidenceReport:
    check_name: str
    residuals: list
    tolerance: float
    artifacts: dict = field(default_factory=dict)
    expect_fail: bool = False

    def __post_init__(self):
        self.residuals = [(str(k), abs(float(v))) for k, v in self.residuals]

    @property
    def max_residual(self) -> float:
        return max((v for _, v in self.residuals), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def as_expected(self) -> bool:
        return self.passed != self.expect_fail

    def get(self, prefix: str) -> list[float]:
        """Residual values whose label starts with ``prefix``."""
        return [v for k, v in self.residuals if k.startswith(prefix)]


def _circle_scale(g: GeneralizedCircle, fallback: float = 1.0) -> float:
    return g.radius if isinstance(g, Circle) else fallback


def _centre_line(a: GeneralizedCircle, b: GeneralizedCircle) -> Line:
    return Line.through(a.center, b.center)


# ---------------------------------------------------------------- single chains


def _pappus_lines(chain: Chain):
    if chain.kind is not ChainKind.PAPPUS:
        raise WrongKind("this check needs a Pappus chain")
    if chain.count < 2:
        raise BadCount("need at least two members")
    return list(chain.p_lines) + list(chain.t_lines)


def check_pappus_concurrency(chain: Chain, tol: float = POINT_TOL) -> IncidenceReport:
    """The chords L_i M_i and the common tangents at N_i all pass through one point B on the axis."""
    lines = _pappus_lines(chain)
    b, miss = concurrency(lines)
    axis = _centre_line(chain.outer, chain.inner)
    scale = max(chain.outer.radius, chain.inner.radius)
    return IncidenceReport(
        "pappus_concurrency",
        [("concurrency", miss), ("B_on_axis", axis.signed_distance(b) / scale)],
        tol,
        {"B": b, "lines": len(lines)},
    )


def check_ortho_circle(chain: Chain, tol: float = POINT_TOL) -> IncidenceReport:
    """Circle about B through every N_i, orthogonal to every member, tangent to the parents at A."""
    conc = check_pappus_concurrency(chain, tol)
    b = conc.artifacts["B"]
    circle = Circle(b, b.dist(chain.N[0]))
    res = [(f"N[{i}]", distance_to(circle, n) / circle.radius) for i, n in enumerate(chain.N)]
    res += [(f"orth[{i}]", orthogonality_residual(circle, k)) for i, k in enumerate(chain.circles)]
    if chain.A is not None:
        res.append(("A", distance_to(circle, chain.A) / circle.radius))
    return IncidenceReport("ortho_circle", res, tol, {"circle": circle, "B": b})


def check_varpi_angle(chain: Chain, i: int, j: int, tol: float = POINT_TOL) -> IncidenceReport:
    """varpi_{i,j} through L_j, L_i, M_i, M_j meets k_i and k_j at arctan(j - i)."""
    if chain.kind is not ChainKind.PAPPUS:
        raise WrongKind("the angle formula holds on Pappus chains")
    if not j > i:
        raise IndexOutOfRange(f"varpi needs j > i, got ({i}, {j})")
    lj, li, mi, mj = varpi_points(chain, i, j)
    varpi = circle_from_3_points(lj, li, mi)
    want = math.atan(j - i)
    scale = _circle_scale(varpi, bounding_scale([lj, li, mi, mj]))
    res = [
        ("M_j", distance_to(varpi, mj) / scale),
        ("angle_k_i", intersection_angle(varpi, chain.circles[i]) - want),
        ("angle_k_j", intersection_angle(varpi, chain.circles[j]) - want),
    ]
    return IncidenceReport(f"varpi_angle[{i},{j}]", res, tol, {"circle": varpi, "angle": want})


def check_omega_tangency(chain: Chain, i: int, j: int, tol: float = POINT_TOL) -> IncidenceReport:
    """omega_{i,j} through L_i, M_i, N_j touches k_j and k_{j+1} at N_j."""
    if j < 0 or j + 1 >= chain.count:
        raise IndexOutOfRange(f"omega_{{{i},{j}}} needs k_{j + 1}")
    pts = omega_points(chain, i, j)
    omega = circle_from_3_points(*pts)
    n = chain.N[j]
    res, coincident = [], []
    for label, k in (("k_j", chain.circles[j]), ("k_j+1", chain.circles[j + 1])):
        if same_gcircle(omega, k, tol):
            # i = j or i = j + 1 puts all three points on that member
            coincident.append(label)
            res += [(f"tangent_{label}", 0.0), (f"point_{label}", 0.0)]
            continue
        kind, t = tangency_classify(omega, k, tol)
        res.append((f"tangent_{label}", t if kind.is_tangent else max(t, 1.0)))
        if kind.is_tangent:
            res.append((f"point_{label}", tangency_point(omega, k, tol).dist(n) / k.radius))
        else:
            res.append((f"point_{label}", 1.0))
    return IncidenceReport(f"omega_tangency[{i},{j}]", res, tol, {"circle": omega, "coincident": coincident})


# ---------------------------------------------------------------- conic families


def _collinear_fit(points: Sequence[Point]) -> tuple[Line, list[float]]:
    arr = np.array([p.as_tuple() for p in points])
    c = arr.mean(axis=0)
    _, _, vt = np.linalg.svd(arr - c)
    d = Point(*vt[0])
    line = Line.through(Point(*c), Point(*c) + d)
    scale = bounding_scale(points) or 1.0
    return line, [abs(line.signed_distance(p)) / scale for p in points]


def collinearity_residual(points: Sequence[Point]) -> float:
    """Worst distance to the best-fit line, relative to the spread of the points."""
    return max(_collinear_fit(points)[1])


def check_center_conic(obj: Union[Chain, ChainPair], selector: FamilySelector,
                       expected_kind: str = "any", foci_line: Optional[Union[Line, LineSeg2]] = None,
                       tol: float = CONIC_TOL, expect_fail: bool = False) -> IncidenceReport:
    """Centres of a circle family lie on one conic: fit five, hold out the rest.

    Residual labels: ``holdout[...]`` (Sampson distance in the fit frame),
    ``kind`` (0 on a match, 1 otherwise), ``focus[0|1]`` (distance to
    ``foci_line`` in fit-frame units).  Focal sum/difference constancy is
    recorded under ``artifacts['focal']`` with its own tolerance.
    """
    name = f"center_conic[{selector.family.value},k={selector.k}]"
    circles = secondary_circles(obj, selector)
    # a Line member is a circle centred at infinity in its normal direction
    entries = [(s.indices, isinstance(s.circle, Line), s.circle.normal if isinstance(s.circle, Line) else s.circle.center)
               for s in circles]
    if len(entries) < 6:
        raise BadCount(f"{name}: {len(entries)} members, need at least 6")
    centers = [e[2] for e in entries if not e[1]]
    artifacts: dict[str, Any] = {"centers": centers, "indices": [e[0] for e in entries],
                                 "at_infinity": [e[0] for e in entries if e[1]]}
    fit, rest = entries[:5], entries[5:]
    try:
        if any(e[1] for e in fit):
            conic = fit_projective_5([e[2] for e in fit if not e[1]], [e[2] for e in fit if e[1]])
        else:
            conic = fit_exact_5([e[2] for e in fit])
    except RankDeficient:
        line, dist = _collinear_fit(centers)
        artifacts.update(rank_deficient=True, line=line, kind=ConicKind.DEGENERATE_LINES)
        res = [(f"holdout{list(e[0])}", abs(line.normal.dot(e[2])) if e[1] else
                abs(line.signed_distance(e[2])) / (bounding_scale(centers) or 1.0)) for e in entries]
        res.append(("kind", 0.0 if expected_kind in ("any", "degenerate_lines") else 1.0))
        return IncidenceReport(name, res, tol, artifacts, expect_fail)

    res = [(f"holdout{list(e[0])}", direction_residual(conic, e[2]) if e[1] else conic_residual(conic, e[2]))
           for e in rest]
    res.append(("kind", 0.0 if conic.kind.matches(expected_kind) else 1.0))
    artifacts.update(conic=conic, kind=conic.kind, rank_deficient=False)
    if len(centers) >= 6:
        try:
            artifacts["lsq"] = fit_min_residual(centers)
        except RankDeficient:
            pass
    if conic.kind in (ConicKind.ELLIPSE, ConicKind.HYPERBOLA, ConicKind.CIRCLE):
        f1, f2 = central_foci(conic)
        artifacts["foci"] = (f1, f2)
        artifacts["focal"] = _focal_report(conic, f1, f2, centers)
        if foci_line is not None:
            ln = as_line(foci_line)
            res += [(f"focus[{n}]", abs(ln.signed_distance(f)) * conic.scale) for n, f in enumerate((f1, f2))]
    elif foci_line is not None:
        res += [("focus[0]", 1.0), ("focus[1]", 1.0)]
    return IncidenceReport(name, res, tol, artifacts, expect_fail)


def _focal_report(conic: Conic, f1: Point, f2: Point, centers: Sequence[Point]) -> IncidenceReport:
    sign = -1.0 if conic.kind is ConicKind.HYPERBOLA else 1.0

    def value(p):
        return abs(p.dist(f1) + sign * p.dist(f2))

    ref = sum(value(p) for p in centers[:5]) / 5.0
    res = [(f"focal[{i}]", (value(p) - ref) / ref) for i, p in enumerate(centers[5:], start=5)]
    return IncidenceReport("focal_constant", res, FOCAL_TOL, {"constant": ref})


def common_chord_bisector(a: Circle, b: Circle) -> Line:
    """Perpendicular bisector of the common chord of two crossing circles."""
    if len(intersect(a, b)) != 2:
        raise NotTangent("the circles do not cross in two points")
    return _centre_line(a, b)


# ---------------------------------------------------------------- pairs


def _quad_residual(points: Sequence[Point]) -> tuple[float, bool]:
    uniq = distinct_points(points)
    if len(uniq) < 4:
        return 0.0, True
    return concyclicity_residual(*uniq).residual, False


def _orth_through(w: Point, a: Circle, b: Circle) -> GeneralizedCircle:
    """Circle (or line) through ``w`` orthogonal to ``a`` and ``b``."""
    # |X - C|^2 - |X - W|^2 = r^2 is linear in X
    m = np.array([[2 * (w.x - c.center.x), 2 * (w.y - c.center.y)] for c in (a, b)])
    rhs = np.array([c.radius ** 2 - c.center.norm2() + w.norm2() for c in (a, b)])
    if abs(np.linalg.det(m)) <= 1e-12 * np.abs(m).max() ** 2:
        return Line.through(a.center, b.center)
    x = Point(*np.linalg.solve(m, rhs))
    return Circle(x, x.dist(w))


def check_pair_concyclic(pair: ChainPair, family: Family, indices: Optional[Sequence] = None,
                         tol: float = POINT_TOL, expect_fail: bool = False) -> IncidenceReport:
    """Four-point families across the two chains of a pair are concyclic."""
    fam = family.canonical
    if not fam.on_pairs:
        raise WrongKind(f"{fam.value} is a single-chain family")
    if indices is None:
        length = pair.usable_length()
        if fam is Family.C_I:
            indices = [(i,) for i in range(1, length + 1)]
        else:
            indices = [(i, j) for i in range(1, length + 1) for j in range(i + 1, length + 1)]
    indices = [tuple(ix) if isinstance(ix, (tuple, list)) else (ix,) for ix in indices]
    res, collapsed = [], []
    for ix in indices:
        idx = ix if fam is not Family.C_I else ix[0]
        value, deg = _quad_residual(family_points(pair, fam, idx))
        res.append((f"{fam.value}{list(ix)}", value))
        if deg:
            collapsed.append(ix)
    artifacts: dict[str, Any] = {"collapsed": collapsed}
    if fam is Family.C_I and pair.pair_kind is PairKind.ORTHOGONAL_PAPPUS:
        res += _ci_companions(pair, [ix[0] for ix in indices], artifacts)
    return IncidenceReport(f"pair_concyclic[{fam.value}]", res, tol, artifacts, expect_fail)


def _ci_companions(pair: ChainPair, idx: list[int], artifacts: dict) -> list:
    """Circle through W orthogonal to k_1 and every c_i; centres of c_i and k_1 collinear."""
    cs = []
    for i in idx:
        pts = distinct_points(family_points(pair, Family.C_I, i))
        g = circle_from_3_points(*pts[:3])
        if isinstance(g, Circle):
            cs.append(g)
    k1 = pair.first.circles[pair.shared_index_first]
    w = pair.W
    out = []
    if cs:
        # the c_i are coaxal with W on their centre line, so pair one of them with k_1
        # c_1 is k_1 itself (its four points lie on the shared circle)
        pick = next((c for c in cs if not same_gcircle(c, k1, 1e-9)), cs[0])
        orth = _orth_through(w, pick, k1)
        artifacts["orthogonal"] = orth
        out += [(f"orth_c[{i}]", orthogonality_residual(orth, c)) for i, c in zip(idx, cs)]
        out.append(("orth_k1", orthogonality_residual(orth, k1)))
        out.append(("orth_W", distance_to(orth, w) / _circle_scale(orth, k1.radius)))
    if len(cs) >= 2:
        out.append(("centres_collinear", collinearity_residual([c.center for c in cs] + [k1.center])))
    return out


# ---------------------------------------------------------------- nested pairs


def _other_meet(a: GeneralizedCircle, b: GeneralizedCircle, w: Point) -> Point:
    pts = intersect(a, b)
    far = max(pts, key=lambda q: q.dist(w), default=None)
    if far is None or far.dist(w) <= 1e-9 * _circle_scale(a):
        raise NotTangent("the parents meet only at the common point")
    return far


def check_orthogonal_parents(pair: ChainPair, tol: float = POINT_TOL) -> IncidenceReport:
    """Parents of an orthogonal pair: a common point W, perpendicular centre lines, and the 45 degree circle.

    W1, W2 are where l2 meets l1 and m1 again, W3, W4 where m2 does.  They lie on
    one circle, which crosses all four parents at 45 degrees (``angle_*``
    residuals, in radians).
    """
    if pair.pair_kind is not PairKind.ORTHOGONAL_PAPPUS or pair.W is None:
        raise WrongKind("this check needs an orthogonal Pappus pair")
    l1, m1, l2, m2 = pair.first.outer, pair.first.inner, pair.second.outer, pair.second.inner
    w = pair.W
    res = [(f"W_on_{n}", abs(distance_to(g, w)) / _circle_scale(g)) for n, g in
           (("l1", l1), ("m1", m1), ("l2", l2), ("m2", m2))]
    d1 = (m1.center - l1.center).unit()
    d2 = (m2.center - l2.center).unit()
    res.append(("centre_lines_dot", d1.dot(d2)))
    ws = [_other_meet(l2, l1, w), _other_meet(l2, m1, w), _other_meet(m2, l1, w), _other_meet(m2, m1, w)]
    res.append(("W1234_concyclic", concyclicity_residual(*ws).residual))
    circle = circle_from_3_points(*ws[:3])
    for n, g in (("l1", l1), ("m1", m1), ("l2", l2), ("m2", m2)):
        res.append((f"angle_{n}", abs(intersection_angle(circle, g) - math.pi / 4)))
    return IncidenceReport("orthogonal_parents", res, tol, {"W": w, "W1234": ws, "circle": circle})


def check_no_orthogonal_annulus(l: GeneralizedCircle, k: GeneralizedCircle, trials: int = 8,
                                seed: int = 0, tol: float = POINT_TOL) -> IncidenceReport:
    """No circle is orthogonal to both of a nested pair and to a third, and the common orthogonals all cross twice.

    In the concentric frame the common orthogonal circles are the diameters;
    a circle of radius r orthogonal to both would need d^2 = r_l^2 + r^2 and
    d^2 = r_k^2 + r^2 at once, impossible because r_k^2 - r_l^2 > 0.
    """
    if not (isinstance(l, Circle) and isinstance(k, Circle)):
        raise NotNested("both objects must be circles")
    kind, _ = tangency_classify(l, k, tol)
    if kind is not TangencyKind.NESTED:
        raise NotNested(f"pair is {kind.value}")
    concentric = l.center.dist(k.center) <= 1e-12 * max(l.radius, k.radius)
    if concentric:
        lf, kf, inv = l, k, None
    else:
        inv = concentricizing_inversion(l, k)
        lf, kf = invert_gcircle(inv, l), invert_gcircle(inv, k)
    small, big = sorted((lf, kf), key=lambda c: c.radius)
    gap = big.radius ** 2 - small.radius ** 2
    o = (lf.center + kf.center) / 2.0

    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, math.pi, trials)
    orth = []
    for a in angles:
        diameter = Line.through(o, o + Point.polar(1.0, float(a)))
        orth.append(diameter if inv is None else invert_gcircle(inv, diameter))
    res = [("gap", 0.0 if gap > 0 else 1.0)]
    res += [(f"orth_l[{i}]", orthogonality_residual(g, l)) for i, g in enumerate(orth)]
    res += [(f"orth_k[{i}]", orthogonality_residual(g, k)) for i, g in enumerate(orth)]
    bad = 0
    pairs = 0
    for i in range(trials):
        for j in range(i + 1, trials):
            pairs += 1
            a, b = orth[i], orth[j]
            n = len(intersect(a, b))
            if isinstance(a, Line) and isinstance(b, Line):
                n += 1  # lines through one centre also share the point at infinity
            if n != 2:
                bad += 1
    res.append(("pairs_not_two_points", bad / pairs if pairs else 0.0))
    return IncidenceReport("no_orthogonal_annulus", res, tol,
                           {"gap": gap, "pairs": pairs, "orthogonals": orth})


# ---------------------------------------------------------------- image-centre locus


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class LocusProblem:
    """Circles centred on the line x = a that cut the unit circle in a chord of length d,
    inverted in the circle of centre ``omega_center`` and radius ``omega_radius``."""

    chord: float
    line_offset: float
    omega_center: Point
    omega_radius: float = 1.0
    branch: Branch = Branch.PLUS

    def __post_init__(self):
        if not 0.0 < self.chord < 2.0:
            raise BadChord(f"chord length must lie in (0, 2), got {self.chord}")
        if not self.line_offset > 0.0:
            raise GeometryError("the line must not pass through the centre of the unit circle")
        if not self.omega_radius > 0.0:
            raise GeometryError("inversion radius must be positive")

    @property
    def s(self) -> float:
        return 2.0 * math.sqrt(1.0 - self.chord ** 2 / 4.0)

    @property
    def sign(self) -> float:
        return 1.0 if self.branch is Branch.PLUS else -1.0

    def radius2(self, m: Point) -> float:
        return m.norm2() + self.sign * self.s * m.norm() + 1.0

    def formula_center(self, y: float) -> Optional[Point]:
        """Image centre by the closed form; None at a pole of the centre map."""
        m = Point(self.line_offset, y)
        c = self.omega_center
        v = m - c
        den = v.norm2() - self.radius2(m)
        if abs(den) <= POLE_TOL * (v.norm2() + self.radius2(m)):
            return None
        return c + v * (self.omega_radius ** 2 / den)

    def oracle_circle(self, y: float) -> Circle:
        """The circle centred (a, y) built from its chord endpoints on the unit circle."""
        m = Point(self.line_offset, y)
        u = m.unit()
        h = self.s / 2.0
        foot = u * (-self.sign * h)
        end = foot + u.perp() * (self.chord / 2.0)
        return Circle(m, m.dist(end))

    def oracle_center(self, y: float) -> Optional[Point]:
        image = invert_gcircle(Inversion(self.omega_center, self.omega_radius ** 2), self.oracle_circle(y))
        return image.center if isinstance(image, Circle) else None


def locus_lemma45(prob: LocusProblem, fit_count: int = 5, holdout: int = 100,
                  y_range: tuple[float, float] = (-3.0, 3.0), tol: float = CONIC_TOL) -> IncidenceReport:
    """Centres of the inverted circles lie on one conic, checked along two computation paths.

    Residual labels: ``dual[...]`` (formula vs oracle, relative to the centre
    size) and ``holdout[...]`` (Sampson residual against the five-point fit).
    """
    if fit_count != 5:
        raise ValueError("the locus is fitted on exactly five samples")
    total = fit_count + holdout
    ys = np.linspace(y_range[0], y_range[1], total)
    good, skipped, dual = [], [], []
    for y in ys:
        f = prob.formula_center(float(y))
        g = prob.oracle_center(float(y))
        if f is None or g is None:
            skipped.append(float(y))
            continue
        dual.append(f.dist(g) / max(1.0, f.norm()))
        good.append(f)
    if len(good) < fit_count + 1:
        raise BadCount("too few samples away from the poles")
    # spread the five fitting samples over the whole range
    pick = sorted({int(round(t)) for t in np.linspace(0, len(good) - 1, fit_count)})
    fit_pts = [good[i] for i in pick]
    rest = [p for i, p in enumerate(good) if i not in pick]
    conic = fit_exact_5(fit_pts)
    res = [(f"dual[{i}]", v) for i, v in enumerate(dual)]
    res += [(f"holdout[{i}]", conic_residual(conic, p)) for i, p in enumerate(rest)]
    return IncidenceReport(
        "locus_lemma45", res, tol,
        {"conic": conic, "kind": conic.kind, "skipped": skipped, "samples": good},
    )
