"""Pappus and Steiner chains, chain pairs, and the circle families built on them.

Indexing
--------
A single chain is 0-based: for a Pappus chain ``circles[0]`` is the member whose
centre sits on the line through the parents' centres.  ``N[i]`` joins
``circles[i]`` and ``circles[i + 1]``; a closed Steiner chain has one extra
``N`` joining the last member to the first.

Chain pairs are addressed 1-based relative to the shared circle: pair index 1
is the shared circle in both chains, pair index ``p`` is ``p - 1`` steps past it
(wrapping on closed chains).  This is the numbering used by the index rules
``(i, i(k+1) - 1)`` and ``(i, ((i + k - 2) mod n) + 1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

from .errors import (
    BadCount,
    DuplicatePoints,
    DegenerateMember,
    GeometryError,
    IndexOutOfRange,
    NotClosable,
    NotOrthogonal,
    NotTangent,
    WrongKind,
)
from .geom import (
    ORIGIN,
    Circle,
    GeneralizedCircle,
    Line,
    LineSeg2,
    Point,
    TangencyKind,
    circle_from_3_points,
    distance_to,
    orthogonality_residual,
    reflect_point,
    same_gcircle,
    tangency_classify,
)
from .inversion import (
    Inversion,
    concentricizing_inversion,
    invert_gcircle,
    invert_point,
    tangent_pair_frame,
)

INVARIANT_TOL = 1e-9


class ChainKind(enum.Enum):
    PAPPUS = "pappus"
    STEINER = "steiner"


class Side(enum.Enum):
    UP = "up"
    DOWN = "down"


class Direction(enum.Enum):
    """Marching direction of the second chain of an orthogonal pair.

    LEFT moves away from the contact point of the parents in the strip frame,
    RIGHT moves towards it.
    """

    LEFT = "left"
    RIGHT = "right"


class PairKind(enum.Enum):
    ORTHOGONAL_PAPPUS = "orthogonal_pappus"
    MIRRORED_STEINER = "mirrored_steiner"
    TRANSPLANTED_STEINER = "transplanted_steiner"


class Family(enum.Enum):
    OMEGA = "omega"
    VARPI = "varpi"
    C_I = "c_i"
    C_LL = "c_ll"
    C_MM = "c_mm"
    C_NN = "c_nn"
    C_L = "c_l"
    C_M = "c_m"

    @property
    def canonical(self) -> Family:
        return {Family.C_L: Family.C_LL, Family.C_M: Family.C_MM}.get(self, self)

    @property
    def on_pairs(self) -> bool:
        return self not in (Family.OMEGA, Family.VARPI)


class IndexRule(enum.Enum):
    FIXED_DIFFERENCE = "fixed_difference"
    PAPPUS_PAIR = "pappus_pair"
    STEINER_CYCLIC = "steiner_cyclic"


@dataclass(frozen=True)
class FamilySelector:
    family: Family
    k: int = 1
    index_rule: IndexRule = IndexRule.FIXED_DIFFERENCE

    def __post_init__(self):
        fam = self.family.canonical
        if fam in (Family.OMEGA, Family.VARPI):
            if self.index_rule is not IndexRule.FIXED_DIFFERENCE:
                raise ValueError(f"{fam.value} circles use the fixed-difference rule")
            if self.k < 1:
                raise ValueError("difference families need k >= 1")
        elif fam is not Family.C_I:
            if self.index_rule is IndexRule.FIXED_DIFFERENCE:
                raise ValueError(f"{fam.value} circles need a pair index rule")
            if self.k < 1:
                raise ValueError("k must be positive")


@dataclass(frozen=True)
class Chain:
    """Ordered tangent circles between parents ``outer`` (l) and ``inner`` (m).

    ``L``/``M`` are the contacts with l and m; the parent names follow the
    objects through inversions, so after a transplant ``outer`` need not be the
    larger circle.
    """

    kind: ChainKind
    outer: GeneralizedCircle
    inner: GeneralizedCircle
    circles: tuple
    L: tuple
    M: tuple
    N: tuple
    p_lines: tuple
    t_lines: tuple
    closed: bool = False
    A: Optional[Point] = None

    @property
    def count(self) -> int:
        return len(self.circles)

    def points(self) -> list[Point]:
        return [*self.L, *self.M, *self.N]


@dataclass(frozen=True)
class ChainPair:
    first: Chain
    second: Chain
    shared_index_first: int
    shared_index_second: int
    pair_kind: PairKind
    W: Optional[Point] = None
    degenerate: bool = False

    def chain(self, which: int) -> Chain:
        return self.first if which == 1 else self.second

    def chain_index(self, which: int, p: int) -> int:
        """Chain-list index of pair index ``p`` (1-based, shared circle = 1)."""
        chain = self.chain(which)
        shared = self.shared_index_first if which == 1 else self.shared_index_second
        if p < 1:
            raise IndexOutOfRange(f"pair indices start at 1, got {p}")
        idx = shared + p - 1
        if chain.closed:
            return idx % chain.count
        if idx >= chain.count:
            raise IndexOutOfRange(f"pair index {p} is past the end of chain {which}")
        return idx

    def point(self, which: int, label: str, p: int) -> Point:
        chain = self.chain(which)
        idx = self.chain_index(which, p)
        seq = getattr(chain, label)
        if idx >= len(seq):
            raise IndexOutOfRange(f"{label}_{p} does not exist on chain {which}")
        return seq[idx]

    def usable_length(self) -> int:
        """Largest pair index valid for L, M and N on both chains."""
        out = []
        for which in (1, 2):
            chain = self.chain(which)
            shared = self.shared_index_first if which == 1 else self.shared_index_second
            if chain.closed:
                out.append(chain.count)
            else:
                out.append(len(chain.N) - shared)
        return min(out)


# ---------------------------------------------------------------- assembly


def _assemble(kind, outer, inner, circles, L, M, N, closed=False, A=None) -> Chain:
    if any(isinstance(c, Line) for c in circles):
        raise DegenerateMember("chain members must be circles")
    p_lines = tuple(LineSeg2(a, b) for a, b in zip(L, M))
    t_lines = tuple(
        LineSeg2.from_direction(n, (n - circles[i].center).perp()) for i, n in enumerate(N)
    )
    return Chain(kind, outer, inner, tuple(circles), tuple(L), tuple(M), tuple(N),
                 p_lines, t_lines, closed, A)


def _neighbour_pairs(chain: Chain):
    n = chain.count
    for i in range(len(chain.N)):
        yield i, (i + 1) % n


def chain_residuals(chain: Chain) -> dict[str, float]:
    """Worst relative residual of each structural chain invariant."""
    out = {"tangent_parents": 0.0, "tangent_neighbours": 0.0, "contacts": 0.0}

    def tangent_res(a, b):
        kind, res = tangency_classify(a, b, INVARIANT_TOL)
        return res if kind.is_tangent else max(res, 1.0)

    for k in chain.circles:
        out["tangent_parents"] = max(out["tangent_parents"], tangent_res(k, chain.outer), tangent_res(k, chain.inner))
    for i, j in _neighbour_pairs(chain):
        out["tangent_neighbours"] = max(out["tangent_neighbours"], tangent_res(chain.circles[i], chain.circles[j]))

    def on(g, p, r):
        return distance_to(g, p) / (g.radius if isinstance(g, Circle) else r)

    for i, k in enumerate(chain.circles):
        r = k.radius
        out["contacts"] = max(out["contacts"], on(chain.outer, chain.L[i], r), on(k, chain.L[i], r),
                              on(chain.inner, chain.M[i], r), on(k, chain.M[i], r))
    for i, j in _neighbour_pairs(chain):
        r = chain.circles[i].radius
        out["contacts"] = max(out["contacts"], on(chain.circles[i], chain.N[i], r),
                              on(chain.circles[j], chain.N[i], r))
    return out


def check_chain(chain: Chain, tol: float = INVARIANT_TOL) -> Chain:
    res = chain_residuals(chain)
    bad = {k: v for k, v in res.items() if not v <= tol}
    if bad:
        raise GeometryError(f"chain invariants violated: {bad}")
    return chain


def map_chain(chain: Chain, fp: Callable[[Point], Point], fg: Callable, kind=None) -> Chain:
    """Push every object of ``chain`` through a point map and a gcircle map."""
    circles = [fg(k) for k in chain.circles]
    return _assemble(
        kind or chain.kind,
        fg(chain.outer),
        fg(chain.inner),
        circles,
        [fp(p) for p in chain.L],
        [fp(p) for p in chain.M],
        [fp(p) for p in chain.N],
        chain.closed,
        None if chain.A is None else fp(chain.A),
    )


def _reflect_gcircle(g: GeneralizedCircle, line: Line) -> GeneralizedCircle:
    if isinstance(g, Circle):
        return Circle(reflect_point(g.center, line), g.radius)
    a = g.foot(ORIGIN)
    return Line.through(reflect_point(a, line), reflect_point(a + g.direction, line))


def reflect_chain(chain: Chain, line: Line) -> Chain:
    return map_chain(chain, lambda p: reflect_point(p, line), lambda g: _reflect_gcircle(g, line))


def similarity_map(scale: float, angle: float, shift: Point):
    """Return ``(point_map, gcircle_map)`` for ``p -> scale * rot(angle) p + shift``."""

    def fp(p: Point) -> Point:
        return p.rotate(angle) * scale + shift

    def fg(g):
        if isinstance(g, Circle):
            return Circle(fp(g.center), g.radius * scale)
        a = g.foot(ORIGIN)
        return Line.through(fp(a), fp(a + g.direction))

    return fp, fg


def transplant(chain: Chain, inv: Inversion) -> Chain:
    for i, k in enumerate(chain.circles):
        d = k.center.dist(inv.center)
        if abs(d - k.radius) <= 1e-9 * max(k.radius, d):
            raise DegenerateMember(f"member {i} passes through the inversion center")
    out = map_chain(chain, lambda p: invert_point(inv, p), lambda g: invert_gcircle(inv, g))
    return check_chain(out)


# ---------------------------------------------------------------- Pappus


def _strip_axes(outer: Circle, inner: Circle, a: Point) -> tuple[Point, Point]:
    u = (outer.center - a).unit()
    return u, Point(u.y, -u.x)


def build_pappus(outer: GeneralizedCircle, inner: GeneralizedCircle, count: int,
                 side: Side = Side.UP) -> Chain:
    if count < 2:
        raise BadCount("a Pappus chain needs at least two members")
    frame = tangent_pair_frame(outer, inner)
    if frame.external:
        raise NotTangent("Pappus chains need internally tangent parents")
    if outer.radius < inner.radius:
        outer, inner = inner, outer
    a = frame.contact
    inv = frame.inversion
    u, v = _strip_axes(outer, inner, a)
    if side is Side.DOWN:
        v = -v
    s1, s2 = 0.5 / outer.radius, 0.5 / inner.radius
    w = s2 - s1
    sc = 0.5 * (s1 + s2)

    def at(s, t):
        return a + u * s + v * t

    circles, L, M, N = [], [], [], []
    for j in range(count):
        image = Circle(at(sc, j * w), w / 2)
        if image.center.dist(a) <= image.radius * (1 + 1e-12):
            raise DegenerateMember(f"member {j} would pass through the contact point")
        circles.append(invert_gcircle(inv, image))
        L.append(invert_point(inv, at(s1, j * w)))
        M.append(invert_point(inv, at(s2, j * w)))
        if j + 1 < count:
            N.append(invert_point(inv, at(sc, (j + 0.5) * w)))
    return check_chain(_assemble(ChainKind.PAPPUS, outer, inner, circles, L, M, N, False, a))


def pappus_height_residual(chain: Chain, n: int) -> float:
    """|height(k_n) - 2 n r_n| / r_n, height measured from the parents' centre line."""
    axis = Line.through(chain.outer.center, chain.inner.center)
    k = chain.circles[n]
    return abs(abs(axis.signed_distance(k.center)) - 2 * n * k.radius) / k.radius


# ---------------------------------------------------------------- Steiner


def steiner_inner_ratio(n: int) -> float:
    s = math.sin(math.pi / n)
    return (1 - s) / (1 + s)


def build_steiner_concentric(n: int, outer_radius: float = 1.0, start_angle: float = 0.0,
                             center: Point = ORIGIN) -> Chain:
    if n < 3:
        raise BadCount("a closed Steiner chain needs at least three members")
    R = float(outer_radius)
    r_in = R * steiner_inner_ratio(n)
    ring = 0.5 * (R + r_in)
    rad = 0.5 * (R - r_in)
    step = 2 * math.pi / n
    circles, L, M, N = [], [], [], []
    for j in range(n):
        th = start_angle + j * step
        circles.append(Circle(center + Point.polar(ring, th), rad))
        L.append(center + Point.polar(R, th))
        M.append(center + Point.polar(r_in, th))
        N.append(center + Point.polar(ring * math.cos(step / 2), th + step / 2))
    return check_chain(_assemble(ChainKind.STEINER, Circle(center, R), Circle(center, r_in),
                                 circles, L, M, N, True))


def build_steiner(outer: GeneralizedCircle, inner: GeneralizedCircle, n: int,
                  start_angle: float = 0.0, tol: float = 1e-9) -> Chain:
    """Closed Steiner chain between an arbitrary nested pair, if one exists."""
    inv = concentricizing_inversion(outer, inner)
    lo, mo = invert_gcircle(inv, outer), invert_gcircle(inv, inner)
    big, small = (lo, mo) if lo.radius > mo.radius else (mo, lo)
    ratio = small.radius / big.radius
    if abs(ratio - steiner_inner_ratio(n)) > tol:
        raise NotClosable(f"radius ratio {ratio:.12g} does not close a chain of {n}")
    frame_chain = build_steiner_concentric(n, big.radius, start_angle, big.center)
    chain = transplant(frame_chain, inv)
    if big is mo:
        chain = Chain(chain.kind, chain.inner, chain.outer, chain.circles, chain.M, chain.L, chain.N,
                      tuple(LineSeg2(a, b) for a, b in zip(chain.M, chain.L)), chain.t_lines,
                      chain.closed, chain.A)
    return chain


# ---------------------------------------------------------------- pairs


def build_orthogonal_pappus_pair(base: Chain, shared_index: int = 0,
                                 direction: Direction = Direction.LEFT,
                                 count: Optional[int] = None) -> ChainPair:
    """Second Pappus chain sharing ``base.circles[shared_index]``, with orthogonal parents.

    The second parents are labelled so that the reflection of the strip frame
    through the shared circle sends l_1 to l_2 and m_1 to m_2; with that
    labelling every four-point family is an isosceles trapezium in the frame.
    """
    if base.kind is not ChainKind.PAPPUS or base.A is None:
        raise WrongKind("orthogonal pairs are built on Pappus chains")
    if not 0 <= shared_index < base.count:
        raise IndexOutOfRange(f"shared index {shared_index} outside 0..{base.count - 1}")
    count = base.count if count is None else count
    outer, inner = base.outer, base.inner
    a = base.A
    inv = Inversion(a, 1.0)
    u, v = _strip_axes(outer, inner, a)
    s1, s2 = 0.5 / outer.radius, 0.5 / inner.radius
    w = s2 - s1
    sc = 0.5 * (s1 + s2)

    shared = base.circles[shared_index]
    shared_img = invert_gcircle(inv, shared)
    t0 = (shared_img.center - a).dot(v)
    nb = shared_index + 1 if shared_index + 1 < base.count else shared_index - 1
    step = (invert_gcircle(inv, base.circles[nb]).center - a).dot(v) - t0
    nu = 1.0 if (step > 0) == (nb > shared_index) else -1.0
    mu = 1.0 if direction is Direction.LEFT else -1.0

    def at(s, t):
        return a + u * s + v * t

    t_l2 = t0 - mu * nu * w / 2
    t_m2 = t0 + mu * nu * w / 2
    l2 = invert_gcircle(inv, Line(v, v.dot(a) + t_l2))
    m2 = invert_gcircle(inv, Line(v, v.dot(a) + t_m2))

    circles, L, M, N = [], [], [], []
    for j in range(count):
        s = sc + mu * j * w
        image = Circle(at(s, t0), w / 2)
        if image.center.dist(a) <= image.radius * (1 + 1e-9):
            raise DegenerateMember(f"second-chain member {j} passes through the contact point; "
                                   "use the other direction")
        circles.append(shared if j == 0 else invert_gcircle(inv, image))
        L.append(invert_point(inv, at(s, t_l2)))
        M.append(invert_point(inv, at(s, t_m2)))
        if j + 1 < count:
            N.append(invert_point(inv, at(sc + mu * (j + 0.5) * w, t0)))
    second = check_chain(_assemble(ChainKind.PAPPUS, l2, m2, circles, L, M, N, False, a))
    return ChainPair(base, second, shared_index, 0, PairKind.ORTHOGONAL_PAPPUS, W=a)


def open_chain(chain: Chain) -> Chain:
    """Forget the closing tangency of a closed chain (families then stop wrapping)."""
    if not chain.closed:
        return chain
    return replace(chain, closed=False, N=chain.N[:-1], t_lines=chain.t_lines[:-1])


def mirror_line(center: Point, angle: float) -> Line:
    return Line.through(center, center + Point.polar(1.0, angle))


def build_mirrored_steiner_pair(n: int, outer_radius: float = 1.0, shared_angle: float = 0.0,
                                mirror_angle: float = math.pi / 3,
                                post_inversion: Optional[Inversion] = None) -> ChainPair:
    first = build_steiner_concentric(n, outer_radius, shared_angle)
    shared = first.circles[0]
    mirror = mirror_line(shared.center, shared_angle + mirror_angle)
    second = reflect_chain(first, mirror)
    degenerate = same_gcircle(first.outer, second.outer, 1e-12)
    if post_inversion is not None:
        first = transplant(first, post_inversion)
        second = transplant(second, post_inversion)
    return ChainPair(first, second, 0, 0, PairKind.MIRRORED_STEINER, degenerate=degenerate)


def orthogonal_circle_at(center: Point, circle: Circle) -> Circle:
    """The circle centred at ``center`` that crosses ``circle`` at right angles."""
    p = circle.power(center)
    if p <= 0:
        raise NotOrthogonal(f"no circle centred at {center} is orthogonal to {circle}")
    return Circle(center, math.sqrt(p))


DEFAULT_TWIST = 2 * math.pi / 3


def build_transplanted_pair(n: int, outer_radius: float, shared_angle: float,
                            omega: GeneralizedCircle, twist: float = DEFAULT_TWIST) -> ChainPair:
    """Two Steiner chains sharing a circle whose parent pairs are not mirror images.

    Chain 2 is chain 1 turned by ``twist`` about the shared centre and then
    inverted in ``omega``.  With ``twist = 0`` the pair is chain 1 and its image
    under a single inversion; since P, Q, P* and Q* are concyclic for every
    inversion, that pair satisfies all four-point families exactly and is no
    counterexample.  Any twist that is not a multiple of pi breaks the symmetry.
    """
    first = build_steiner_concentric(n, outer_radius, shared_angle)
    shared = first.circles[0]
    if not isinstance(omega, Circle) or orthogonality_residual(omega, shared) >= 1e-9:
        raise NotOrthogonal("omega must be a circle orthogonal to the shared member")
    c = shared.center

    def turn(p: Point) -> Point:
        return (p - c).rotate(twist) + c

    turned = map_chain(first, turn, lambda g: Circle(turn(g.center), g.radius))
    second = transplant(turned, Inversion(omega.center, omega.radius ** 2))
    second = Chain(second.kind, second.outer, second.inner, (shared,) + second.circles[1:],
                   second.L, second.M, second.N, second.p_lines, second.t_lines,
                   second.closed, second.A)
    return ChainPair(first, second, 0, 0, PairKind.TRANSPLANTED_STEINER)


# ---------------------------------------------------------------- families


def omega_points(chain: Chain, i: int, j: int) -> tuple[Point, ...]:
    """Defining points of omega_{i,j}: L_i, M_i, N_j."""
    _check(chain, i, "L")
    _check(chain, j, "N")
    return (chain.L[i], chain.M[i], chain.N[j])


def varpi_points(chain: Chain, i: int, j: int) -> tuple[Point, ...]:
    """L_j, L_i, M_i and the membership point M_j of varpi_{i,j}; j > i unless the chain is closed."""
    if i < 0 or j <= i and not (chain.closed and j != i):
        raise IndexOutOfRange(f"varpi needs j > i >= 0, got ({i}, {j})")
    _check(chain, i, "L")
    _check(chain, j, "L")
    return (chain.L[j], chain.L[i], chain.M[i], chain.M[j])


def _check(chain: Chain, i: int, label: str):
    if not 0 <= i < len(getattr(chain, label)):
        raise IndexOutOfRange(f"{label}_{i} does not exist")


def pair_points(pair: ChainPair, family: Family, idx) -> tuple[Point, ...]:
    fam = family.canonical
    if fam is Family.C_I:
        i = idx[0] if isinstance(idx, tuple) else idx
        return (pair.point(1, "L", i), pair.point(1, "M", i), pair.point(2, "L", i), pair.point(2, "M", i))
    i, j = idx
    label = {Family.C_LL: "L", Family.C_MM: "M", Family.C_NN: "N"}[fam]
    return (pair.point(1, label, i), pair.point(1, label, j), pair.point(2, label, i), pair.point(2, label, j))


def family_indices(obj: Union[Chain, ChainPair], selector: FamilySelector) -> list[tuple]:
    fam, k, rule = selector.family.canonical, selector.k, selector.index_rule
    if isinstance(obj, Chain):
        if obj.closed and fam in (Family.OMEGA, Family.VARPI):
            n = obj.count
            if k % n == 0:
                raise ValueError(f"k = {k} is a multiple of the chain length")
            if fam is Family.OMEGA:
                return [(i, (i - k) % n) for i in range(n)]
            return [((i - k) % n, i) for i in range(n)]
        if fam is Family.OMEGA:
            return [(i, i - k) for i in range(k, obj.count) if i - k < len(obj.N)]
        if fam is Family.VARPI:
            return [(i - k, i) for i in range(k, obj.count)]
        raise WrongKind(f"{fam.value} is a chain-pair family")
    if not fam.on_pairs:
        raise WrongKind(f"{fam.value} is a single-chain family")
    length = obj.usable_length()
    if fam is Family.C_I:
        return [(i,) for i in range(1, length + 1)]
    out = []
    if rule is IndexRule.PAPPUS_PAIR:
        i = 1
        while i * (k + 1) - 1 <= length:
            j = i * (k + 1) - 1
            if j != i:
                out.append((i, j))
            i += 1
    elif rule is IndexRule.STEINER_CYCLIC:
        n = min(obj.first.count, obj.second.count)
        for i in range(1, n + 1):
            j = ((i + k - 2) % n) + 1
            if j != i:
                out.append((i, j))
    else:
        raise ValueError(f"{rule.value} does not apply to chain pairs")
    return out


def family_points(obj: Union[Chain, ChainPair], family: Family, idx) -> tuple[Point, ...]:
    fam = family.canonical
    if fam is Family.OMEGA:
        return omega_points(obj, *idx)
    if fam is Family.VARPI:
        return varpi_points(obj, *idx)
    return pair_points(obj, fam, idx)


@dataclass(frozen=True)
class SecondaryCircle:
    indices: tuple
    circle: GeneralizedCircle
    points: tuple
    membership: Optional[float] = None


def distinct_points(points: Sequence[Point], tol: float = 1e-9) -> list[Point]:
    """Drop repeats; a point on the mirror of a mirrored pair shows up in both chains."""
    scale = max(p.dist(q) for p in points for q in points) or 1.0
    out: list[Point] = []
    for p in points:
        if all(p.dist(q) > tol * scale for q in out):
            out.append(p)
    return out


def secondary_circle(obj, family: Family, idx) -> SecondaryCircle:
    pts = family_points(obj, family, idx)
    uniq = distinct_points(pts)
    if len(uniq) < 3:
        raise DuplicatePoints(f"{family.value}{idx} has fewer than three distinct points")
    circle = circle_from_3_points(*uniq[:3])
    membership = None
    if len(uniq) > 3:
        scale = circle.radius if isinstance(circle, Circle) else max(p.norm() for p in pts) or 1.0
        membership = distance_to(circle, uniq[3]) / scale
    return SecondaryCircle(tuple(idx) if isinstance(idx, tuple) else (idx,), circle, pts, membership)


def secondary_circles(obj: Union[Chain, ChainPair], selector: FamilySelector) -> list[SecondaryCircle]:
    return [secondary_circle(obj, selector.family, idx) for idx in family_indices(obj, selector)]
