import math

import numpy as np
import pytest

from tangentchains.chains import (
    Direction,
    Family,
    FamilySelector,
    IndexRule,
    Side,
    build_mirrored_steiner_pair,
    build_orthogonal_pappus_pair,
    build_pappus,
    build_steiner,
    build_steiner_concentric,
    build_transplanted_pair,
    chain_residuals,
    family_indices,
    open_chain,
    orthogonal_circle_at,
    pappus_height_residual,
    secondary_circles,
    steiner_inner_ratio,
    transplant,
)
from tangentchains.errors import (
    BadCount,
    DegenerateMember,
    IndexOutOfRange,
    NotClosable,
    NotOrthogonal,
    NotTangent,
)
from tangentchains.geom import Circle, Point, orthogonality_residual, same_gcircle
from tangentchains.incidence import check_pair_concyclic
from tangentchains.inversion import Inversion, invert_gcircle

OUTER = Circle(Point(0, 0), 1)
INNER = Circle(Point(0.5, 0), 0.5)


def circle_close(c, center, r, tol=1e-12):
    return c.center.dist(center) <= tol and abs(c.radius - r) <= tol


class TestPappus:
    def test_fixture_members(self):
        ch = build_pappus(OUTER, INNER, 3)
        assert circle_close(ch.circles[0], Point(-0.5, 0), 0.5)
        assert circle_close(ch.circles[1], Point(0, 2 / 3), 1 / 3)
        assert circle_close(ch.circles[2], Point(0.5, 2 / 3), 1 / 6)
        assert ch.L[0].dist(Point(-1, 0)) < 1e-12
        assert ch.N[0].dist(Point(-0.2, 0.4)) < 1e-12
        assert ch.A.dist(Point(1, 0)) < 1e-15

    def test_height_identity(self):
        ch = build_pappus(OUTER, INNER, 21)
        assert max(pappus_height_residual(ch, n) for n in range(21)) < 1e-9
        assert abs(ch.circles[2].center.y) == pytest.approx(2 * 2 * ch.circles[2].radius)

    def test_side_down_mirrors(self):
        up, down = build_pappus(OUTER, INNER, 5), build_pappus(OUTER, INNER, 5, Side.DOWN)
        for a, b in zip(up.circles, down.circles):
            assert circle_close(b, Point(a.center.x, -a.center.y), a.radius)

    def test_parent_order_irrelevant(self):
        a, b = build_pappus(OUTER, INNER, 4), build_pappus(INNER, OUTER, 4)
        assert all(same_gcircle(x, y) for x, y in zip(a.circles, b.circles))

    def test_errors(self):
        with pytest.raises(BadCount):
            build_pappus(OUTER, INNER, 1)
        with pytest.raises(NotTangent):
            build_pappus(OUTER, Circle(Point(0.2, 0), 0.5), 5)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_invariants(self, seed):
        rng = np.random.default_rng(seed)
        big = rng.uniform(0.5, 3.0)
        ratio = rng.uniform(0.15, 0.85)
        n = int(rng.integers(3, 25))
        theta = rng.uniform(0, 2 * math.pi)
        o = Point(*rng.uniform(-3, 3, 2))
        inner = Circle(o + Point.polar(big * (1 - ratio), theta), big * ratio)
        ch = build_pappus(Circle(o, big), inner, n)
        assert max(chain_residuals(ch).values()) < 1e-9


class TestSteiner:
    def test_n6(self):
        ch = build_steiner_concentric(6, 3.0)
        assert ch.inner.radius == pytest.approx(1.0)
        for j, c in enumerate(ch.circles):
            assert circle_close(c, Point.polar(2.0, j * math.pi / 3), 1.0, 1e-12)

    def test_n3_closes(self):
        ch = build_steiner_concentric(3, 1.0)
        s = math.sin(math.pi / 3)
        assert ch.inner.radius == pytest.approx((1 - s) / (1 + s))
        assert chain_residuals(ch)["tangent_neighbours"] < 1e-9

    @pytest.mark.parametrize("n", [3, 5, 12, 24])
    def test_any_start_angle(self, n):
        rng = np.random.default_rng(n)
        for a in rng.uniform(0, 2 * math.pi, 5):
            assert max(chain_residuals(build_steiner_concentric(n, 2.0, a)).values()) < 1e-9

    def test_general_pair(self):
        frame = build_steiner_concentric(7, 2.0)
        inv = Inversion(Point(4, 1), 2.0)
        ch = build_steiner(invert_gcircle(inv, frame.outer), invert_gcircle(inv, frame.inner), 7, 0.4)
        assert ch.closed and max(chain_residuals(ch).values()) < 1e-9

    def test_not_closable(self):
        with pytest.raises(NotClosable):
            build_steiner(Circle(Point(0, 0), 3), Circle(Point(0, 0), 1.2), 6)

    def test_bad_count(self):
        with pytest.raises(BadCount):
            build_steiner_concentric(2)

    def test_ratio(self):
        assert steiner_inner_ratio(6) == pytest.approx(1 / 3)


class TestTransplant:
    def test_twice_is_identity(self):
        ch = build_steiner_concentric(6, 3.0)
        inv = Inversion(Point(7, 0), 1.0)
        back = transplant(transplant(ch, inv), inv)
        for a, b in zip(ch.circles, back.circles):
            assert circle_close(b, a.center, a.radius, 1e-10)

    def test_non_concentric_result(self):
        out = transplant(build_steiner_concentric(6, 3.0), Inversion(Point(7, 0), 1.0))
        assert out.outer.center.dist(out.inner.center) > 1e-3
        assert max(chain_residuals(out).values()) < 1e-9

    def test_center_on_member(self):
        with pytest.raises(DegenerateMember):
            transplant(build_steiner_concentric(6, 3.0), Inversion(Point(3, 0), 1.0))

    def test_open_chain(self):
        ch = open_chain(build_steiner_concentric(6, 3.0))
        assert not ch.closed and len(ch.N) == 5


class TestOrthogonalPair:
    def test_fixture(self):
        pair = build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 12))
        parents = {(round(c.center.x, 12), round(c.center.y, 12), round(c.radius, 12))
                   for c in (pair.second.outer, pair.second.inner)}
        assert parents == {(1.0, 2.0, 2.0), (1.0, -2.0, 2.0)}
        assert pair.second.circles[0] == pair.first.circles[0]
        assert circle_close(pair.second.circles[1], Point(1 / 6, 0), 1 / 6)
        assert circle_close(pair.second.circles[2], Point(5 / 12, 0), 1 / 12)
        assert pair.W.dist(Point(1, 0)) < 1e-15
        for a in (pair.first.outer, pair.first.inner):
            for b in (pair.second.outer, pair.second.inner):
                assert orthogonality_residual(a, b) < 1e-9

    def test_any_shared_member(self):
        base = build_pappus(OUTER, INNER, 12)
        pair = build_orthogonal_pappus_pair(base, 3)
        assert same_gcircle(pair.second.circles[0], base.circles[3])
        assert max(chain_residuals(pair.second).values()) < 1e-9

    def test_right_from_first_member_is_degenerate(self):
        with pytest.raises(DegenerateMember):
            build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 12), 0, Direction.RIGHT)

    def test_index_range(self):
        with pytest.raises(IndexOutOfRange):
            build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 4), 4)


class TestMirroredPair:
    def test_annulus_centres(self):
        p60 = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(60))
        assert p60.second.outer.center.dist(Point(3, -math.sqrt(3))) < 1e-12
        p90 = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(90))
        assert p90.second.outer.center.dist(Point(4, 0)) < 1e-12
        assert same_gcircle(p60.second.circles[0], p60.first.circles[0])

    def test_degenerate_flag(self):
        assert build_mirrored_steiner_pair(6, 3.0, 0.0, 0.0).degenerate
        assert not build_mirrored_steiner_pair(6, 3.0, 0.0, 1.0).degenerate


class TestTransplantedPair:
    def omega(self):
        return orthogonal_circle_at(Point(5, 1), Circle(Point(2, 0), 1))

    def test_valid_pair(self):
        omega = self.omega()
        assert omega.radius == pytest.approx(3.0)
        pair = build_transplanted_pair(6, 3.0, 0.0, omega)
        assert pair.second.circles[0] == pair.first.circles[0]
        assert max(chain_residuals(pair.second).values()) < 1e-9

    def test_shared_circle_fixed_by_omega(self):
        omega = self.omega()
        shared = Circle(Point(2, 0), 1)
        assert same_gcircle(invert_gcircle(Inversion(omega.center, omega.radius ** 2), shared), shared, 1e-10)

    def test_centre_on_shared_centre(self):
        with pytest.raises(NotOrthogonal):
            orthogonal_circle_at(Point(2, 0), Circle(Point(2, 0), 1))
        with pytest.raises(NotOrthogonal):
            build_transplanted_pair(6, 3.0, 0.0, Circle(Point(2, 0), 1.0))

    def test_untwisted_pair_is_concyclic(self):
        # a single inversion maps P, Q to P*, Q* on one circle, so no quadruple can fail
        pair = build_transplanted_pair(6, 3.0, 0.0, self.omega(), twist=0.0)
        for fam in (Family.C_LL, Family.C_MM, Family.C_NN):
            assert check_pair_concyclic(pair, fam).max_residual < 1e-9

    def test_twisted_pair_is_not(self):
        pair = build_transplanted_pair(6, 3.0, 0.0, self.omega())
        assert check_pair_concyclic(pair, Family.C_MM).max_residual > 1e-3


class TestIndexRules:
    def test_fixed_difference(self):
        ch = build_pappus(OUTER, INNER, 6)
        assert family_indices(ch, FamilySelector(Family.OMEGA, 2)) == [(2, 0), (3, 1), (4, 2), (5, 3)]
        assert family_indices(ch, FamilySelector(Family.VARPI, 1))[:2] == [(0, 1), (1, 2)]

    def test_closed_chain_wraps(self):
        ch = build_steiner_concentric(5, 2.0)
        idx = family_indices(ch, FamilySelector(Family.VARPI, 2))
        assert len(idx) == 5 and idx[0] == (3, 0)
        with pytest.raises(ValueError):
            family_indices(ch, FamilySelector(Family.VARPI, 5))

    def test_pappus_pair_rule(self):
        pair = build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 20))
        idx = family_indices(pair, FamilySelector(Family.C_NN, 2, IndexRule.PAPPUS_PAIR))
        assert idx[:3] == [(1, 2), (2, 5), (3, 8)]
        assert all(j == 3 * i - 1 for i, j in idx)

    def test_steiner_cyclic_rule(self):
        pair = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(60))
        idx = family_indices(pair, FamilySelector(Family.C_NN, 3, IndexRule.STEINER_CYCLIC))
        assert idx == [(1, 3), (2, 4), (3, 5), (4, 6), (5, 1), (6, 2)]

    def test_selector_validation(self):
        with pytest.raises(ValueError):
            FamilySelector(Family.OMEGA, 1, IndexRule.PAPPUS_PAIR)
        with pytest.raises(ValueError):
            FamilySelector(Family.C_LL, 1)
        with pytest.raises(ValueError):
            FamilySelector(Family.OMEGA, 0)

    def test_secondary_varpi_membership(self):
        ch = build_pappus(OUTER, INNER, 12)
        circles = secondary_circles(ch, FamilySelector(Family.VARPI, 1))
        assert circles[0].indices == (0, 1)
        assert max(s.membership for s in circles) < 1e-9

    def test_pair_index_past_end(self):
        pair = build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 6))
        with pytest.raises(IndexOutOfRange):
            pair.point(1, "L", 7)
