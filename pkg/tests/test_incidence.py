import math

import numpy as np
import pytest

from tangentchains.chains import (
    Family,
    FamilySelector,
    IndexRule,
    build_mirrored_steiner_pair,
    build_orthogonal_pappus_pair,
    build_pappus,
    build_steiner_concentric,
    build_transplanted_pair,
    orthogonal_circle_at,
)
from tangentchains.conic import ConicKind
from tangentchains.errors import BadChord, BadCount, GeometryError, IndexOutOfRange, NotNested, WrongKind
from tangentchains.geom import Circle, Line, Point
from tangentchains.incidence import (
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
    collinearity_residual,
    common_chord_bisector,
    locus_lemma45,
)

OUTER = Circle(Point(0, 0), 1)
INNER = Circle(Point(0.5, 0), 0.5)
X_AXIS = Line(Point(0, 1), 0.0)


@pytest.fixture(scope="module")
def chain():
    return build_pappus(OUTER, INNER, 12)


@pytest.fixture(scope="module")
def ortho():
    return build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 20))


def pappus_with_inner(r, count=12):
    return build_pappus(OUTER, Circle(Point(1 - r, 0), r), count)


class TestReport:
    def test_pass_iff_below_tolerance(self):
        r = IncidenceReport("x", [("a", -2e-10), ("b", 5e-10)], 1e-9)
        assert r.residuals == [("a", 2e-10), ("b", 5e-10)]
        assert r.passed and r.max_residual == 5e-10
        assert not IncidenceReport("x", [("a", 2e-9)], 1e-9).passed

    def test_expect_fail(self):
        assert IncidenceReport("x", [("a", 1.0)], 1e-3, expect_fail=True).as_expected
        assert not IncidenceReport("x", [("a", 0.0)], 1e-3, expect_fail=True).as_expected

    def test_empty(self):
        assert IncidenceReport("x", [], 1e-9).max_residual == 0.0


class TestPappusChecks:
    def test_concurrency(self, chain):
        r = check_pappus_concurrency(chain)
        assert r.artifacts["B"].dist(Point(1 / 3, 0)) < 1e-10 and r.max_residual < 1e-10

    def test_two_members_same_point(self, chain):
        r = check_pappus_concurrency(build_pappus(OUTER, INNER, 2))
        assert r.artifacts["lines"] == 3 and r.artifacts["B"].dist(Point(1 / 3, 0)) < 1e-12

    def test_steiner_rejected(self):
        with pytest.raises(WrongKind):
            check_pappus_concurrency(build_steiner_concentric(6))

    def test_ortho_circle(self, chain):
        r = check_ortho_circle(chain)
        c = r.artifacts["circle"]
        assert c.center.dist(Point(1 / 3, 0)) < 1e-10 and c.radius == pytest.approx(2 / 3, abs=1e-10)
        assert max(r.get("N[")) < 1e-9 and r.get("orth[0]")[0] < 1e-10 and r.get("A")[0] < 1e-12

    def test_ortho_circle_two_members(self):
        assert len(check_ortho_circle(build_pappus(OUTER, INNER, 2)).get("orth")) == 2

    def test_concurrency_centre_equals_tangent_lengths(self, chain):
        b = check_pappus_concurrency(chain).artifacts["B"]
        lengths = [b.dist(n) for n in chain.N]
        assert max(lengths) - min(lengths) < 1e-12


class TestVarpi:
    @pytest.mark.parametrize("i, j", [(0, 1), (0, 3), (4, 9)])
    def test_angle(self, chain, i, j):
        r = check_varpi_angle(chain, i, j)
        assert r.artifacts["angle"] == pytest.approx(math.atan(j - i))
        assert r.passed

    def test_membership_up_to_six_apart(self, chain):
        worst = max(check_varpi_angle(chain, i, j).get("M_j")[0]
                    for i in range(12) for j in range(i + 1, min(i + 7, 12)))
        assert worst < 1e-9

    def test_rejects_j_not_above_i(self, chain):
        with pytest.raises(IndexOutOfRange):
            check_varpi_angle(chain, 2, 2)


class TestOmega:
    def test_tangent_at_n0(self, chain):
        for i in (0, 1, 3):
            r = check_omega_tangency(chain, i, 0)
            assert r.passed, r.residuals
        assert check_omega_tangency(chain, 0, 0).artifacts["coincident"] == ["k_j"]
        assert check_omega_tangency(chain, 3, 0).artifacts["coincident"] == []

    def test_needs_next_member(self, chain):
        with pytest.raises(IndexOutOfRange):
            check_omega_tangency(chain, 0, 11)


class TestCenterConic:
    def test_omega_ellipse(self, chain):
        r = check_center_conic(chain, FamilySelector(Family.OMEGA, 1), "ellipse", X_AXIS)
        assert r.passed and r.artifacts["kind"] is ConicKind.ELLIPSE
        assert isinstance(r.artifacts["focal"], IncidenceReport)

    def test_ortho_cnn_hyperbola(self, ortho):
        r = check_center_conic(ortho, FamilySelector(Family.C_NN, 2, IndexRule.PAPPUS_PAIR), "hyperbola")
        assert r.passed and r.artifacts["kind"] is ConicKind.HYPERBOLA

    def test_counterexample_fails(self):
        shared = Circle(Point(2, 0), 1)
        pair = build_transplanted_pair(6, 3.0, 0.0, orthogonal_circle_at(Point(5, 1), shared))
        r = check_center_conic(pair, FamilySelector(Family.C_NN, 2, IndexRule.STEINER_CYCLIC))
        assert not r.passed and r.max_residual > 1e-3

    def test_too_short(self):
        with pytest.raises(BadCount):
            check_center_conic(build_pappus(OUTER, INNER, 6), FamilySelector(Family.OMEGA, 1))

    def test_collinear_centres_reported(self):
        pair = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(45))
        r = check_center_conic(pair, FamilySelector(Family.C_NN, 2, IndexRule.STEINER_CYCLIC))
        assert r.artifacts["rank_deficient"] and r.passed
        assert r.artifacts["kind"] is ConicKind.DEGENERATE_LINES

    def test_members_at_infinity(self):
        pair = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(60), None)
        r = check_center_conic(pair, FamilySelector(Family.C_NN, 2, IndexRule.STEINER_CYCLIC))
        assert r.artifacts["at_infinity"] and r.passed

    def test_members_at_infinity_after_post_inversion(self):
        from tangentchains.inversion import Inversion

        pair = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(60), Inversion(Point(7, 0), 1.0))
        r = check_center_conic(pair, FamilySelector(Family.C_MM, 2, IndexRule.STEINER_CYCLIC))
        assert r.artifacts["at_infinity"] and r.passed and not r.artifacts["rank_deficient"]

    def test_similarity_invariant(self):
        rot, k, shift = 0.7, 5.0, Point(-3, 11)

        def move(c):
            return Circle(c.center.rotate(rot) * k + shift, c.radius * k)

        a = build_pappus(OUTER, INNER, 12)
        b = build_pappus(move(OUTER), move(INNER), 12)
        for fam, kk in ((Family.OMEGA, 1), (Family.VARPI, 2), (Family.VARPI, 3)):
            ra = check_center_conic(a, FamilySelector(fam, kk), "ellipse")
            rb = check_center_conic(b, FamilySelector(fam, kk), "ellipse")
            assert ra.passed == rb.passed
            assert ra.artifacts["kind"] is rb.artifacts["kind"]


class TestCharacterization:
    """Measured behaviour worth pinning where it departs from the naive reading of the statements."""

    @staticmethod
    def varpi_threshold(k):
        # varpi'_{i,i-k} has radius (w/2) sqrt(k^2+1) in the strip frame; once that exceeds the
        # distance s_c from the inversion centre the image is a hyperbola: r < (q - 1) / (q + 1)
        q = math.sqrt(k * k + 1)
        return (q - 1) / (q + 1)

    def test_varpi_k3_kind_switches_with_inner_radius(self):
        assert self.varpi_threshold(3) == pytest.approx(0.5195, abs=1e-4)
        for r, kind in ((0.5, ConicKind.HYPERBOLA), (0.51, ConicKind.HYPERBOLA),
                        (0.53, ConicKind.ELLIPSE), (0.7, ConicKind.ELLIPSE)):
            rep = check_center_conic(pappus_with_inner(r), FamilySelector(Family.VARPI, 3))
            assert rep.passed and rep.artifacts["kind"] is kind, r

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_varpi_kind_follows_threshold(self, k):
        t = self.varpi_threshold(k)
        for r in (0.15, 0.3, 0.45, 0.6, 0.75):
            if abs(r - t) < 0.01:
                continue
            rep = check_center_conic(pappus_with_inner(r), FamilySelector(Family.VARPI, k))
            want = ConicKind.ELLIPSE if r > t else ConicKind.HYPERBOLA
            assert rep.passed and rep.artifacts["kind"] is want, (k, r)

    def test_cll_foci_on_bisector_only_for_k2(self):
        pair = build_orthogonal_pappus_pair(build_pappus(OUTER, INNER, 40))
        bis = common_chord_bisector(pair.first.outer, pair.second.outer)

        def worst(k):
            r = check_center_conic(pair, FamilySelector(Family.C_LL, k, IndexRule.PAPPUS_PAIR))
            return max(abs(bis.signed_distance(f)) for f in r.artifacts["foci"])

        assert worst(2) < 1e-9
        assert worst(1) > 1e-2


class TestPairConcyclic:
    def test_mirrored_cnn(self):
        pair = build_mirrored_steiner_pair(6, 3.0, 0.0, math.radians(60))
        assert check_pair_concyclic(pair, Family.C_NN, [(2, 4)]).max_residual < 1e-9

    def test_ortho_ci_with_companions(self, ortho):
        r = check_pair_concyclic(ortho, Family.C_I, [1])
        assert r.get("c_i[1]")[0] < 1e-9
        full = check_pair_concyclic(ortho, Family.C_I)
        assert full.passed and full.get("centres_collinear") and full.get("orth_W")

    def test_transplanted_cmm_fails(self):
        pair = build_transplanted_pair(6, 3.0, 0.0, orthogonal_circle_at(Point(5, 1), Circle(Point(2, 0), 1)))
        assert check_pair_concyclic(pair, Family.C_MM).max_residual > 1e-3

    def test_alias_families(self, ortho):
        a = check_pair_concyclic(ortho, Family.C_L)
        b = check_pair_concyclic(ortho, Family.C_LL)
        assert a.residuals == b.residuals

    def test_single_chain_family_rejected(self, ortho):
        with pytest.raises(WrongKind):
            check_pair_concyclic(ortho, Family.OMEGA)


def test_orthogonal_parents(ortho):
    r = check_orthogonal_parents(ortho)
    assert r.passed
    assert all(p.dist(Point(1, 0)) > 0.1 for p in r.artifacts["W1234"])


def test_collinearity_residual():
    assert collinearity_residual([Point(t, 2 * t + 1) for t in range(5)]) < 1e-15
    assert collinearity_residual([Point(0, 0), Point(1, 0), Point(0, 1)]) > 0.1


class TestAnnulus:
    def test_concentric(self):
        r = check_no_orthogonal_annulus(Circle(Point(0, 0), 1), Circle(Point(0, 0), 3))
        assert r.artifacts["gap"] == pytest.approx(8.0) and r.passed

    def test_offset_pair(self):
        r = check_no_orthogonal_annulus(Circle(Point(1, 0), 1), Circle(Point(0, 0), 4))
        assert r.artifacts["gap"] > 0 and r.passed

    def test_tangent_rejected(self):
        with pytest.raises(NotNested):
            check_no_orthogonal_annulus(Circle(Point(1, 0), 1), Circle(Point(0, 0), 2))


class TestLocus:
    def test_default(self):
        r = locus_lemma45(LocusProblem(1.0, 2.0, Point(0, 3), 1.0, Branch.PLUS), holdout=100, y_range=(-3, 3))
        assert r.passed and len(r.get("holdout")) == 100
        assert max(r.get("dual")) < 1e-10

    def test_axis_symmetry(self):
        r = locus_lemma45(LocusProblem(1.2, 1.5, Point(-0.7, 0.0), 1.3, Branch.MINUS))
        _, b, _, _, e, _ = r.artifacts["conic"].coefficients
        assert abs(b) < 1e-9 and abs(e) < 1e-9

    def test_branch_gap_shrinks_with_s(self):
        ratios = []
        for eps in (1e-4, 1e-8, 1e-12):
            d = 2.0 - eps
            plus = LocusProblem(d, 2.0, Point(0, 3), 1.0, Branch.PLUS)
            minus = LocusProblem(d, 2.0, Point(0, 3), 1.0, Branch.MINUS)
            gap = max(plus.formula_center(y).dist(minus.formula_center(y)) for y in np.linspace(-3, 3, 11))
            ratios.append(gap / plus.s)
        assert max(ratios) < 50 and max(ratios) / min(ratios) < 1.1

    def test_oracle_circle_cuts_chord(self):
        prob = LocusProblem(0.8, 1.5, Point(0, 3))
        for y in (-2.0, 0.0, 1.7):
            c = prob.oracle_circle(y)
            a = c.center
            h = (a.norm2() + 1 - c.radius ** 2) / (2 * a.norm())  # distance of the radical line from 0
            assert 2 * math.sqrt(1 - h * h) == pytest.approx(0.8, abs=1e-12)

    @pytest.mark.parametrize("kw", [dict(chord=0.0), dict(chord=2.0), dict(chord=-1.0)])
    def test_bad_chord(self, kw):
        with pytest.raises(BadChord):
            LocusProblem(line_offset=1.0, omega_center=Point(0, 3), **kw)

    def test_bad_offset_and_radius(self):
        with pytest.raises(GeometryError):
            LocusProblem(1.0, 0.0, Point(0, 3))
        with pytest.raises(GeometryError):
            LocusProblem(1.0, 1.0, Point(0, 3), 0.0)
