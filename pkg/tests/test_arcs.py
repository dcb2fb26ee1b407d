import math
import random
from fractions import Fraction

import pytest

import digitlab.arcs as arcs_mod
from digitlab.arcs import (
    ArcClass,
    circle_pipeline,
    classify,
    coprime_excluded_count,
    dirichlet_approx,
    direct_count,
    kappa,
    singular_series,
    singular_series_pair_count,
    theorem_comparison,
)
from digitlab.digits import DigitSet, count_in_ap
from digitlab.errors import CapExceededError, DomainError
from digitlab.expsums import IntPolynomial, build_mangoldt

SQUARE = IntPolynomial((0, 0, 1))


class TestDirichletApprox:
    def test_exact_third(self):
        r = dirichlet_approx(1, 3, 10)
        assert (r.ell, r.d) == (1, 3)
        assert r.beta == 0.0

    def test_zero_numerator(self):
        r = dirichlet_approx(0, 81, 9)
        assert (r.ell, r.d) == (0, 1)
        assert r.beta == 0.0

    def test_fibonacci_convergent(self):
        r = dirichlet_approx(377, 610, 20)
        assert (r.ell, r.d) == (8, 13)
        assert abs(r.beta) <= 1.0 / (13 * 20)

    def test_postconditions_random(self):
        rng = random.Random(4)
        for _ in range(300):
            Q = rng.randrange(2, 10 ** 6)
            a = rng.randrange(Q)
            D0 = rng.randrange(1, 2000)
            r = dirichlet_approx(a, Q, D0)
            assert 1 <= r.d <= D0
            assert math.gcd(r.ell, r.d) == 1
            assert 0 <= r.ell <= r.d
            exact = Fraction(a, Q) - Fraction(r.ell, r.d)
            assert abs(exact) <= Fraction(1, r.d * D0)
            assert r.beta == pytest.approx(float(exact), abs=1e-15)

    def test_bad_inputs(self):
        with pytest.raises(DomainError):
            dirichlet_approx(1, 0, 5)
        with pytest.raises(DomainError):
            dirichlet_approx(1, 10, 0)


class TestClassify:
    def test_major_small_everything(self):
        r = dirichlet_approx(27, 81, 10)  # exactly 1/3, zero offset
        assert classify(r, 81, 3.0) is ArcClass.MAJOR

    def test_minor_by_denominator(self):
        r = dirichlet_approx(377, 610, 609)
        assert r.d > 20
        assert classify(r, 610, 1.0) is ArcClass.MINOR_DENOMINATOR

    def test_minor_by_offset(self):
        Q = 10 ** 6
        r = dirichlet_approx(500, Q, 3)
        # best approximation with d <= 3 is 0/1, so Q|beta| = 500
        assert r.d == 1
        assert Q * abs(r.beta) == pytest.approx(500.0)
        assert classify(r, Q, 1.0) is ArcClass.MINOR_OFFSET

    def test_boundary_is_minor(self, monkeypatch):
        monkeypatch.setattr(arcs_mod, "arc_threshold", lambda Q, A: 5.0)
        r = dirichlet_approx(1, 5, 5)  # d = 5 lands exactly on the threshold
        assert r.d == 5
        assert arcs_mod.classify(r, 5, 1.0) is ArcClass.MINOR_DENOMINATOR


class TestPipeline:
    @pytest.mark.parametrize("q,excluded,k", [
        (6, (5,), 3), (10, (7,), 3), (8, (0,), 3)])
    def test_mangoldt_pipeline_matches_direct(self, q, excluded, k):
        ds = DigitSet(q, excluded)
        table = build_mangoldt(q ** k)
        res = circle_pipeline(ds, k, table)
        direct = direct_count(ds, k, table)
        assert res.total == pytest.approx(direct, rel=1e-9)
        assert abs(res.imag) < 1e-6 * max(1.0, direct)

    def test_poly_pipeline_matches_direct(self):
        ds = DigitSet(10, (7,))
        res = circle_pipeline(ds, 3, SQUARE)
        direct = direct_count(ds, 3, SQUARE)
        assert res.total == pytest.approx(direct, rel=1e-9)

    def test_ledger_conservation_bit_for_bit(self):
        ds = DigitSet(10, (7,))
        table = build_mangoldt(10 ** 3)
        res = circle_pipeline(ds, 3, table, A_major=1.0)
        led = res.ledger
        assert complex(res.total, res.imag) == led.total
        assert led.total == (led.sums[ArcClass.MAJOR]
                             + led.sums[ArcClass.MINOR_DENOMINATOR]
                             + led.sums[ArcClass.MINOR_OFFSET])
        assert sum(led.counts.values()) == 10 ** 3

    def test_small_threshold_pushes_mass_minor(self):
        ds = DigitSet(10, (7,))
        table = build_mangoldt(10 ** 3)
        big = circle_pipeline(ds, 3, table, A_major=3.0).ledger
        tiny = circle_pipeline(ds, 3, table, A_major=0.5).ledger
        assert tiny.counts[ArcClass.MAJOR] < big.counts[ArcClass.MAJOR]
        # regrouping terms never changes the count of frequencies
        assert sum(tiny.counts.values()) == sum(big.counts.values())
        # nor the grand total
        assert tiny.total == pytest.approx(big.total, rel=1e-12)

    def test_cap(self):
        ds = DigitSet(10, (7,))
        with pytest.raises(CapExceededError):
            circle_pipeline(ds, 9, SQUARE, cap=10 ** 6)


class TestDirectCount:
    def test_mangoldt_k1(self):
        ds = DigitSet(10, (7,))
        table = build_mangoldt(10)
        # single-digit members: prime powers in {0,...,9} \ {7}
        expect = 3 * math.log(2) + 2 * math.log(3) + math.log(5)
        assert direct_count(ds, 1, table) == pytest.approx(expect)

    def test_poly_square_count(self):
        ds = DigitSet(10, (7,))
        # squares below 100: 0,1,4,9,16,25,36,49,64,81 -- none has a 7
        assert direct_count(ds, 2, SQUARE) == 10

    def test_short_table_rejected(self):
        ds = DigitSet(10, (7,))
        with pytest.raises(DomainError):
            direct_count(ds, 3, build_mangoldt(100))

    def test_unknown_weight(self):
        with pytest.raises(DomainError):
            direct_count(DigitSet(10, (7,)), 2, "squarefree")


class TestKappa:
    def test_coprime_exclusion(self):
        assert kappa(DigitSet(10, (7,))) == Fraction(5, 6)

    def test_noncoprime_exclusion(self):
        assert kappa(DigitSet(10, (0,))) == Fraction(10, 9)
        assert kappa(DigitSet(10, (5,))) == Fraction(10, 9)

    def test_two_exclusions(self):
        assert kappa(DigitSet(10, (3, 7))) == Fraction(5, 9)

    def test_sprime_counts(self):
        assert coprime_excluded_count(DigitSet(10, (7,))) == 1
        assert coprime_excluded_count(DigitSet(10, (0,))) == 0
        assert coprime_excluded_count(DigitSet(10, (3, 7))) == 2

    def test_residue_reconstruction(self):
        # summing the AP counts over allowed residues coprime to the base
        # gives (phi(q) - s') * (q - s)^(k-1)
        for excluded in [(7,), (0,), (3, 7)]:
            ds = DigitSet(10, excluded)
            k = 3
            phi, s = 4, len(excluded)
            sprime = coprime_excluded_count(ds)
            total = 0
            for r in range(10):
                if math.gcd(r, 10) == 1 and r not in excluded:
                    total += count_in_ap(ds, 10 ** k, k, 10, r)
            assert total == (phi - sprime) * (10 - s) ** (k - 1)


class TestSingularSeries:
    def test_square_level_one(self):
        assert singular_series(SQUARE, DigitSet(10, (7,)), 1) \
            == Fraction(10, 9)

    def test_identity_poly_raw_counts(self):
        ds = DigitSet(10, (7,))
        P = IntPolynomial((0, 1))
        for J in (1, 2, 3):
            assert singular_series_pair_count(P, ds, J) == 9 ** J
            assert singular_series(P, ds, J) == 1

    def test_levels_stabilise(self):
        ds = DigitSet(10, (7,))
        vals = [float(singular_series(SQUARE, ds, J)) for J in (1, 2, 3, 4)]
        gaps = [abs(b - a) for a, b in zip(vals, vals[1:])]
        assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))

    def test_cap(self):
        with pytest.raises(CapExceededError):
            singular_series_pair_count(SQUARE, DigitSet(10, (7,)), 8,
                                       cap=10 ** 6)


class TestTheoremComparison:
    def test_mangoldt_main_term(self):
        ds = DigitSet(10, (7,))
        rep = theorem_comparison(ds, 3, build_mangoldt(10 ** 3))
        assert rep.main_term == pytest.approx(float(Fraction(5, 6)) * 9 ** 3)
        assert rep.deviation == pytest.approx(
            abs(rep.direct - rep.main_term) / rep.main_term)
        assert rep.deviation < 0.25

    def test_poly_main_term(self):
        rep = theorem_comparison(DigitSet(10, (7,)), 4, SQUARE)
        assert rep.singular_series_value is not None
        assert rep.deviation < 0.25
