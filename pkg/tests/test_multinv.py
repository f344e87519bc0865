import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import radixtile as rt
from radixtile.errors import CloudTooLarge, EmptySet, NonTerminating, NotACrs
from radixtile.multinv import (
    all_strings_automaton,
    follows_rule_automaton,
    last_digit_automaton,
    zero_only_automaton,
)

from conftest import gauss_system


class TestDigitDropMaps:
    def test_decimal(self, base10):
        assert rt.phi(base10, (905,)) == (90,)
        assert rt.psi(base10, (905,)) == (5,)

    def test_zero(self, base10):
        assert rt.phi(base10, (0,)) == (0,)
        assert rt.psi(base10, (0,)) == (0,)

    def test_round_trip_consistency(self):
        sys = rt.companion_system([2, 2], [0, 1])  # base -1+i
        ok, _ = rt.is_number_system(sys)
        assert ok
        import random

        rng = random.Random(9)
        for _ in range(20):
            v = (rng.randint(-6, 6), rng.randint(-6, 6))
            digits = rt.discrete_expansion(sys, v)
            phi_v = rt.phi(sys, v)
            # dividing then re-appending the dropped digit recovers v
            rebuilt = rt.evaluate_expansion(sys, (digits[0],) + rt.discrete_expansion(sys, phi_v))
            assert rebuilt == v

    def test_nonterminating(self, twin_two):
        with pytest.raises(NonTerminating):
            rt.phi(twin_two, (-1, 1))


class TestInvarianceChecks:
    def test_digit_restriction_closed(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        assert rt.check_invariance(base3_full, auto) == (True, True)

    @given(st.sets(st.integers(0, 9), min_size=1))
    @settings(max_examples=30, deadline=None)
    def test_any_restriction_closed(self, allowed):
        sys = rt.RadixSystem(((10,),), tuple((d,) for d in range(10)))
        auto = rt.digit_restriction_automaton(sys, [(d,) for d in allowed])
        assert rt.check_invariance(sys, auto) == (True, True)

    def test_follows_rule_closed(self, base3_full):
        auto = follows_rule_automaton(base3_full, (2,), (1,))
        assert rt.check_invariance(base3_full, auto) == (True, True)

    def test_fixed_last_digit_not_psi_closed(self, base3_full):
        auto = last_digit_automaton(base3_full, (2,))
        phi_ok, psi_ok = rt.check_invariance(base3_full, auto)
        assert not psi_ok

    def test_zero_only(self, base3_full):
        assert rt.check_invariance(base3_full, zero_only_automaton(base3_full)) == (True, True)

    def test_crs_required(self):
        sys = rt.RadixSystem(((3,),), ((0,), (2,)))
        with pytest.raises(NotACrs):
            rt.check_invariance(sys, zero_only_automaton(sys))


class TestClouds:
    def test_cantor_approximants(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        cloud = rt.xk_cloud(base3_full, auto, 3)
        expected = {
            (Fraction(a) / 3 + Fraction(b) / 9 + Fraction(c) / 27,)
            for a in (0, 2)
            for b in (0, 2)
            for c in (0, 2)
        }
        assert cloud == expected

    def test_everything_automaton(self, base3_full):
        cloud = rt.xk_cloud(base3_full, all_strings_automaton(base3_full), 2)
        assert cloud == {(Fraction(v, 9),) for v in range(9)}

    def test_zero_only_cloud(self, base3_full):
        assert rt.xk_cloud(base3_full, zero_only_automaton(base3_full), 4) == {(Fraction(0),)}

    def test_cap(self, base3_full):
        with pytest.raises(CloudTooLarge):
            rt.xk_cloud(base3_full, all_strings_automaton(base3_full), 9, cap=100)


class TestDistances:
    def test_identical(self):
        assert rt.hausdorff_distance([(0.0, 0.0)], [(0.0, 0.0)]) == 0.0

    def test_half(self):
        assert rt.hausdorff_distance([(0.0,)], [(0.0,), (0.5,)]) == 0.5

    def test_empty_rejected(self):
        with pytest.raises(EmptySet):
            rt.hausdorff_distance([], [(0.0,)])

    def test_torus_wraparound(self):
        assert rt.torus_distance((Fraction(9, 10),), (Fraction(1, 20),)) == pytest.approx(0.15)

    @given(
        st.lists(st.fractions(0, 1), min_size=2, max_size=2),
        st.lists(st.fractions(0, 1), min_size=2, max_size=2),
        st.lists(st.fractions(0, 1), min_size=2, max_size=2),
    )
    @settings(max_examples=150, deadline=None)
    def test_metric_axioms(self, x, y, z):
        x = tuple(a % 1 for a in x)
        y = tuple(a % 1 for a in y)
        z = tuple(a % 1 for a in z)
        dxy = rt.torus_distance(x, y)
        assert dxy == pytest.approx(rt.torus_distance(y, x), abs=1e-12)
        if x == y:
            assert dxy == pytest.approx(0.0, abs=1e-12)
        assert rt.torus_distance(x, z) <= dxy + rt.torus_distance(y, z) + 1e-12


class TestConvergence:
    def test_cantor_rates_and_bounds(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        report = rt.convergence_report(base3_full, auto, 10)
        assert report.phi_closed
        for row in report.rows:
            assert row.measured <= row.bound
            assert row.bound <= 3.0 ** (-row.k) * 2.000001
        for row in report.rows[1:]:
            assert 0.30 <= row.ratio_to_prev <= 0.36

    def test_full_digit_decay(self, base3_full):
        report = rt.convergence_report(base3_full, all_strings_automaton(base3_full), 6)
        for row in report.rows[1:]:
            assert row.ratio_to_prev == pytest.approx(1 / 3, abs=0.05)

    def test_zero_only_all_zero(self, base3_full):
        report = rt.convergence_report(base3_full, zero_only_automaton(base3_full), 5)
        assert all(row.measured == 0.0 for row in report.rows)

    def test_bound_never_violated_for_ell_beyond_k(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        clouds = {k: rt.xk_cloud(base3_full, auto, k) for k in range(1, 9)}
        from radixtile.multinv import _tail_bound

        for k in range(1, 8):
            bound = base3_full.max_digit_norm() * _tail_bound(base3_full, k)
            for ell in range(k, 9):
                assert rt.hausdorff_distance(clouds[k], clouds[ell]) <= bound + 1e-12

    def test_csv_shape(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        text = rt.convergence_report(base3_full, auto, 3).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "k,measured,bound,ratio_to_prev"
        assert len(lines) == 4


class TestTorusInvariance:
    def test_digit_restriction_passes(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        for k in range(2, 9):
            assert rt.torus_invariance_check(base3_full, auto, k)

    def test_zero_only(self, base3_full):
        assert rt.torus_invariance_check(base3_full, zero_only_automaton(base3_full), 3)

    def test_psi_open_set_fails(self, base3_full):
        auto = last_digit_automaton(base3_full, (2,))
        assert not rt.torus_invariance_check(base3_full, auto, 3)

    def test_gauss_system(self):
        sys = gauss_system(2)
        auto = rt.digit_restriction_automaton(sys, [(0, 0), (2, 0)])
        assert rt.check_invariance(sys, auto) == (True, True)
        assert rt.torus_invariance_check(sys, auto, 4)


class TestAutomatonJson:
    def test_round_trip(self, base3_full):
        auto = rt.digit_restriction_automaton(base3_full, [(0,), (2,)])
        again = rt.DigitAutomaton.from_json(auto.to_json())
        assert again == auto
