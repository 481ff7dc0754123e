"""Tests for extreme-cycle enumeration."""

import itertools

import numpy as np
import pytest

from fractal_onb.cycle_finder import (
    ExtremeCycle,
    candidate_interval,
    cycle_fixed_point,
    cycle_orbit,
    find_extreme_cycles,
)
from fractal_onb.errors import NotASpectrum
from fractal_onb.ifs_measure import AffineIFS1D, mask


class TestCandidateInterval:
    def test_cantor_spectrum(self):
        assert candidate_interval([0, 0.75], 3) == (0.0, 0.375)

    def test_doubling(self):
        assert candidate_interval([0, 1], 2) == (0.0, 1.0)

    def test_single_point(self):
        assert candidate_interval([0], 5) == (0.0, 0.0)


class TestCycleFixedPoint:
    def test_zero_word(self):
        assert cycle_fixed_point([0], 3) == 0.0

    def test_one_at_doubling(self):
        # c = (c + 1) / 2  =>  c = 1
        assert cycle_fixed_point([1], 2) == pytest.approx(1.0)

    def test_three_quarters(self):
        # c = (c + 3/4) / 3  =>  c = 3/8
        assert cycle_fixed_point([0.75], 3) == pytest.approx(0.375)

    def test_orbit_satisfies_recursion(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = rng.integers(1, 6)
            letters = rng.choice([0.0, 1.0], size=p)
            R = float(rng.uniform(1.5, 4.0))
            orbit = cycle_orbit(letters, R)
            for k in range(p):
                nxt = orbit[(k + 1) % p]
                assert (orbit[k] + letters[k]) / R == pytest.approx(nxt, abs=1e-12)


class TestFindExtremeCycles:
    def test_cantor_only_zero(self):
        cycles = find_extreme_cycles([0, 2], [0, 0.75], 3, p_max=6)
        assert len(cycles) == 1
        assert cycles[0].points == (0.0,)
        assert cycles[0].letters == (0.0,)

    def test_doubling_zero_and_one(self):
        cycles = find_extreme_cycles([0, 1], [0, 1], 2, p_max=6)
        assert [c.points for c in cycles] == [(0.0,), (1.0,)]
        assert [c.letters for c in cycles] == [(0.0,), (1.0,)]

    def test_scale_four_only_zero(self):
        # the candidate c = 1/3 has mask modulus 1/2, far from extreme
        cycles = find_extreme_cycles([0, 2], [0, 1], 4, p_max=8)
        assert [c.points for c in cycles] == [(0.0,)]
        ifs = AffineIFS1D(4, [0, 2])
        assert abs(mask(ifs, 1.0 / 3.0)) == pytest.approx(0.5, abs=1e-12)

    def test_not_a_spectrum(self):
        with pytest.raises(NotASpectrum):
            find_extreme_cycles([0, 2], [0, 0.5], 3)

    def test_p_max_one_matches_larger_horizon(self):
        small = find_extreme_cycles([0, 1], [0, 1], 2, p_max=1)
        large = find_extreme_cycles([0, 1], [0, 1], 2, p_max=12)
        assert small == large

    def test_independent_reverification(self):
        # re-check every reported cycle at a tighter tolerance
        for B, L, R in ([0, 2], [0, 0.75], 3), ([0, 1], [0, 1], 2):
            ifs = AffineIFS1D(R, B)
            for cyc in find_extreme_cycles(B, L, R, p_max=8, tol=1e-9):
                p = cyc.period
                for k in range(p):
                    nxt = (cyc.points[k] + cyc.letters[k]) / R
                    assert nxt == pytest.approx(cyc.points[(k + 1) % p], abs=1e-10)
                    assert abs(mask(ifs, cyc.points[k])) >= 1.0 - 1e-10

    def test_points_in_candidate_interval(self):
        for B, L, R in ([0, 2], [0, 0.75], 3), ([0, 1], [0, 1], 2), ([0, 2], [0, 1], 4):
            lo, hi = candidate_interval(L, R)
            for cyc in find_extreme_cycles(B, L, R, p_max=8):
                assert all(lo - 1e-12 <= c <= hi + 1e-12 for c in cyc.points)

    def test_digit_products_are_integers(self):
        for B, L, R in ([0, 2], [0, 0.75], 3), ([0, 1], [0, 1], 2), ([0, 2], [0, 1], 4):
            for cyc in find_extreme_cycles(B, L, R, p_max=8):
                for c in cyc.points:
                    for b in B:
                        assert abs(b * c - round(b * c)) < 1e-9

    def test_order_independent_of_letter_order(self):
        a = find_extreme_cycles([0, 1], [0, 1], 2, p_max=6)
        b = find_extreme_cycles([0, 1], [1, 0], 2, p_max=6)
        assert a == b

    def test_serialization(self):
        cyc = ExtremeCycle(points=(0.0,), letters=(0.0,))
        assert cyc.to_dict() == {"points": [0.0], "letters": [0.0], "period": 1}
