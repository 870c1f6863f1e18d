"""Tests for the exact lattice-path engine and its closed forms."""

from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from x1jacobi.combinatorics.paths import (
    PathModel,
    S_bruteforce,
    S_closed,
    S_model,
    S_sum,
    arcsine_Q_moment,
    arcsine_Q_moment_binomial,
    brute_force_sum,
    c_closed,
    displacement_profile,
    five_step_model,
    iter_paths,
    level_weighted_sum,
    limit_weight,
    s_closed,
    s_half,
    three_step_model,
    transfer_sum,
    wallis_moment,
)
from x1jacobi.core.exceptions import GuardExceededError, ParameterError

HALF, THIRD = Fraction(1, 2), Fraction(1, 3)

rationals = st.fractions(min_value=-2, max_value=2, max_denominator=9)


class TestEnumeration:
    def test_nine_paths(self):
        assert brute_force_sum(three_step_model(2, 0, HALF, THIRD)) == Fraction(11, 18)

    def test_empty_path(self):
        assert brute_force_sum(three_step_model(0, 0, HALF, THIRD)) == 1
        assert brute_force_sum(three_step_model(0, 1, HALF, THIRD)) == 0

    def test_unreachable_displacement(self):
        assert brute_force_sum(five_step_model(2, (1, 1, 1), j=5)) == 0

    def test_lexicographic_order(self):
        paths = [path for path, _ in iter_paths(three_step_model(2, 0, 1, 1))]
        assert paths == [(-1, 1), (0, 0), (1, -1)]

    def test_guard(self):
        with pytest.raises(GuardExceededError):
            brute_force_sum(five_step_model(6, (1, 1, 1)), guard=1000)

    def test_floor_and_ceiling(self):
        model = PathModel({-1: 1, 0: 1, 1: 1}, 2, 0, floor=0, ceiling=1)
        assert brute_force_sum(model) == 1

    def test_level_weights(self):
        model = PathModel({-1: 0, 0: 0, 1: 0}, 2, 0, floor=0, level_weight=lambda level, step: float(level + 1))
        # paths (0, 0) and (1, -1) from level 0: 1 * 1 + 1 * 2
        assert level_weighted_sum(model) == 3.0

    def test_level_weights_required(self):
        with pytest.raises(ParameterError):
            level_weighted_sum(three_step_model(2, 0, 1, 1))

    def test_invalid_model(self):
        with pytest.raises(ParameterError):
            PathModel({}, 2)
        with pytest.raises(ParameterError):
            PathModel({0: 1}, -1)


class TestTransfer:
    def test_matches_enumeration_with_floor(self):
        model = PathModel({-2: 1, -1: 2, 0: 3, 1: 2, 2: 1}, 6, 0, floor=0, ceiling=4, start=1)
        assert transfer_sum(model) == brute_force_sum(model)

    @settings(max_examples=40, deadline=None)
    @given(k=st.integers(0, 6), u0=rationals, u1=rationals, u2=rationals, j=st.integers(-3, 3))
    def test_five_step_property(self, k, u0, u1, u2, j):
        model = five_step_model(k, (u0, u1, u2), j)
        assert transfer_sum(model) == brute_force_sum(model)


class TestClosedForms:
    def test_s_two_steps(self):
        assert s_closed(2, 0, HALF, THIRD) == THIRD**2 + 2 * HALF**2

    def test_s_unit_weights(self):
        assert s_closed(3, 1, HALF, 0) == Fraction(3, 8)

    def test_s_empty_range(self):
        assert s_closed(2, 3, HALF, THIRD) == 0

    @pytest.mark.parametrize("k, j, expected", [(2, 0, Fraction(1, 2)), (5, 2, 0), (4, 4, Fraction(1, 16))])
    def test_s_half(self, k, j, expected):
        assert s_half(k, j) == expected

    @settings(max_examples=30, deadline=None)
    @given(k=st.integers(0, 7), a=rationals, b=rationals)
    def test_s_matches_profile(self, k, a, b):
        profile = displacement_profile(three_step_model(k, 0, a, b))
        for j in range(-k, k + 1):
            assert s_closed(k, j, a, b) == profile.get(j, 0)

    def test_c_small_orders(self):
        d0, d1 = Fraction(3), Fraction(1)
        assert c_closed(0, d0, d1) == 1
        assert c_closed(1, d0, d1) == d1 / 4
        assert c_closed(2, d0, d1) == 3 * d1**2 / 32 + d0**2 / 2

    @settings(max_examples=20, deadline=None)
    @given(k=st.integers(0, 5), d0=rationals, d1=rationals)
    def test_c_matches_five_step_paths(self, k, d0, d1):
        assert c_closed(k, d0, d1) == brute_force_sum(five_step_model(k, (d1 / 4, d0 / 2, d1 / 8)))

    @pytest.mark.parametrize("l, expected", [(0, 1), (2, Fraction(1, 2)), (3, 0), (4, Fraction(3, 8))])
    def test_wallis(self, l, expected):
        assert wallis_moment(l) == expected

    def test_Q_moments(self):
        d0, d1 = Fraction(3), Fraction(1)
        assert arcsine_Q_moment(0, d0, d1) == 1
        assert arcsine_Q_moment(1, d0, d1) == Fraction(1, 4)
        assert arcsine_Q_moment(2, d0, d1) == Fraction(3, 32) + Fraction(9, 2)
        for k in range(8):
            assert arcsine_Q_moment(k, d0, d1) == arcsine_Q_moment_binomial(k, d0, d1) == c_closed(k, d0, d1)

    def test_negative_order(self):
        with pytest.raises(ParameterError):
            c_closed(-1, 1, 1)


class TestS:
    @pytest.mark.parametrize("k, i, expected", [(2, 1, 2), (2, 0, Fraction(3, 2)), (0, 0, 1)])
    def test_values(self, k, i, expected):
        assert S_closed(k, i) == expected
        assert S_bruteforce(k, i) == expected

    def test_triple_sum(self):
        for k in range(9):
            for i in range(k // 2 + 1):
                assert S_sum(k, i) == S_closed(k, i)

    def test_transfer_beyond_limit(self):
        assert S_bruteforce(7, 2, limit=10) == S_closed(7, 2)

    def test_model_counts_unit_steps(self):
        assert S_model(3, 1).unit_steps == 2

    @pytest.mark.parametrize("k, i, placements, path_sum", [(2, 1, 1, 2), (3, 1, 3, 9), (4, 1, 6, 30)])
    def test_path_sum_counts_unit_step_placements(self, k, i, placements, path_sum):
        assert brute_force_sum(S_model(k, i)) == path_sum
        assert S_bruteforce(k, i) * placements == path_sum

    def test_index_range(self):
        with pytest.raises(ParameterError):
            S_closed(3, 2)


class TestLimitWeight:
    def test_linear_btilde(self):
        d = [Fraction(3), Fraction(1)]
        assert [limit_weight(j, d) for j in range(4)] == [Fraction(1, 4), Fraction(3, 2), Fraction(1, 8), 0]
