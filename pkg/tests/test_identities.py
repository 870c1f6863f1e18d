"""Tests for the exact identity suites."""

from fractions import Fraction

import pytest

from x1jacobi.combinatorics.identities import (
    first_counterexample,
    run_all,
    suite_c,
    suite_parity,
    suite_qq,
    suite_s,
    suite_S,
    suite_S_laws,
)
from x1jacobi.combinatorics.paths import c_closed
from x1jacobi.core.exceptions import GuardExceededError

D_PAIRS = [(Fraction(3), Fraction(1)), (Fraction(3), Fraction(2)), (Fraction(0), Fraction(1))]


class TestSuites:
    def test_s(self):
        result = suite_s(k_max=5)
        assert result.passed
        assert result.counterexample is None

    def test_parity(self):
        assert suite_parity(k_max=8).passed

    def test_c(self):
        assert suite_c(D_PAIRS, k_max=5).passed

    def test_c_unequal_leading_coefficient(self):
        result = suite_c([(Fraction(3), Fraction(2))], k_max=4)
        assert result.passed
        assert c_closed(2, 3, 2) == Fraction(39, 8)

    @pytest.mark.slow
    def test_c_full_length(self):
        assert suite_c([(Fraction(3), Fraction(1)), (Fraction(3), Fraction(2))], k_max=8).passed

    def test_qq(self):
        assert suite_qq(D_PAIRS, k_max=10).passed

    def test_S(self):
        assert suite_S(k_max=8).passed

    def test_S_laws(self):
        assert suite_S_laws(k_max=12).passed

    def test_summary(self):
        summary = suite_s(k_max=2).to_dict()
        assert summary["passed"] and summary["failures"] == 0
        assert summary["cells"] > 0


class TestFailurePath:
    def test_injected_weight_yields_path(self):
        result = suite_c(D_PAIRS, k_max=3, weights={2: Fraction(1, 3)})
        assert not result.passed
        counterexample = result.counterexample
        assert counterexample is not None
        assert counterexample.path is not None
        assert 2 in counterexample.path or -2 in counterexample.path
        assert "path" in counterexample.describe()

    def test_injected_new_step(self):
        result = suite_s(k_max=2, weights={3: Fraction(1)})
        assert not result.passed
        assert 3 in result.counterexample.path

    def test_first_counterexample_order(self):
        results = run_all(D_PAIRS, k_max_s=3, k_max_c=3, k_max_qq=3, k_max_S=4, weights={0: Fraction(5)})
        assert first_counterexample(results).suite == "s_closed"


class TestRunAll:
    def test_everything_passes(self):
        results = run_all(D_PAIRS, k_max_s=5, k_max_c=4, k_max_qq=6, k_max_S=6)
        assert all(result.passed for result in results)
        assert first_counterexample(results) is None

    def test_guard_checked_first(self):
        with pytest.raises(GuardExceededError):
            run_all(D_PAIRS, k_max_s=3, k_max_c=12)

    @pytest.mark.slow
    def test_default_bounds(self):
        results = run_all(D_PAIRS)
        assert all(result.passed for result in results)
