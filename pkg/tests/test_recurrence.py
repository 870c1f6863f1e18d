"""Tests for the five-term recurrence of multiplication by Q."""

import math

import numpy as np
import pytest
import sympy
from numpy.polynomial import Polynomial
from numpy.testing import assert_allclose

from x1jacobi.analysis.recurrence import (
    CONVERGENCE_COLUMNS,
    Q_poly,
    asymptotic_U,
    asymptotic_U_general,
    attach_cross_check,
    compute_u,
    convergence_table,
    corollary_b_check,
    is_in_stabilizer,
    non_increasing,
    stabilizer_expansion,
)
from x1jacobi.core.exceptions import CoverageError, ParameterError
from x1jacobi.polynomials.darboux import X


class TestStabilizer:
    def test_Q_is_member(self, basis):
        assert is_in_stabilizer(Q_poly(basis.darboux), basis.darboux)

    def test_x_is_not_member(self, basis):
        assert not is_in_stabilizer(Polynomial([0.0, 1.0]), basis.darboux)

    def test_Q_squared_is_member(self, basis):
        Q = Q_poly(basis.darboux)
        assert is_in_stabilizer(Q * Q, basis.darboux)

    def test_constants_are_members(self, basis):
        assert is_in_stabilizer(sympy.Poly(7, X), basis.darboux)

    def test_Q_squared_gives_nine_terms(self, basis):
        Q = Q_poly(basis.darboux)
        coefficients = stabilizer_expansion(basis, Q * Q, 12, 5)
        assert abs(coefficients[5]) < 1e-10
        assert abs(coefficients[-5]) < 1e-10
        assert abs(coefficients[4]) > 1e-3


class TestLimits:
    def test_level_step(self):
        assert asymptotic_U(0, 3, 1) == 0.25

    def test_far_step(self):
        assert asymptotic_U(-2, 3, 1) == 0.125

    def test_near_step(self):
        assert asymptotic_U(1, 3, 1) == 1.5

    def test_beyond_band(self):
        assert asymptotic_U(3, 3, 1) == 0.0

    def test_general_degree(self):
        # btilde = x: only the degree-one term contributes
        assert asymptotic_U_general(0, [0, 1]) == asymptotic_U(0, 0, 1)
        # btilde = x^2 gives a seven-term limit
        assert asymptotic_U_general(3, [0, 0, 1]) > 0
        assert asymptotic_U_general(4, [0, 0, 1]) == 0


class TestTable:
    def test_five_term_truncation(self, table):
        assert table.truncation_defect() < 1e-8

    def test_symmetry(self, table):
        assert table.symmetry_defect() < 1e-8

    def test_expansion_residuals(self, table):
        assert np.max(table.residuals) < 1e-8

    def test_entry_below_zero_is_zero(self, table):
        assert table.entry(0, -1) == 0.0
        assert table.entry(1, -2) == 0.0

    def test_row_beyond_table(self, table):
        with pytest.raises(CoverageError):
            table.entry(table.n_max + 1, 0)

    def test_require_rows(self, table):
        table.require_rows(table.n_max + 1)
        with pytest.raises(CoverageError):
            table.require_rows(table.n_max + 2)

    def test_single_row_matches_table(self, basis, table):
        row = compute_u(basis, 7)
        assert_allclose([row.u[j] for j in range(-2, 3)], [table.entry(7, j) for j in range(-2, 3)], atol=1e-12)

    def test_limit_direction(self, table):
        U = table.U_limits
        assert U == (0.25, 1.5, 0.125)
        near = abs(table.entry(table.n_max - 2, 1) - U[1])
        early = abs(table.entry(5, 1) - U[1])
        assert near < early


class TestBandCrossCheck:
    @pytest.mark.parametrize("n", [2, 10])
    def test_discrepancy(self, basis, table, n):
        assert corollary_b_check(basis, n, table) < 1e-8

    def test_without_table(self, basis):
        assert corollary_b_check(basis, 5) < 1e-8

    @pytest.mark.slow
    def test_row_100(self, basis):
        assert corollary_b_check(basis, 100) < 1e-8

    def test_needs_two_rows_below(self, basis):
        with pytest.raises(ParameterError):
            corollary_b_check(basis, 1)

    def test_attached_gaps(self, basis, table):
        checked = attach_cross_check(basis, table, 2, 12)
        assert sorted(checked.cross_gap) == list(range(2, 13))
        assert max(checked.cross_gap.values()) < 1e-8
        assert (2, -2) in checked.a_cross


class TestConvergenceTable:
    def test_columns(self, table):
        rows = convergence_table(table, [10, 20])
        assert len(rows[0].as_tuple()) == len(CONVERGENCE_COLUMNS)

    def test_single_row(self, table):
        assert len(convergence_table(table, [30])) == 1

    def test_empty(self, table):
        assert convergence_table(table, []) == []

    def test_missing_gap_is_nan(self, table):
        assert math.isnan(convergence_table(table, [5])[0].as_tuple()[-1])

    def test_non_increasing(self):
        assert non_increasing([3.0, 2.0, 2.0, 1.0])
        assert not non_increasing([1.0, 2.0])
        assert non_increasing([1.0])
