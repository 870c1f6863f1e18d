"""Tests for the projected multiplication operator and its spectrum."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import kstest

from x1jacobi.analysis.christoffel import ARCSINE
from x1jacobi.analysis.spectrum import (
    analyze,
    build_JN,
    cdf_compare,
    eigenvalues,
    gershgorin_interval,
    level_path_oracle,
    moment_gap,
    pull_back,
    q_range,
    rescale_to_range,
    theoretical_bound,
    trace_moment_full,
    trace_moment_proj,
    trace_power,
)
from x1jacobi.core.exceptions import CoverageError, InputValidationError


class TestBandMatrix:
    def test_one_by_one(self, table):
        J = build_JN(table, 1)
        assert_allclose(J.dense(), [[table.entry(0, 0)]])
        assert_allclose(eigenvalues(J), [table.entry(0, 0)])

    def test_two_by_two(self, table):
        J = build_JN(table, 2)
        a, b, c = table.entry(0, 0), table.entry(1, 0), 0.5 * (table.entry(0, 1) + table.entry(1, -1))
        disc = np.sqrt((a - b) ** 2 / 4 + c * c)
        expected = sorted([(a + b) / 2 - disc, (a + b) / 2 + disc])
        assert_allclose(eigenvalues(J), expected, rtol=1e-12)

    def test_symmetric_five_diagonal(self, table):
        M = build_JN(table, 12).dense()
        assert_allclose(M, M.T)
        assert np.all(np.triu(M, 3) == 0)

    def test_coverage(self, table):
        with pytest.raises(CoverageError):
            build_JN(table, table.n_max)

    @pytest.mark.parametrize("N", [1, 2, 20])
    def test_gershgorin_contains_spectrum(self, table, N):
        J = build_JN(table, N)
        lo, hi = gershgorin_interval(J)
        z = eigenvalues(J)
        assert lo <= z[0] and z[-1] <= hi


class TestTraceMoments:
    def test_order_zero(self, table):
        assert trace_moment_full(table, 10, 0) == 1.0
        assert trace_moment_proj(build_JN(table, 10), 0) == pytest.approx(1.0)

    def test_one_row(self, table):
        assert trace_moment_full(table, 1, 0) == 1.0
        assert_allclose(trace_moment_full(table, 1, 1), table.entry(0, 0), rtol=1e-14)
        assert_allclose(trace_power(build_JN(table, 1), 3), table.entry(0, 0) ** 3, rtol=1e-12)

    def test_order_one(self, table):
        expected = np.mean([table.entry(k, 0) for k in range(10)])
        assert_allclose(trace_moment_full(table, 10, 1), expected, rtol=1e-14)
        assert_allclose(trace_moment_proj(build_JN(table, 10), 1), expected, rtol=1e-12)

    @pytest.mark.parametrize("l", [2, 3, 4])
    def test_path_oracle_without_ceiling(self, table, l):
        value = trace_moment_full(table, 10, l)
        assert abs(level_path_oracle(table, 10, l, ceiling=False) - value) < 1e-10 * max(1.0, abs(value))

    @pytest.mark.parametrize("l", [2, 3, 4])
    def test_path_oracle_with_ceiling(self, table, l):
        value = trace_power(build_JN(table, 10), l)
        assert abs(level_path_oracle(table, 10, l, ceiling=True) - value) < 1e-10 * max(1.0, abs(value))
        assert_allclose(trace_moment_proj(build_JN(table, 10), l), value, rtol=1e-10)

    def test_gap_vanishes_for_one_step(self, table):
        gap, _ = moment_gap(table, 20, 1)
        assert gap < 1e-12

    def test_gap_within_bound(self, table):
        for l in (2, 3):
            gap, bound = moment_gap(table, 20, l)
            assert gap <= bound

    def test_bound(self):
        assert theoretical_bound(2, 0.5, 4) == 1.0


class TestPullBack:
    def test_round_trip(self, basis):
        darboux = basis.darboux
        assert_allclose(pull_back(darboux.Q(1.0), darboux), 1.0, atol=1e-12)
        assert_allclose(pull_back(darboux.Q(-1.0), darboux), -1.0, atol=1e-12)

    def test_complex_root_is_absent(self, basis):
        assert pull_back(-5.0, basis.darboux) is None

    def test_mirrored_branch(self, mirrored_basis):
        darboux = mirrored_basis.darboux
        assert_allclose(pull_back(darboux.Q(0.3), darboux), 0.3, atol=1e-12)

    def test_rescale(self, basis):
        lo, hi = q_range(basis.darboux)
        assert_allclose(rescale_to_range([0.0, 1.0], (0.0, 1.0), basis.darboux), [lo, hi])


class TestCdfCompare:
    def test_single_point(self):
        assert_allclose(cdf_compare([0.0]).distance, 0.5)

    def test_quantile_points(self):
        N = 50
        points = ARCSINE.ppf(np.arange(1, N + 1) / (N + 1))
        assert cdf_compare(list(points)).distance <= 1 / (N + 1) + 1e-12

    def test_matches_kstest(self):
        points = np.random.default_rng(7).uniform(-1, 1, 40)
        expected = kstest(points, ARCSINE.cdf).statistic
        assert_allclose(cdf_compare(list(points)).distance, expected, rtol=1e-12)

    def test_dropped_points(self):
        result = cdf_compare([0.0, None, 2.0, 0.5], normalization=4)
        assert result.retained_fraction == 0.5
        assert result.distance >= 0.5

    def test_nothing_retained(self):
        with pytest.raises(InputValidationError):
            cdf_compare([None, 3.0])


class TestAnalyze:
    def test_report(self, table, basis):
        report = analyze(table, basis.darboux, 20, 3)
        assert len(report.spectrum_rows()) == 20
        assert [row[0] for row in report.moment_rows()] == [0, 1, 2, 3]
        assert report.gaps[1] < 1e-12
        assert all(report.gaps[l] <= report.bounds[l] for l in range(1, 4))
        assert 0 < report.cdf.retained_fraction <= 1
        assert report.asymmetry < 1e-8

    @pytest.mark.parametrize("N", [1, 2])
    def test_smallest_sizes(self, table, basis, N):
        report = analyze(table, basis.darboux, N, 2)
        assert len(report.spectrum_rows()) == N
        assert report.trace_full[0] == 1.0
        assert_allclose(report.trace_direct[2], report.trace_proj[2], rtol=1e-12)
        assert all(report.in_range)
        if N == 1:
            assert_allclose(report.z, [table.entry(0, 0)])

    def test_pullback_moments_with_quadrature(self, table, basis):
        from x1jacobi.analysis.christoffel import moment_table

        moments = moment_table(basis, [20], 3)
        mu = {l: moments.moments[(20, l)] for l in range(4)}
        report = analyze(table, basis.darboux, 20, 3, mu)
        assert set(report.pullback_gap) == {0, 1, 2, 3}
        for l in range(4):
            assert_allclose(mu[l], report.trace_full[l], rtol=1e-6)
