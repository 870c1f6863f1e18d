"""
Performance tests for the x1jacobi stages.
"""

import time
from fractions import Fraction

import pytest

from x1jacobi.analysis.recurrence import build_table
from x1jacobi.analysis.spectrum import analyze
from x1jacobi.combinatorics.identities import suite_c, suite_S, suite_s
from x1jacobi.monitoring import PerformanceMonitor, get_memory_usage

pytestmark = pytest.mark.performance

D_PAIRS = [(Fraction(3), Fraction(1)), (Fraction(3), Fraction(2)), (Fraction(0), Fraction(1))]


class TestIdentityPerformance:
    """Exact suites at their default length bounds."""

    def test_s_suite(self):
        start = time.perf_counter()
        assert suite_s(10).passed
        duration = time.perf_counter() - start
        assert duration < 10.0, f"s suite took {duration:.2f}s, expected < 10s"

    def test_c_suite(self):
        start = time.perf_counter()
        assert suite_c(D_PAIRS, 8).passed
        duration = time.perf_counter() - start
        assert duration < 45.0, f"c suite took {duration:.2f}s, expected < 45s"

    def test_S_suite(self):
        start = time.perf_counter()
        assert suite_S(12).passed
        duration = time.perf_counter() - start
        assert duration < 60.0, f"S suite took {duration:.2f}s, expected < 60s"


class TestNumericPerformance:
    def test_band_table(self, basis):
        start = time.perf_counter()
        table = build_table(basis, 200)
        duration = time.perf_counter() - start
        assert table.n_max == 200
        assert duration < 30.0, f"200-row band table took {duration:.2f}s"

    def test_spectrum(self, basis, benchmark):
        table = build_table(basis, 120)
        report = benchmark(analyze, table, basis.darboux, 100, 5)
        assert report.N == 100


class TestMonitoring:
    def test_stage_overhead(self):
        monitor = PerformanceMonitor()
        start = time.perf_counter()
        for _ in range(1000):
            with monitor.measure("noop"):
                pass
        duration = time.perf_counter() - start
        assert monitor.get_performance_report()["stages"]["noop"]["call_count"] == 1000
        assert duration < 5.0

    def test_memory_usage(self):
        usage = get_memory_usage()
        assert usage["rss_mb"] > 0
