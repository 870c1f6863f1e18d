"""End-to-end tests of the report pipeline."""

import orjson
import pytest

from x1jacobi.analysis.recurrence import convergence_table, non_increasing
from x1jacobi.analysis.spectrum import q_range
from x1jacobi.core.config import RunConfig
from x1jacobi.reporting.pipeline import (
    construction_gates,
    identity_d_pairs,
    prepare,
    run_coefficients,
    run_identities,
    run_moments,
    run_recurrence,
    run_report,
    run_spectrum,
)

pytestmark = pytest.mark.integration


@pytest.fixture
def small_context(output_dir):
    return prepare(RunConfig(N_values=[10, 20], k_max=3, l_max=3, output_dir=output_dir))


class TestPrepare:
    def test_provenance(self, small_context, output_dir):
        assert orjson.loads((output_dir / "config.json").read_bytes())["N_values"] == [10, 20]
        darboux = orjson.loads((output_dir / "darboux.json").read_bytes())
        assert darboux["lambda_tilde"] == pytest.approx(-4.0)
        assert small_context.table_size == 106

    def test_identity_pairs(self, small_context):
        pairs = identity_d_pairs(small_context)
        assert [(float(a), float(b)) for a, b in pairs] == [(3.0, 1.0), (3.0, 2.0), (0.0, 1.0)]


class TestStages:
    def test_construction_gates_pass(self, small_context):
        gates = construction_gates(small_context)
        assert [g.name for g in gates] == [
            "riccati_residual",
            "pole_outside_interval",
            "gram_off_identity",
            "degree_n_plus_1",
            "ode_relative_residual",
            "ode_residual_nodes",
        ]
        assert all(g.passed for g in gates), [g.to_dict() for g in gates if not g.passed]

    def test_moments_and_spectrum(self, small_context, table, output_dir):
        moments = run_moments(small_context)
        reports = run_spectrum(small_context, table, moments)
        assert sorted(reports) == [10, 20]
        for l in range(4):
            assert moments.moments[(20, l)] == pytest.approx(reports[20].trace_full[l], rel=1e-6, abs=1e-6)
        for name in ("moments.csv", "density.csv", "raw_moments.csv", "spectrum_N10.csv", "trace_N20.csv"):
            assert (output_dir / name).exists()

    def test_identities_without_context(self):
        results = run_identities(k_max_s=3, k_max_c=2, k_max_qq=3, k_max_S=3)
        assert all(r.passed for r in results)


@pytest.mark.slow
class TestReport:
    def test_summary(self, small_context, output_dir):
        result = run_report(small_context)
        summary = orjson.loads(result.summary_path.read_bytes())
        names = {gate["name"] for gate in summary["gates"]}
        assert {"bqa_cross_check", "trace_path_oracle", "cross_module_trace", "identity_c_closed"} <= names
        assert summary["all_passed"] == result.passed
        assert summary["c"] == pytest.approx(-3.0)
        gates = {g.name: g for g in result.gates}
        for name in ("riccati_residual", "band_symmetry", "bqa_cross_check", "trace_path_oracle", "cross_module_trace"):
            assert gates[name].passed, gates[name].to_dict()


DYADIC_N = [50, 100, 200, 400]
U_LIMITS = (0.25, 1.5, 0.125)


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    """Every stage at the default configuration, computed once for the module."""
    ctx = prepare(RunConfig(output_dir=tmp_path_factory.mktemp("default_run")))
    run_coefficients(ctx)
    table = run_recurrence(ctx)
    moments = run_moments(ctx)
    reports = run_spectrum(ctx, table, moments)
    return ctx, table, moments, reports


@pytest.mark.slow
class TestDefaultConfiguration:
    def test_defaults_are_dyadic(self, default_run):
        ctx, *_ = default_run
        assert ctx.N_values == DYADIC_N
        assert (ctx.config.k_max, ctx.config.l_max) == (6, 5)

    def test_band_limits(self, default_run):
        _, table, _, _ = default_run
        rows = convergence_table(table, DYADIC_N)
        final = rows[-1]
        assert final.n == 400
        for j in range(3):
            assert abs(final.u[2 + j] - U_LIMITS[j]) < 0.05
            assert abs(final.u[2 - j] - U_LIMITS[j]) < 0.05
            assert non_increasing([row.deviations[j] for row in rows]), [row.deviations[j] for row in rows]

    def test_christoffel_moments(self, default_run):
        _, _, moments, _ = default_run
        for k in range(1, 7):
            series = [moments.deviation(N, k) for N in DYADIC_N]
            assert non_increasing(series), (k, series)
            assert moments.relative_deviation(400, k) < 0.05
        assert all(abs(moments.mass(N) - 1.0) < 1e-8 for N in DYADIC_N)

    def test_trace_gaps(self, default_run):
        _, _, _, reports = default_run
        for l in range(1, 6):
            gaps = [reports[N].gaps[l] for N in (100, 200, 400)]
            assert non_increasing(gaps, slack=1e-12), (l, gaps)
            assert all(reports[N].gaps[l] <= reports[N].bounds[l] for N in (100, 200, 400))
        assert max(reports[N].gaps[1] for N in DYADIC_N) <= 1e-8

    def test_pulled_back_moments(self, default_run):
        _, _, moments, reports = default_run
        for l in range(1, 5):
            series = [reports[N].pullback_gap[l] for N in DYADIC_N]
            if l > 1:
                assert non_increasing(series, slack=1e-12), (l, series)
            for N in DYADIC_N:
                assert moments.moments[(N, l)] == pytest.approx(reports[N].trace_full[l], rel=1e-6, abs=1e-6)

    def test_kolmogorov_distance(self, default_run):
        _, _, _, reports = default_run
        distances = [reports[N].cdf.distance for N in (100, 200, 400)]
        retained = [reports[N].cdf.retained_fraction for N in (100, 200, 400)]
        assert non_increasing(distances), distances
        assert retained == sorted(retained)
        assert retained[-1] >= 0.9

    def test_eigenvalues_near_q_range(self, default_run):
        ctx, _, _, reports = default_run
        lo, hi = q_range(ctx.basis.darboux)
        z = reports[50].z
        assert lo - 0.5 <= z[0] and z[-1] <= hi + 0.5

    def test_report_is_byte_identical(self, default_run):
        ctx, *_ = default_run
        first = run_report(ctx)
        snapshot = {path.name: path.read_bytes() for path in ctx.output_dir.iterdir()}
        second = run_report(ctx)
        assert {path.name: path.read_bytes() for path in ctx.output_dir.iterdir()} == snapshot
        assert "summary.json" in snapshot and "spectrum_N400.csv" in snapshot
        assert [g.to_dict() for g in first.gates] == [g.to_dict() for g in second.gates]
        summary = orjson.loads(snapshot["summary.json"])
        assert summary["all_passed"], [g for g in summary["gates"] if not g["pass"]]
