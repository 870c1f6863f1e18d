"""
Pipeline orchestration: every command builds a RunContext, runs its stages and writes
its tables into the output directory.

The report stage evaluates the acceptance gates and writes summary.json. Stage timings
stay in the performance monitor and never enter result files.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..analysis.christoffel import (
    DENSITY_COLUMNS,
    MOMENT_COLUMNS,
    RAW_COLUMNS,
    ChristoffelReport,
    density_samples,
    moment_table,
    raw_moments,
)
from ..analysis.recurrence import (
    BAND,
    CONVERGENCE_COLUMNS,
    J_MAX,
    ConvergenceRow,
    RecurrenceTable,
    attach_cross_check,
    build_table,
    convergence_table,
    non_increasing,
)
from ..analysis.spectrum import (
    CDF_COLUMNS,
    SPECTRUM_COLUMNS,
    TRACE_COLUMNS,
    SpectralReport,
    analyze,
    level_path_oracle,
)
from ..combinatorics.identities import SuiteResult, first_counterexample, run_all
from ..core.config import RunConfig, settings
from ..monitoring import performance_monitor
from ..polynomials.exceptional import (
    ExceptionalBasis,
    build_basis,
    exceptional_polynomial,
    gram_matrix,
    ode_residual,
    ode_residual_nodes,
)
from ..polynomials.jacobi import JacobiParams, coefficient_table
from ..polynomials.quadrature import gauss_rule
from ..utils.cache import ResultCache
from ..utils.logging import get_logger
from .writers import ensure_output_dir, write_json, write_table

logger = get_logger(__name__)

COEFFICIENT_COLUMNS = ("n", "a_n", "b_n", "A_n", "B_n", "C_n")

# Rows and sample sizes of the exact-construction checks.
GRAM_DEGREE = 50
ODE_DEGREE = 30
ODE_POINTS = np.linspace(-0.95, 0.95, 20)
ODE_NODES = 40
CROSS_CHECK_ROWS = (BAND, 100)
ORACLE_N = 10
ORACLE_L_MAX = 4
CORRIDOR_L_MAX = 4
DENSITY_GRID = np.linspace(-0.99, 0.99, 199)
# Spectral trends are read over N >= this size.
SPECTRAL_TREND_MIN_N = 100


@dataclass
class RunContext:
    """A resolved configuration, its X1 basis and the shared result cache."""

    config: RunConfig
    basis: ExceptionalBasis
    output_dir: Path
    cache: Optional[ResultCache] = None

    @property
    def N_values(self) -> List[int]:
        return list(self.config.N_values)

    @property
    def table_size(self) -> int:
        """Rows the band table must hold: every N, the cross-checked rows and the path oracle, with l <= l_max."""
        top = max(max(self.config.N_values), CROSS_CHECK_ROWS[1], ORACLE_N)
        return top + self.config.l_max * BAND


def prepare(config: RunConfig, cache: Optional[ResultCache] = None) -> RunContext:
    """Validate admissibility, create the output directory and write the provenance files."""
    with performance_monitor.measure("pipeline.prepare"):
        basis = build_basis(JacobiParams(config.alpha, config.beta))
        output_dir = ensure_output_dir(config.output_dir)
        write_json(output_dir / "config.json", config.model_dump(mode="json"))
        write_json(output_dir / "darboux.json", basis.darboux.to_dict())
    return RunContext(config, basis, output_dir, cache)


def _fmt(ctx: RunContext) -> str:
    return ctx.config.format


def run_coefficients(ctx: RunContext, n_max: Optional[int] = None) -> Path:
    """Structure coefficients of the partner family, n <= n_max (default max N)."""
    n_max = max(ctx.N_values) if n_max is None else n_max
    rows = coefficient_table(ctx.basis.params, n_max)
    return write_table(ctx.output_dir, "coefficients", COEFFICIENT_COLUMNS, rows, _fmt(ctx))


def recurrence_rows(ctx: RunContext, table: RecurrenceTable) -> List[ConvergenceRow]:
    """Cross-checked rows 2..100 followed by the configured N values."""
    lo, hi = CROSS_CHECK_ROWS
    n_values = sorted(set(range(lo, min(hi, table.n_max) + 1)) | {n for n in ctx.N_values if n <= table.n_max})
    return convergence_table(table, n_values)


def run_recurrence(ctx: RunContext) -> RecurrenceTable:
    """Band table for every row the spectrum needs, with the B Q A cross-check attached."""
    with performance_monitor.measure("pipeline.recurrence"):
        table = build_table(ctx.basis, ctx.table_size, J_MAX, cache=ctx.cache)
        table = attach_cross_check(ctx.basis, table, *CROSS_CHECK_ROWS)
        rows = [row.as_tuple() for row in recurrence_rows(ctx, table)]
        write_table(ctx.output_dir, "recurrence", CONVERGENCE_COLUMNS, rows, _fmt(ctx))
    return table


def run_moments(ctx: RunContext) -> ChristoffelReport:
    """Q-moments of mu_N up to max(k_max, l_max), the density samples and raw moments at max N."""
    with performance_monitor.measure("pipeline.moments"):
        k_top = max(ctx.config.k_max, ctx.config.l_max)
        report = moment_table(ctx.basis, ctx.N_values, k_top, cache=ctx.cache)
        N = max(ctx.N_values)
        write_table(ctx.output_dir, "moments", MOMENT_COLUMNS, report.rows(), _fmt(ctx))
        write_table(
            ctx.output_dir, "density", DENSITY_COLUMNS, density_samples(ctx.basis, N, DENSITY_GRID), _fmt(ctx)
        )
        write_table(
            ctx.output_dir, "raw_moments", RAW_COLUMNS, raw_moments(ctx.basis, N, ctx.config.k_max), _fmt(ctx)
        )
    return report


def run_spectrum(
    ctx: RunContext,
    table: Optional[RecurrenceTable] = None,
    moments: Optional[ChristoffelReport] = None,
) -> Dict[int, SpectralReport]:
    """Eigen-analysis for every N, fanned out over a thread pool; one file set per N."""
    if table is None:
        table = build_table(ctx.basis, ctx.table_size, J_MAX, cache=ctx.cache)
    l_max = ctx.config.l_max
    darboux = ctx.basis.darboux

    def mu_for(N: int) -> Optional[Dict[int, float]]:
        if moments is None:
            return None
        return {l: moments.moments[(N, l)] for l in range(l_max + 1) if (N, l) in moments.moments}

    with performance_monitor.measure("pipeline.spectrum"):
        with ThreadPoolExecutor(max_workers=settings.performance.MAX_WORKERS) as executor:
            reports = list(executor.map(lambda N: analyze(table, darboux, N, l_max, mu_for(N)), ctx.N_values))
        for report in reports:
            N = report.N
            write_table(ctx.output_dir, f"spectrum_N{N}", SPECTRUM_COLUMNS, report.spectrum_rows(), _fmt(ctx))
            write_table(ctx.output_dir, f"trace_N{N}", TRACE_COLUMNS, report.moment_rows(), _fmt(ctx))
            write_table(ctx.output_dir, f"cdf_N{N}", CDF_COLUMNS, report.cdf.rows, _fmt(ctx))
    return {report.N: report for report in reports}


@dataclass(frozen=True)
class Gate:
    """One acceptance check: measured value against its threshold."""

    name: str
    measured: Any
    threshold: Any
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = {"name": self.name, "measured": self.measured, "threshold": self.threshold, "pass": self.passed}
        if self.detail:
            data["detail"] = self.detail
        return data


def _below(name: str, measured: float, threshold: float, detail: str = "") -> Gate:
    return Gate(name, float(measured), threshold, bool(measured < threshold), detail)


def _trend(name: str, series: Dict[str, Sequence[float]], slack: float = 0.0) -> Gate:
    """Every named series must be non-increasing; measured lists the offenders."""
    offenders = sorted(key for key, values in series.items() if not non_increasing(list(values), slack))
    return Gate(name, offenders, "non-increasing", not offenders)


def construction_gates(ctx: RunContext) -> List[Gate]:
    """Riccati residual, pole placement, orthonormality, exact degrees and the cleared ODE, exact and on Gauss nodes."""
    basis = ctx.basis
    darboux = basis.darboux
    gram = gram_matrix(basis, GRAM_DEGREE)
    gram_defect = float(np.max(np.abs(gram - np.eye(GRAM_DEGREE + 1))))

    wrong_degree = [
        n for n in range(GRAM_DEGREE + 1) if exceptional_polynomial(basis, n).poly.degree() != n + 1
    ]
    ode = max(
        ode_residual(basis, n, float(x), relative=True) for n in range(ODE_DEGREE + 1) for x in ODE_POINTS
    )
    nodes = gauss_rule(basis.params, ODE_NODES).nodes
    ode_nodes = float(np.max(ode_residual_nodes(basis, ODE_DEGREE, nodes)))
    return [
        _below("riccati_residual", darboux.riccati_residual, 1e-12),
        Gate("pole_outside_interval", abs(darboux.c), "> 1", abs(darboux.c) > 1.0),
        _below("gram_off_identity", gram_defect, 1e-8, f"n <= {GRAM_DEGREE}"),
        Gate("degree_n_plus_1", wrong_degree, [], not wrong_degree, f"n <= {GRAM_DEGREE}"),
        _below("ode_relative_residual", ode, 1e-8, f"n <= {ODE_DEGREE}, {len(ODE_POINTS)} points"),
        _below("ode_residual_nodes", ode_nodes, 1e-8, f"n <= {ODE_DEGREE}, {ODE_NODES} Gauss nodes"),
    ]


def recurrence_gates(ctx: RunContext, table: RecurrenceTable) -> List[Gate]:
    """Five-term truncation, band symmetry, the B Q A cross-check and the approach to the limits U."""
    tol = ctx.config.tolerances
    lo, hi = CROSS_CHECK_ROWS
    cross = max(table.cross_gap.values()) if table.cross_gap else float("nan")
    rows = convergence_table(table, ctx.N_values)
    series = {f"dev_{j}": [row.deviations[j] for row in rows] for j in range(BAND + 1)}
    final = max(rows[-1].deviations)
    return [
        _below("five_term_truncation", table.truncation_defect(hi), tol.identity_tol, f"n <= {hi}"),
        _below("band_symmetry", table.symmetry_defect(hi), tol.identity_tol, f"n <= {hi}"),
        Gate("bqa_cross_check", cross, tol.identity_tol, bool(cross < tol.identity_tol), f"{lo} <= n <= {hi}"),
        _trend("asymptotic_trend", series),
        _below("asymptotic_final", final, tol.asym_gate, f"n = {rows[-1].n}"),
    ]


def christoffel_gates(ctx: RunContext, report: ChristoffelReport) -> List[Gate]:
    tol = ctx.config.tolerances
    N_final = max(ctx.N_values)
    ks = range(ctx.config.k_max + 1)
    # k = 0 is the mass, gated on its own.
    series = {f"k={k}": [report.deviation(N, k) for N in ctx.N_values] for k in ks if k}
    final = max(report.relative_deviation(N_final, k) for k in ks)
    mass = max(abs(report.mass(N) - 1.0) for N in ctx.N_values)
    return [
        _trend("christoffel_trend", series),
        _below("christoffel_final", final, tol.asym_gate, f"N = {N_final}, relative"),
        _below("christoffel_mass", mass, tol.identity_tol),
    ]


def _oracle_defect(table: RecurrenceTable, report: SpectralReport, l_max: int) -> float:
    worst = 0.0
    for l in range(l_max + 1):
        for ceiling, value in ((False, report.trace_full[l]), (True, report.trace_proj[l])):
            oracle = level_path_oracle(table, report.N, l, ceiling)
            worst = max(worst, abs(oracle - value) / max(1.0, abs(value)))
    return worst


def spectrum_gates(
    ctx: RunContext,
    table: RecurrenceTable,
    reports: Dict[int, SpectralReport],
    moments: ChristoffelReport,
) -> List[Gate]:
    """Trace-moment bounds, the path oracle, the Christoffel corridor and the CDF trend."""
    tol = ctx.config.tolerances
    l_max = ctx.config.l_max
    Ns = sorted(reports)
    trend_Ns = [N for N in Ns if N >= SPECTRAL_TREND_MIN_N] or Ns

    over_bound = [
        f"N={N},l={l}" for N in Ns for l in range(1, l_max + 1) if reports[N].gaps[l] > reports[N].bounds[l]
    ]
    gap_one = max(reports[N].gaps[1] for N in Ns)
    gap_series = {f"l={l}": [reports[N].gaps[l] for N in trend_Ns] for l in range(2, l_max + 1)}

    oracle_l = min(ORACLE_L_MAX, l_max)
    oracle_report = analyze(table, ctx.basis.darboux, ORACLE_N, oracle_l)
    oracle = _oracle_defect(table, oracle_report, oracle_l)

    corridor_l = range(1, min(CORRIDOR_L_MAX, l_max) + 1)
    # The l = 1 gap vanishes identically; agreement covers it.
    corridor = {f"l={l}": [reports[N].pullback_gap[l] for N in Ns] for l in corridor_l if l > 1}
    agreement = max(
        abs(moments.moments[(N, l)] - reports[N].trace_full[l]) / max(1.0, abs(reports[N].trace_full[l]))
        for N in Ns
        for l in corridor_l
    )
    ks = [reports[N].cdf.distance for N in trend_Ns]
    retained = reports[Ns[-1]].cdf.retained_fraction
    return [
        Gate("trace_bound", over_bound, "gap <= (2lB)^l/N", not over_bound),
        _below("trace_gap_l1", gap_one, tol.identity_tol),
        _trend("trace_gap_trend", gap_series, slack=1e-12),
        _below("trace_path_oracle", oracle, 1e-10, f"N = {ORACLE_N}, l <= {oracle_l}"),
        _trend("corridor_trend", corridor, slack=1e-12),
        _below("cross_module_trace", agreement, 1e-6),
        _trend("kolmogorov_trend", {"distance": ks}),
        Gate(
            "retained_fraction",
            retained,
            tol.retained_gate,
            bool(retained >= tol.retained_gate),
            f"N = {Ns[-1]}",
        ),
    ]


# Fixed pairs checked alongside the configured basis; (3, 2) exercises d1 != 1.
FIXED_D_PAIRS: Tuple[Tuple[Fraction, Fraction], ...] = ((Fraction(3), Fraction(2)), (Fraction(0), Fraction(1)))


def identity_d_pairs(ctx: Optional[RunContext] = None) -> List[Tuple[Fraction, Fraction]]:
    """(d0, d1) = (-c, 1) of the configured basis (c = -3 without one), then the fixed pairs, without repeats."""
    c = ctx.basis.darboux.exact.c if ctx is not None else -3
    pairs = [(Fraction(str(-c)), Fraction(1)), *FIXED_D_PAIRS]
    return list(dict.fromkeys(pairs))


def run_identities(ctx: Optional[RunContext] = None, **kwargs: Any) -> List[SuiteResult]:
    return run_all(identity_d_pairs(ctx), **kwargs)


def identity_gates(results: Sequence[SuiteResult]) -> List[Gate]:
    gates = [Gate(f"identity_{r.name}", r.to_dict()["failures"], 0, r.passed) for r in results]
    counterexample = first_counterexample(results)
    if counterexample is not None:
        logger.warning(f"First identity counterexample: {counterexample.describe()}")
    return gates


@dataclass
class ReportResult:
    gates: List[Gate] = field(default_factory=list)
    summary_path: Optional[Path] = None

    @property
    def passed(self) -> bool:
        return all(gate.passed for gate in self.gates)

    def failed(self) -> List[Gate]:
        return [gate for gate in self.gates if not gate.passed]


def run_report(ctx: RunContext) -> ReportResult:
    """Every stage and every gate; writes all tables and summary.json."""
    run_coefficients(ctx)
    table = run_recurrence(ctx)
    moments = run_moments(ctx)
    reports = run_spectrum(ctx, table, moments)
    with performance_monitor.measure("pipeline.gates"):
        suites = run_identities(ctx)
        gates = (
            construction_gates(ctx)
            + recurrence_gates(ctx, table)
            + christoffel_gates(ctx, moments)
            + spectrum_gates(ctx, table, reports, moments)
            + identity_gates(suites)
        )
    result = ReportResult(gates)
    summary = {
        "alpha": ctx.config.alpha,
        "beta": ctx.config.beta,
        "c": ctx.basis.c,
        "N_values": ctx.N_values,
        "all_passed": result.passed,
        "gates": [gate.to_dict() for gate in gates],
        "identity_suites": [r.to_dict() for r in suites],
    }
    result.summary_path = write_json(ctx.output_dir / "summary.json", summary)
    logger.info(
        "Report written",
        extra={"context": {"passed": result.passed, "failed": [g.name for g in result.failed()]}},
    )
    return result
