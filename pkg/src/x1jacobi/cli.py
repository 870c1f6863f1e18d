"""
Command line interface for x1jacobi.
"""

import sys
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, TypeVar

import click
import orjson

from .core.config import RunConfig, settings
from .core.exceptions import InputValidationError, X1JacobiError
from .monitoring import performance_monitor
from .utils.cache import ResultCache
from .utils.logging import get_logger, set_level

F = TypeVar("F", bound=Callable[..., Any])


def _fail(exc: X1JacobiError) -> None:
    click.echo(f"Error: {exc}", err=True)
    sys.exit(exc.exit_code)


def handle_errors(func: F) -> F:
    """Map package errors to their exit codes (1 validation, 2 non-convergence)."""

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except X1JacobiError as exc:
            _fail(exc)

    return wrapper  # type: ignore[return-value]


def run_options(func: F) -> F:
    """The shared run configuration flags; unset flags leave --config values in place."""
    options = [
        click.option("--alpha", type=float, default=None, help="X1 label alpha (default 2)"),
        click.option("--beta", type=float, default=None, help="X1 label beta (default 1)"),
        click.option("--N", "N_values", type=int, multiple=True, help="Truncation size, repeatable"),
        click.option("--kmax", "k_max", type=int, default=None, help="Largest Q-moment order"),
        click.option("--lmax", "l_max", type=int, default=None, help="Largest trace-moment order"),
        click.option("--out", "output_dir", type=click.Path(path_type=Path), default=None, help="Output directory"),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None, help="Table format"),
        click.option(
            "--config",
            "config_file",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None,
            help="JSON run configuration; flags override it",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _resolve(
    config_file: Optional[Path],
    alpha: Optional[float],
    beta: Optional[float],
    N_values: Sequence[int],
    k_max: Optional[int],
    l_max: Optional[int],
    output_dir: Optional[Path],
    fmt: Optional[str],
) -> RunConfig:
    return RunConfig.from_sources(
        config_file,
        alpha=alpha,
        beta=beta,
        N_values=list(N_values) or None,
        k_max=k_max,
        l_max=l_max,
        output_dir=output_dir,
        format=fmt,
    )


def _context(click_ctx: click.Context, **flags: Any) -> Any:
    from .reporting.pipeline import prepare

    config = _resolve(**flags)
    return prepare(config, cache=click_ctx.obj.get("cache"))


@click.group()
@click.version_option(version=settings.VERSION)
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option("--no-cache", is_flag=True, help="Bypass the result cache")
@click.pass_context
def cli(ctx: click.Context, debug: bool, no_cache: bool) -> None:
    """x1jacobi - X1-Jacobi exceptional polynomials, Christoffel measures and banded spectra."""
    if debug:
        settings.DEBUG = True
        set_level("DEBUG")
    ctx.ensure_object(dict)
    ctx.obj["cache"] = None if no_cache else ResultCache()
    logger = get_logger(__name__)
    logger.debug(f"x1jacobi v{settings.VERSION} starting up")


@cli.group()
def paths() -> None:
    """Exact lattice-path identities."""


def _parse_weights(values: Tuple[str, ...]) -> Optional[Dict[int, Fraction]]:
    if not values:
        return None
    weights: Dict[int, Fraction] = {}
    for item in values:
        step, sep, weight = item.partition("=")
        try:
            if not sep:
                raise ValueError(item)
            weights[int(step)] = Fraction(weight)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputValidationError(f"--inject-weight expects STEP=VALUE, got {item!r}") from exc
    return weights


@paths.command("verify")
@click.option("--k-s", "k_max_s", type=int, default=10, show_default=True, help="Length bound of the s suite")
@click.option("--k-c", "k_max_c", type=int, default=8, show_default=True, help="Length bound of the c suite")
@click.option("--k-qq", "k_max_qq", type=int, default=10, show_default=True, help="Order bound of the Q-moment suite")
@click.option("--k-S", "k_max_S", type=int, default=12, show_default=True, help="Length bound of the S suites")
@click.option("--inject-weight", multiple=True, hidden=True)
@handle_errors
def paths_verify(
    k_max_s: int, k_max_c: int, k_max_qq: int, k_max_S: int, inject_weight: Tuple[str, ...]
) -> None:
    """Run every exact identity suite; exit 1 with the first counterexample on failure."""
    from .combinatorics.identities import first_counterexample
    from .reporting.pipeline import run_identities

    results = run_identities(
        k_max_s=k_max_s,
        k_max_c=k_max_c,
        k_max_qq=k_max_qq,
        k_max_S=k_max_S,
        weights=_parse_weights(inject_weight),
    )
    click.echo(f"{'suite':<20} {'cells':>7} {'failed':>7}  result")
    for result in results:
        summary = result.to_dict()
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{result.name:<20} {summary['cells']:>7} {summary['failures']:>7}  {status}")
    counterexample = first_counterexample(results)
    if counterexample is not None:
        click.echo(f"First counterexample: {counterexample.describe()}")
        sys.exit(1)


@cli.command()
@run_options
@click.pass_context
@handle_errors
def coefficients(ctx: click.Context, **flags: Any) -> None:
    """Structure coefficients (n, a_n, b_n, A_n, B_n, C_n) of the partner family."""
    from .reporting.pipeline import run_coefficients

    path = run_coefficients(_context(ctx, **flags))
    click.echo(f"Wrote {path}")


@cli.command()
@run_options
@click.pass_context
@handle_errors
def recurrence(ctx: click.Context, **flags: Any) -> None:
    """Five-term band coefficients, their limits and the cross-check through B Q A."""
    from .reporting.pipeline import run_recurrence

    run_ctx = _context(ctx, **flags)
    table = run_recurrence(run_ctx)
    click.echo(f"Band table n <= {table.n_max} written to {run_ctx.output_dir}")


@cli.command()
@run_options
@click.pass_context
@handle_errors
def moments(ctx: click.Context, **flags: Any) -> None:
    """Q-moments of the Christoffel measures against the arcsine law."""
    from .reporting.pipeline import run_moments

    run_ctx = _context(ctx, **flags)
    report = run_moments(run_ctx)
    N = max(report.N_values)
    worst = max(report.relative_deviation(N, k) for k in range(run_ctx.config.k_max + 1))
    click.echo(f"N = {N}: largest relative Q-moment deviation {worst:.3e}")


@cli.command()
@run_options
@click.pass_context
@handle_errors
def spectrum(ctx: click.Context, **flags: Any) -> None:
    """Eigenvalues of the truncated band matrices, trace moments and the CDF comparison."""
    from .reporting.pipeline import run_spectrum

    reports = run_spectrum(_context(ctx, **flags))
    for N, report in reports.items():
        click.echo(
            f"N = {N}: Kolmogorov distance {report.cdf.distance:.4f}, "
            f"retained {report.cdf.retained_fraction:.3f}"
        )


@cli.command()
@run_options
@click.option("--timings", is_flag=True, help="Print stage timings to stderr")
@click.pass_context
@handle_errors
def report(ctx: click.Context, timings: bool, **flags: Any) -> None:
    """Run every stage and write summary.json with one pass/fail entry per gate."""
    from .reporting.pipeline import run_report

    result = run_report(_context(ctx, **flags))
    for gate in result.gates:
        status = "PASS" if gate.passed else "FAIL"
        click.echo(f"{gate.name:<26} {status}  measured={gate.measured}  threshold={gate.threshold}")
    click.echo(f"Summary written to {result.summary_path}")
    if timings:
        payload = performance_monitor.get_performance_report()
        click.echo(orjson.dumps(payload, option=orjson.OPT_INDENT_2, default=str).decode(), err=True)


@cli.group()
def cache() -> None:
    """Result cache management."""


@cache.command("stats")
@click.pass_context
def cache_stats(ctx: click.Context) -> None:
    """Show result cache statistics."""
    result_cache = ctx.obj.get("cache") or ResultCache()
    stats = result_cache.get_stats()
    click.echo("Result Cache Statistics")
    click.echo("=" * 30)
    for key in sorted(stats):
        click.echo(f"{key}: {stats[key]}")


@cache.command("clear")
@click.confirmation_option(prompt="Are you sure you want to clear all cached tables?")
def clear_cache() -> None:
    """Remove every cached table."""
    removed = ResultCache(enabled=True).clear()
    click.echo(f"Cache cleared ({removed} entries)")


def main() -> None:
    """Main CLI entry point."""
    try:
        cli(obj={})
    except KeyboardInterrupt:
        click.echo("\nOperation cancelled by user", err=True)
        sys.exit(130)


if __name__ == "__main__":
    main()
