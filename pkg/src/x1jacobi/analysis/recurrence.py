"""
Band coefficients of multiplication by Q in the X1 basis.

u[n, j] = <Q P_n, P_{n+j}>_W is computed by W-quadrature for |j| <= j_max. Q lies in the
stabilizer ring, so the band closes at |j| = 2 and entries beyond it measure the
truncation defect. The cross-check recomputes the band through B and the
classical partner basis, with no shared quadrature.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from numpy.polynomial import Polynomial
from numpy.typing import NDArray

from ..combinatorics.paths import limit_weight
from ..core.config import settings
from ..core.exceptions import CoverageError, ParameterError
from ..monitoring import performance_track
from ..polynomials.darboux import X, DarbouxData
from ..polynomials.exceptional import ExceptionalBasis, apply_A_table, exceptional_table, integrate_w
from ..polynomials.jacobi import orthonormal_table
from ..polynomials.quadrature import gauss_rule, integrate
from ..utils.cache import CacheKey, ResultCache
from ..utils.logging import get_logger

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]
PolynomialLike = Union[sympy.Poly, Polynomial, Sequence[float]]

J_MAX = 4
BAND = 2
# Rows per quadrature block when the table is assembled concurrently.
ROW_BLOCK = 64


def _to_sympy(s: PolynomialLike) -> sympy.Poly:
    if isinstance(s, sympy.Poly):
        return sympy.Poly(s.as_expr(), X, domain=sympy.QQ)
    coeffs = s.coef if isinstance(s, Polynomial) else s
    expr = sum(sympy.Rational(float(v)) * X**k for k, v in enumerate(coeffs))
    return sympy.Poly(expr, X, domain=sympy.QQ)


def _to_numpy(s: PolynomialLike) -> Polynomial:
    if isinstance(s, Polynomial):
        return s
    if isinstance(s, sympy.Poly):
        return Polynomial([float(v) for v in reversed(s.all_coeffs())])
    return Polynomial([float(v) for v in s])


def is_in_stabilizer(s: PolynomialLike, darboux: DarbouxData) -> bool:
    """True iff s' leaves exact remainder zero on division by btilde = x - c."""
    poly = _to_sympy(s)
    remainder = poly.diff(X).rem(darboux.exact.btilde())
    return bool(remainder.is_zero)


def Q_poly(darboux: DarbouxData) -> sympy.Poly:
    return darboux.exact.Q()


def asymptotic_U(j: int, d0: float, d1: float) -> float:
    """Limit of u[n, j] for btilde = d1 x + d0: d1/4, d0/2, d1/8 at |j| = 0, 1, 2 and 0 beyond."""
    return float(limit_weight(j, [Fraction(d0), Fraction(d1)]))


def asymptotic_U_general(j: int, d: Sequence[float]) -> Fraction:
    """Limit for btilde = d_0 + d_1 x + ... + d_m x^m, exact in the binary values of d."""
    return limit_weight(j, [Fraction(v) for v in d])


def U_limits(darboux: DarbouxData) -> Tuple[float, float, float]:
    return tuple(asymptotic_U(j, darboux.d0, darboux.d1) for j in range(BAND + 1))  # type: ignore[return-value]


@dataclass(frozen=True)
class URow:
    """One row of the band: u[j] for j = -j_max..j_max and the W-norm of the expansion remainder."""

    n: int
    u: Dict[int, float]
    residual: float


@dataclass(frozen=True)
class RecurrenceTable:
    """
    u[n, j] for n = 0..n_max, |j| <= j_max, stored with column j + j_max.

    a_cross holds cross-check coefficients a[n, k] for the rows where they were
    computed; cross_gap the matching discrepancies.
    """

    n_max: int
    j_max: int
    u: FloatArray
    residuals: FloatArray
    U_limits: Tuple[float, float, float]
    a_cross: Dict[Tuple[int, int], float] = field(default_factory=dict)
    cross_gap: Dict[int, float] = field(default_factory=dict)

    def entry(self, n: int, j: int) -> float:
        if n + j < 0 or abs(j) > self.j_max:
            return 0.0
        if n > self.n_max:
            raise CoverageError(f"Row {n} is beyond the table (n_max={self.n_max})", n=n, n_max=self.n_max)
        return float(self.u[n, j + self.j_max])

    def row(self, n: int) -> URow:
        return URow(n, {j: self.entry(n, j) for j in range(-self.j_max, self.j_max + 1)}, float(self.residuals[n]))

    def require_rows(self, rows: int, band: int = BAND) -> None:
        """Raise CoverageError unless rows 0..rows-1 with |j| <= band are present."""
        if rows - 1 > self.n_max or band > self.j_max:
            raise CoverageError(
                f"Table covers n <= {self.n_max}, |j| <= {self.j_max}; need n < {rows}, |j| <= {band}",
                n_max=self.n_max,
                rows=rows,
            )

    def symmetry_defect(self, n_limit: Optional[int] = None) -> float:
        """max |u[n, j] - u[n+j, -j]| over n + j <= n_limit, |j| <= 2."""
        limit = self.n_max if n_limit is None else min(n_limit, self.n_max)
        worst = 0.0
        for n in range(limit + 1):
            for j in range(-BAND, BAND + 1):
                if 0 <= n + j <= limit:
                    worst = max(worst, abs(self.entry(n, j) - self.entry(n + j, -j)))
        return worst

    def truncation_defect(self, n_limit: Optional[int] = None) -> float:
        """max |u[n, j]| over BAND < |j| <= j_max."""
        limit = self.n_max if n_limit is None else min(n_limit, self.n_max)
        if self.j_max <= BAND:
            return 0.0
        outer = np.concatenate(
            [self.u[: limit + 1, : self.j_max - BAND], self.u[: limit + 1, self.j_max + BAND + 1 :]], axis=1
        )
        return float(np.max(np.abs(outer))) if outer.size else 0.0

    def max_abs(self, rows: int) -> float:
        """max |u[n, j]| over n < rows, |j| <= 2."""
        self.require_rows(rows)
        return float(np.max(np.abs(self.u[:rows, self.j_max - BAND : self.j_max + BAND + 1])))


def _band_block(basis: ExceptionalBasis, lo: int, hi: int, j_max: int) -> Tuple[FloatArray, FloatArray]:
    """u rows lo..hi-1 and their expansion residuals from one adaptive quadrature."""
    top = hi - 1 + j_max
    offsets = np.arange(-j_max, j_max + 1)
    rows = np.arange(lo, hi)
    index = rows[:, None] + offsets[None, :]
    valid = index >= 0
    safe = np.where(valid, index, 0)

    def integrand(x: FloatArray) -> FloatArray:
        P = exceptional_table(basis, top, x).values
        QP = basis.Q(x)[:, None] * P[:, lo:hi]
        return QP[:, :, None] * P[:, safe] * valid[None, :, :]

    result = integrate_w(basis, integrand, degree_hint=2 * top + 4)
    u = result.value

    # W-norm of QP_n minus its five-term expansion, on the accepted rule.
    rule = gauss_rule(basis.labels, result.node_count)
    P = exceptional_table(basis, top, rule.nodes).values
    band = slice(j_max - BAND, j_max + BAND + 1)
    expansion = np.einsum("xrj,rj->xr", P[:, safe[:, band]] * valid[None, :, band], u[:, band])
    remainder = basis.Q(rule.nodes)[:, None] * P[:, lo:hi] - expansion
    weights = rule.weights * basis.weight_factor(rule.nodes)
    residuals = np.sqrt(np.maximum(weights @ remainder**2, 0.0))
    return u, residuals


def compute_u(basis: ExceptionalBasis, n: int, j_max: int = J_MAX) -> URow:
    """u[n, j] = <Q P_n, P_{n+j}>_W for |j| <= j_max; entries with n + j < 0 are 0."""
    if n < 0:
        raise ParameterError(f"Row index must be non-negative, got {n}", n=n)
    u, residuals = _band_block(basis, n, n + 1, j_max)
    return URow(n, {j: float(u[0, j + j_max]) for j in range(-j_max, j_max + 1)}, float(residuals[0]))


def _table_arrays(basis: ExceptionalBasis, n_max: int, j_max: int) -> Tuple[FloatArray, FloatArray]:
    blocks = [(lo, min(lo + ROW_BLOCK, n_max + 1)) for lo in range(0, n_max + 1, ROW_BLOCK)]
    with ThreadPoolExecutor(max_workers=settings.performance.MAX_WORKERS) as executor:
        parts = list(executor.map(lambda block: _band_block(basis, block[0], block[1], j_max), blocks))
    u = np.concatenate([part[0] for part in parts], axis=0)
    residuals = np.concatenate([part[1] for part in parts])
    return u, residuals


@performance_track("recurrence.build_table")
def build_table(
    basis: ExceptionalBasis,
    n_max: int,
    j_max: int = J_MAX,
    cache: Optional[ResultCache] = None,
) -> RecurrenceTable:
    """RecurrenceTable for rows 0..n_max, rows computed in independent blocks."""
    if n_max < 0:
        raise ParameterError(f"n_max must be non-negative, got {n_max}", n_max=n_max)
    if j_max < BAND:
        raise ParameterError(f"j_max must be at least {BAND}, got {j_max}", j_max=j_max)

    def compute() -> Tuple[FloatArray, FloatArray]:
        return _table_arrays(basis, n_max, j_max)

    if cache is not None:
        key = CacheKey.make_key(
            "u_table", basis.labels.alpha, basis.labels.beta, n_max, j_max, settings.quadrature.RELATIVE_TOL
        )
        u, residuals = cache.get_or_compute(key, compute)
    else:
        u, residuals = compute()
    u = np.array(u)
    residuals = np.array(residuals)
    u.setflags(write=False)
    residuals.setflags(write=False)
    table = RecurrenceTable(n_max, j_max, u, residuals, U_limits(basis.darboux))
    logger.info(
        "Recurrence table built",
        extra={
            "context": {
                "n_max": n_max,
                "symmetry_defect": table.symmetry_defect(),
                "truncation_defect": table.truncation_defect(),
            }
        },
    )
    return table


def _bqa_block(basis: ExceptionalBasis, rows: Sequence[int]) -> FloatArray:
    """a[n, k] = <B(Q A p_n), p_{n+k}>_classical for the given rows, |k| <= 2."""
    rows_arr = np.asarray(rows)
    top = int(rows_arr.max()) + BAND
    d = basis.darboux
    h0, h1 = basis.h_coeffs
    neighbours = rows_arr[:, None] + np.arange(-BAND, BAND + 1)[None, :]

    def integrand(x: FloatArray) -> FloatArray:
        Ap = apply_A_table(basis, top, x, derivatives=1)
        assert Ap.first is not None
        p = orthonormal_table(basis.params, top, x).values
        Q = basis.Q(x)[:, None]
        pole = (x - d.c)[:, None]
        shift = (x + d.endpoint)[:, None]
        f = Ap.values[:, rows_arr]
        df = Ap.first[:, rows_arr]
        BQf = shift * f + shift / pole * Q * df + (h1 * x + h0)[:, None] / pole**2 * Q * f
        return BQf[:, :, None] * p[:, neighbours]

    return integrate(integrand, basis.params, degree_hint=2 * top + 6).value


def _bqa_gaps(
    basis: ExceptionalBasis, table: RecurrenceTable, rows: Sequence[int]
) -> Tuple[FloatArray, FloatArray]:
    a = _bqa_block(basis, rows)
    norms = basis.norms(max(rows) + BAND)
    gaps = np.zeros(len(rows))
    for r, n in enumerate(rows):
        for col, k in enumerate(range(-BAND, BAND + 1)):
            u_hat = table.entry(n, k) * np.sqrt(norms[n] / norms[n + k])
            gaps[r] = max(gaps[r], abs(u_hat - a[r, col] / norms[n + k]))
    return a, gaps


def corollary_b_check(basis: ExceptionalBasis, n: int, table: Optional[RecurrenceTable] = None) -> float:
    """
    max over |k| <= 2 of |u_hat[n, k] - a[n, k] / (lambda_{n+k} - lambda_tilde)|.

    u_hat is the band coefficient in the unnormalized family A p_n,
    u[n, k] sqrt((lambda_n - lambda_tilde)/(lambda_{n+k} - lambda_tilde)).
    """
    if n < BAND:
        raise ParameterError(f"corollary_b_check needs n >= {BAND}, got {n}", n=n)
    if table is None or table.n_max < n:
        row = compute_u(basis, n, BAND)
        u = np.zeros((n + 1, 2 * BAND + 1))
        u[n] = [row.u[j] for j in range(-BAND, BAND + 1)]
        table = RecurrenceTable(n, BAND, u, np.zeros(n + 1), U_limits(basis.darboux))
    _, gaps = _bqa_gaps(basis, table, [n])
    return float(gaps[0])


@performance_track("recurrence.bqa_check")
def attach_cross_check(
    basis: ExceptionalBasis, table: RecurrenceTable, n_lo: int = BAND, n_hi: int = 100
) -> RecurrenceTable:
    """Copy of table with a_cross and cross_gap filled for rows n_lo..n_hi."""
    rows = list(range(max(n_lo, BAND), min(n_hi, table.n_max) + 1))
    if not rows:
        return table
    blocks = [rows[i : i + ROW_BLOCK] for i in range(0, len(rows), ROW_BLOCK)]
    with ThreadPoolExecutor(max_workers=settings.performance.MAX_WORKERS) as executor:
        parts = list(executor.map(lambda block: _bqa_gaps(basis, table, block), blocks))
    a_cross: Dict[Tuple[int, int], float] = {}
    cross_gap: Dict[int, float] = {}
    for block, (a, gaps) in zip(blocks, parts):
        for r, n in enumerate(block):
            cross_gap[n] = float(gaps[r])
            for col, k in enumerate(range(-BAND, BAND + 1)):
                a_cross[(n, k)] = float(a[r, col])
    return replace(table, a_cross=a_cross, cross_gap=cross_gap)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    u: Tuple[float, float, float, float, float]
    deviations: Tuple[float, float, float]
    cross_gap: Optional[float]

    def as_tuple(self) -> Tuple[Any, ...]:
        gap = float("nan") if self.cross_gap is None else self.cross_gap
        return (self.n, *self.u, *self.deviations, gap)


CONVERGENCE_COLUMNS = ("n", "u_m2", "u_m1", "u_0", "u_p1", "u_p2", "dev_0", "dev_1", "dev_2", "corollaryB_gap")


def convergence_table(table: RecurrenceTable, n_values: Sequence[int]) -> List[ConvergenceRow]:
    """Rows (n, u[n, -2..2], max deviation from U per |j|, cross-check gap when known)."""
    rows = []
    U = table.U_limits
    for n in n_values:
        u = tuple(table.entry(n, j) for j in range(-BAND, BAND + 1))
        deviations = tuple(
            max(abs(table.entry(n, j) - U[j]), abs(table.entry(n, -j) - U[j])) for j in range(BAND + 1)
        )
        rows.append(ConvergenceRow(n, u, deviations, table.cross_gap.get(n)))  # type: ignore[arg-type]
    return rows


def non_increasing(values: Sequence[float], slack: float = 0.0) -> bool:
    """True when each value is at most the previous one plus slack; vacuous for fewer than two."""
    return all(b <= a + slack for a, b in zip(values, values[1:]))


def stabilizer_expansion(
    basis: ExceptionalBasis, s: PolynomialLike, n: int, j_max: int
) -> Dict[int, float]:
    """<s P_n, P_{n+j}>_W for |j| <= j_max; the band of a stabilizer element has width deg s."""
    if n < 0:
        raise ParameterError(f"Row index must be non-negative, got {n}", n=n)
    poly = _to_numpy(s)
    top = n + j_max
    offsets = [j for j in range(-j_max, j_max + 1) if n + j >= 0]

    def integrand(x: FloatArray) -> FloatArray:
        P = exceptional_table(basis, top, x).values
        return (poly(x) * P[:, n])[:, None] * P[:, [n + j for j in offsets]]

    value = integrate_w(basis, integrand, degree_hint=2 * top + 2 + poly.degree()).value
    coefficients = {j: 0.0 for j in range(-j_max, j_max + 1)}
    coefficients.update({j: float(v) for j, v in zip(offsets, value)})
    return coefficients
