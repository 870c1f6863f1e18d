"""
The projected multiplication operator pi_N M pi_N and its spectrum.

M is multiplication by Q in the X1 basis, a symmetric five-diagonal operator whose
entries are the band coefficients u[n, j]. Its N x N truncation J_N is eigensolved in
banded storage; the eigenvalues z_i are the zeros of the modified average
characteristic polynomial. No quadrature enters here.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, eigvals_banded

from ..combinatorics.paths import PathModel, level_weighted_sum
from ..core.exceptions import EigensolverFailure, InputValidationError, ParameterError
from ..monitoring import performance_track
from ..polynomials.darboux import DarbouxData
from ..utils.logging import get_logger
from .christoffel import ARCSINE
from .recurrence import BAND, RecurrenceTable

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

ASYMMETRY_TOL = 1e-8
# Pulled-back points this close outside [-1, 1] still count as retained.
_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class BandMatrix:
    """
    Symmetric band matrix in LAPACK upper storage: bands[L - j, n + j] = entry(n, j), j >= 0.

    asymmetry is max |u[n, j] - u[n+j, -j]| over the entries used.
    """

    N: int
    L: int
    bands: FloatArray
    asymmetry: float = 0.0

    def entry(self, n: int, j: int) -> float:
        if abs(j) > self.L or not (0 <= n < self.N and 0 <= n + j < self.N):
            return 0.0
        row, col = (n, n + j) if j >= 0 else (n + j, n)
        return float(self.bands[self.L - (col - row), col])

    def dense(self) -> FloatArray:
        matrix = np.zeros((self.N, self.N))
        for j in range(min(self.L, self.N - 1) + 1):
            diagonal = self.bands[self.L - j, j:]
            matrix += np.diag(diagonal, j)
            if j:
                matrix += np.diag(diagonal, -j)
        return matrix

    def trace(self) -> float:
        return float(np.sum(self.bands[self.L]))


def _band_from_table(table: RecurrenceTable, size: int) -> BandMatrix:
    bands = np.zeros((BAND + 1, size))
    asymmetry = 0.0
    for n in range(size):
        for j in range(BAND + 1):
            if n + j >= size:
                continue
            forward, backward = table.entry(n, j), table.entry(n + j, -j)
            asymmetry = max(asymmetry, abs(forward - backward))
            bands[BAND - j, n + j] = 0.5 * (forward + backward)
    bands.setflags(write=False)
    return BandMatrix(size, BAND, bands, asymmetry)


def build_JN(table: RecurrenceTable, N: int) -> BandMatrix:
    """N x N symmetric five-diagonal matrix of symmetrized band coefficients."""
    if N < 1:
        raise ParameterError(f"N must be at least 1, got {N}", N=N)
    table.require_rows(N + BAND)
    J = _band_from_table(table, N)
    if J.asymmetry > ASYMMETRY_TOL:
        logger.warning(
            "Band coefficients are not symmetric to tolerance",
            extra={"context": {"N": N, "asymmetry": J.asymmetry}},
        )
    return J


def eigenvalues(J: BandMatrix) -> FloatArray:
    """All eigenvalues of J, ascending."""
    try:
        kd = min(J.L, J.N - 1)
        z = eigvals_banded(np.array(J.bands[J.L - kd :]), lower=False, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise EigensolverFailure(f"Banded eigensolve failed for N={J.N}: {exc}", N=J.N) from exc
    z = np.sort(np.asarray(z, dtype=np.float64))
    z.setflags(write=False)
    return z


def gershgorin_interval(J: BandMatrix) -> Tuple[float, float]:
    """Union of the Gershgorin discs of J as an interval."""
    matrix = J.dense()
    diagonal = np.diag(matrix)
    radius = np.sum(np.abs(matrix), axis=1) - np.abs(diagonal)
    return float(np.min(diagonal - radius)), float(np.max(diagonal + radius))


def q_range(darboux: DarbouxData) -> Tuple[float, float]:
    """Q([-1, 1]); Q is monotone there."""
    return darboux.Q_range()


def trace_power(J: BandMatrix, l: int) -> float:
    """(1/N) Tr(J^l) by direct matrix powers."""
    if l < 0:
        raise ParameterError(f"l must be non-negative, got {l}", l=l)
    return float(np.trace(np.linalg.matrix_power(J.dense(), l))) / J.N


def trace_moment_full(table: RecurrenceTable, N: int, l: int) -> float:
    """
    (1/N) sum over k < N of (M^l)_{kk}.

    M is truncated at dimension N + l*L; returning paths of length l started below N
    cannot reach the truncation.
    """
    if N < 1 or l < 0:
        raise ParameterError(f"Need N >= 1 and l >= 0, got N={N}, l={l}")
    size = N + l * BAND
    table.require_rows(size)
    M = _band_from_table(table, size).dense()
    return float(np.trace(np.linalg.matrix_power(M, l)[:N, :N])) / N


def trace_moment_proj(J: BandMatrix, l: int, z: Optional[FloatArray] = None) -> float:
    """(1/N) sum of z_i^l over the eigenvalues of J."""
    if l < 0:
        raise ParameterError(f"l must be non-negative, got {l}", l=l)
    z = eigenvalues(J) if z is None else z
    return float(np.sum(z**l)) / J.N


def theoretical_bound(l: int, B: float, N: int) -> float:
    """(2 l B)^l / N."""
    return (2.0 * l * B) ** l / N


def moment_gap(
    table: RecurrenceTable, N: int, l: int, J: Optional[BandMatrix] = None, z: Optional[FloatArray] = None
) -> Tuple[float, float]:
    """(|trace_moment_full - trace_moment_proj|, (2 l B)^l / N) with B the max |u| over n < N + l L."""
    J = build_JN(table, N) if J is None else J
    full = trace_moment_full(table, N, l)
    proj = trace_moment_proj(J, l, z)
    B = table.max_abs(N + l * BAND)
    return abs(full - proj), theoretical_bound(l, B, N)


def pull_back(z: float, darboux: DarbouxData) -> Optional[float]:
    """
    The real y with Q(y) = z on the monotone branch through [-1, 1].

    With c = -d0/d1, y = c - sign(c) sqrt(c^2 + 2z/d1); None when the root is complex.
    """
    c = -darboux.d0 / darboux.d1
    discriminant = c * c + 2.0 * z / darboux.d1
    if discriminant < 0:
        return None
    return float(c - np.sign(c) * np.sqrt(discriminant))


def rescale_to_range(z: ArrayLike, interval: Tuple[float, float], darboux: DarbouxData) -> FloatArray:
    """Affine map carrying interval = [a, b] onto Q([-1, 1])."""
    a, b = interval
    if not b > a:
        raise ParameterError(f"Interval must have b > a, got [{a}, {b}]")
    lo, hi = q_range(darboux)
    return lo + (np.asarray(z, dtype=np.float64) - a) * (hi - lo) / (b - a)


@dataclass(frozen=True)
class CdfComparison:
    distance: float
    retained_fraction: float
    rows: List[Tuple[float, float, float]]


CDF_COLUMNS = ("x", "empirical", "arcsine")


def cdf_compare(y_points: Sequence[Optional[float]], normalization: Optional[int] = None) -> CdfComparison:
    """
    Kolmogorov distance between the retained points and the arcsine law on [-1, 1].

    Points outside [-1, 1] (or absent) are dropped; the empirical CDF counts the rest
    with mass 1/normalization each (normalization defaults to the number of points), so
    dropped mass shows up as a deficit at x = 1.
    """
    total = normalization if normalization is not None else len(y_points)
    retained = np.sort(
        np.array([y for y in y_points if y is not None and abs(y) <= 1.0 + _RANGE_SLACK], dtype=np.float64)
    )
    if retained.size == 0 or total <= 0:
        raise InputValidationError("No pulled-back points lie in [-1, 1]")
    retained = np.clip(retained, -1.0, 1.0)
    F = ARCSINE.cdf(retained)
    steps = np.arange(retained.size + 1) / total
    distance = float(max(np.max(np.abs(steps[1:] - F)), np.max(np.abs(steps[:-1] - F)), 1.0 - steps[-1]))
    rows = [(float(x), float(s), float(f)) for x, s, f in zip(retained, steps[1:], F)]
    return CdfComparison(distance, retained.size / total, rows)


def pullback_moment_gap(moments_quadrature: Dict[int, float], z: FloatArray, l: int) -> float:
    """|integral of Q^l against mu_N - (1/N) sum of z_i^l|."""
    return abs(moments_quadrature[l] - float(np.mean(z**l)))


def level_path_oracle(table: RecurrenceTable, N: int, l: int, ceiling: bool) -> float:
    """
    (1/N) sum over k < N of returning l-step path weights from level k.

    Steps are -2..2, a step from level n by j has weight M[n, n+j], levels never go
    below 0 and, with ceiling, stay below N.
    """
    size = N + l * BAND
    table.require_rows(size)
    M = _band_from_table(table, size)
    steps = {step: Fraction(0) for step in range(-BAND, BAND + 1)}

    def weight(level: int, step: int) -> float:
        return M.entry(level, step)

    total = 0.0
    for start in range(N):
        model = PathModel(steps, l, 0, floor=0, ceiling=N if ceiling else None, start=start, level_weight=weight)
        total += float(level_weighted_sum(model))
    return total / N


@dataclass(frozen=True)
class SpectralReport:
    N: int
    z: FloatArray
    y: List[Optional[float]]
    in_range: List[bool]
    trace_full: Dict[int, float]
    trace_proj: Dict[int, float]
    trace_direct: Dict[int, float]
    B_bound: float
    gaps: Dict[int, float]
    bounds: Dict[int, float]
    gershgorin: Tuple[float, float]
    asymmetry: float
    cdf: CdfComparison
    pullback_gap: Dict[int, float] = field(default_factory=dict)

    def spectrum_rows(self) -> List[Tuple[int, float, float, int]]:
        """(i, z_i, y_i, in_range); y_i is NaN when absent."""
        return [
            (i, float(zi), float("nan") if yi is None else yi, int(flag))
            for i, (zi, yi, flag) in enumerate(zip(self.z, self.y, self.in_range))
        ]

    def moment_rows(self) -> List[Tuple[int, float, float, float, float]]:
        """(l, trace_full, trace_proj, gap, bound)."""
        return [
            (l, self.trace_full[l], self.trace_proj[l], self.gaps[l], self.bounds[l]) for l in sorted(self.trace_full)
        ]


SPECTRUM_COLUMNS = ("i", "z_i", "y_i", "in_range")
TRACE_COLUMNS = ("l", "trace_full", "trace_proj", "gap", "bound")


@performance_track("spectrum.analyze")
def analyze(
    table: RecurrenceTable,
    darboux: DarbouxData,
    N: int,
    l_max: int,
    mu_moments: Optional[Dict[int, float]] = None,
) -> SpectralReport:
    """Eigenvalues, pull-backs, trace moments and gaps for one N."""
    J = build_JN(table, N)
    z = eigenvalues(J)
    y = [pull_back(float(zi), darboux) for zi in z]
    in_range = [yi is not None and abs(yi) <= 1.0 + _RANGE_SLACK for yi in y]

    trace_full: Dict[int, float] = {}
    trace_proj: Dict[int, float] = {}
    trace_direct: Dict[int, float] = {}
    gaps: Dict[int, float] = {}
    bounds: Dict[int, float] = {}
    for l in range(l_max + 1):
        trace_full[l] = trace_moment_full(table, N, l)
        trace_proj[l] = trace_moment_proj(J, l, z)
        trace_direct[l] = trace_power(J, l)
        gaps[l] = abs(trace_full[l] - trace_proj[l])
        bounds[l] = theoretical_bound(l, table.max_abs(N + l * BAND), N)

    pullback_gap: Dict[int, float] = {}
    if mu_moments:
        pullback_gap = {l: pullback_moment_gap(mu_moments, z, l) for l in mu_moments if l <= l_max}

    report = SpectralReport(
        N=N,
        z=z,
        y=y,
        in_range=in_range,
        trace_full=trace_full,
        trace_proj=trace_proj,
        trace_direct=trace_direct,
        B_bound=table.max_abs(N + l_max * BAND),
        gaps=gaps,
        bounds=bounds,
        gershgorin=gershgorin_interval(J),
        asymmetry=J.asymmetry,
        cdf=cdf_compare(y, N),
        pullback_gap=pullback_gap,
    )
    logger.info(
        "Spectrum analysed",
        extra={
            "context": {
                "N": N,
                "z_min": float(z[0]),
                "z_max": float(z[-1]),
                "retained": report.cdf.retained_fraction,
                "ks_distance": report.cdf.distance,
            }
        },
    )
    return report
