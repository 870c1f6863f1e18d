"""
Christoffel-type measures d mu_N = K_N(x, x) W(x) dx / N of the X1 family.

Q-moments of mu_N are arithmetic means of the diagonal inner products
<Q^k P_n, P_n>_W, all taken from one quadrature table. Targets are the exact arcsine
moments of Q, produced by both exact routes in the path engine.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import arcsine

from ..combinatorics.paths import arcsine_Q_moment, c_closed, wallis_moment
from ..core.config import settings
from ..core.exceptions import IdentityFailure, ParameterError
from ..monitoring import performance_track
from ..polynomials.exceptional import ExceptionalBasis, exceptional_table, exceptional_weight, integrate_w
from ..utils.cache import CacheKey, ResultCache
from ..utils.logging import get_logger

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

# The equilibrium measure of [-1, 1].
ARCSINE = arcsine(loc=-1.0, scale=2.0)


def _check_N(N: int) -> None:
    if N < 1:
        raise ParameterError(f"N must be at least 1, got {N}", N=N)


def kernel_diag(basis: ExceptionalBasis, N: int, x: Union[float, ArrayLike]) -> Union[float, FloatArray]:
    """K_N(x, x) = sum over k < N of P_k(x)^2."""
    _check_N(N)
    values = exceptional_table(basis, N - 1, x).values
    diag = np.sum(values**2, axis=1)
    return float(diag[0]) if np.ndim(x) == 0 else diag


def diag_inner_table(
    basis: ExceptionalBasis, n_max: int, k_max: int, cache: Optional[ResultCache] = None
) -> FloatArray:
    """D[n, k] = <Q^k P_n, P_n>_W for n <= n_max, k <= k_max, from one adaptive quadrature."""
    if n_max < 0 or k_max < 0:
        raise ParameterError("n_max and k_max must be non-negative", n_max=n_max, k_max=k_max)

    def compute() -> FloatArray:
        powers = np.arange(k_max + 1)

        def integrand(x: FloatArray) -> FloatArray:
            P = exceptional_table(basis, n_max, x).values
            Qk = basis.Q(x)[:, None] ** powers[None, :]
            return (P**2)[:, :, None] * Qk[:, None, :]

        return integrate_w(basis, integrand, degree_hint=2 * n_max + 2 * k_max + 2).value

    if cache is None:
        table = compute()
    else:
        key = CacheKey.make_key(
            "diag_inner", basis.labels.alpha, basis.labels.beta, n_max, k_max, settings.quadrature.RELATIVE_TOL
        )
        table = cache.get_or_compute(key, compute)
    table = np.array(table)
    table.setflags(write=False)
    return table


def diag_inner(basis: ExceptionalBasis, n: int, k: int) -> float:
    """<Q^k P_n, P_n>_W."""
    if n < 0 or k < 0:
        raise ParameterError(f"n and k must be non-negative, got n={n}, k={k}")

    def integrand(x: FloatArray) -> FloatArray:
        P = exceptional_table(basis, n, x).values[:, n]
        return basis.Q(x) ** k * P**2

    return float(integrate_w(basis, integrand, degree_hint=2 * n + 2 * k + 2).value)


def mu_moment(basis: ExceptionalBasis, N: int, k: int, table: Optional[FloatArray] = None) -> float:
    """Integral of Q^k against mu_N, the mean of <Q^k P_n, P_n>_W over n < N."""
    _check_N(N)
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}", k=k)
    if table is None or table.shape[0] < N or table.shape[1] <= k:
        table = diag_inner_table(basis, N - 1, k)
    return float(np.mean(table[:N, k]))


def kernel_mass(basis: ExceptionalBasis, N: int) -> float:
    """Integral of K_N(x, x) W(x); N by orthonormality."""
    _check_N(N)

    def integrand(x: FloatArray) -> FloatArray:
        return np.asarray(kernel_diag(basis, N, x))

    return float(integrate_w(basis, integrand, degree_hint=2 * N + 2).value)


def exact_targets(basis: ExceptionalBasis, k_max: int) -> Tuple[Dict[int, Fraction], Dict[int, Fraction]]:
    """Arcsine Q-moments by the binomial route and by the returning-path route, k <= k_max."""
    d0, d1 = Fraction(basis.darboux.d0), Fraction(basis.darboux.d1)
    binomial = {k: arcsine_Q_moment(k, d0, d1) for k in range(k_max + 1)}
    paths = {k: c_closed(k, d0, d1) for k in range(k_max + 1)}
    return binomial, paths


@dataclass(frozen=True)
class ChristoffelReport:
    N_values: Tuple[int, ...]
    k_max: int
    moments: Dict[Tuple[int, int], float]
    targets: Dict[int, Fraction]
    diag_inner: Dict[Tuple[int, int], float]
    raw: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def deviation(self, N: int, k: int) -> float:
        return abs(self.moments[(N, k)] - float(self.targets[k]))

    def relative_deviation(self, N: int, k: int) -> float:
        target = float(self.targets[k])
        return self.deviation(N, k) / max(1.0, abs(target))

    def diag_deviation(self, n: int, k: int) -> float:
        target = float(self.targets[k])
        return abs(self.diag_inner[(n, k)] - target) / max(1.0, abs(target))

    def mass(self, N: int) -> float:
        return self.moments[(N, 0)]

    def rows(self) -> List[Tuple[int, int, float, float, float]]:
        """(N, k, moment, target, abs_dev) in (N, k) order."""
        return [
            (N, k, self.moments[(N, k)], float(self.targets[k]), self.deviation(N, k))
            for N in self.N_values
            for k in range(self.k_max + 1)
        ]


MOMENT_COLUMNS = ("N", "k", "moment", "target", "abs_dev")
DENSITY_COLUMNS = ("x", "mu_N_density", "arcsine_density")
RAW_COLUMNS = ("N", "k", "raw_moment", "wallis")


@performance_track("christoffel.moment_table")
def moment_table(
    basis: ExceptionalBasis,
    N_values: Sequence[int],
    k_max: int,
    cache: Optional[ResultCache] = None,
) -> ChristoffelReport:
    """Q-moments of mu_N for every N in N_values and k <= k_max, plus diagonal inner products at n = N."""
    if not N_values:
        raise ParameterError("N_values must not be empty")
    for N in N_values:
        _check_N(N)
    binomial, paths = exact_targets(basis, k_max)
    if binomial != paths:
        k = next(k for k in binomial if binomial[k] != paths[k])
        raise IdentityFailure(f"Exact Q-moment routes disagree at k={k}", k=k)

    n_max = max(N_values)
    table = diag_inner_table(basis, n_max, k_max, cache=cache)
    moments = {(N, k): float(np.mean(table[:N, k])) for N in N_values for k in range(k_max + 1)}
    diag = {(N, k): float(table[N, k]) for N in N_values for k in range(k_max + 1)}
    report = ChristoffelReport(tuple(N_values), k_max, moments, binomial, diag)
    logger.info(
        "Christoffel moments computed",
        extra={"context": {"N_max": n_max, "k_max": k_max, "mass": report.mass(max(N_values))}},
    )
    return report


def raw_moments(basis: ExceptionalBasis, N: int, k_max: int) -> List[Tuple[int, int, float, float]]:
    """(N, k, integral of x^k against mu_N, arcsine moment of x^k); plot data only."""
    _check_N(N)
    powers = np.arange(k_max + 1)

    def integrand(x: FloatArray) -> FloatArray:
        K = np.asarray(kernel_diag(basis, N, x))
        return (K / N)[:, None] * x[:, None] ** powers[None, :]

    values = integrate_w(basis, integrand, degree_hint=2 * N + k_max + 2).value
    return [(N, k, float(values[k]), float(wallis_moment(k))) for k in range(k_max + 1)]


def density_samples(basis: ExceptionalBasis, N: int, grid: ArrayLike) -> List[Tuple[float, float, float]]:
    """(x, K_N(x, x) W(x) / N, arcsine density) for x in grid, grid inside (-1, 1)."""
    _check_N(N)
    points = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if points.size and np.max(np.abs(points)) >= 1.0:
        raise ParameterError("Density grid must lie in the open interval (-1, 1)")
    density = np.asarray(kernel_diag(basis, N, points)) * np.asarray(exceptional_weight(basis, points)) / N
    equilibrium = ARCSINE.pdf(points)
    return [(float(x), float(m), float(a)) for x, m, a in zip(points, density, equilibrium)]


def kernel_positive(basis: ExceptionalBasis, N: int, grid_size: int = 1000) -> bool:
    """Exploratory check that K_N(x, x) > 0 on a uniform grid of [-1, 1]."""
    grid = np.linspace(-1.0, 1.0, grid_size)
    return bool(np.all(np.asarray(kernel_diag(basis, N, grid)) > 0))
