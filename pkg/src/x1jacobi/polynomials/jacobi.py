"""
Orthonormal classical Jacobi polynomials on [-1, 1].

The weight is (1-x)^alpha (1+x)^beta. Evaluation uses the upward three-term
recurrence of the orthonormal family, differentiated once or twice for
derivatives. Eigenvalues follow the positive convention
lambda_n = n(n + alpha + beta + 1).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import betaln

from ..core.exceptions import ParameterError

FloatArray = NDArray[np.float64]

# Points this close outside [-1, 1] are accepted as rounding noise.
_X_SLACK = 1e-12


@dataclass(frozen=True)
class JacobiParams:
    """Exponents of the classical Jacobi weight."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        alpha, beta = float(self.alpha), float(self.beta)
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            raise ParameterError("alpha and beta must be finite", alpha=alpha, beta=beta)
        if alpha <= -1 or beta <= -1:
            raise ParameterError(
                f"Jacobi parameters need alpha > -1 and beta > -1, got ({alpha}, {beta})",
                alpha=alpha,
                beta=beta,
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def mirrored(self) -> "JacobiParams":
        """Parameters of the weight reflected by x -> -x."""
        return JacobiParams(self.beta, self.alpha)


class StructureCoeffs(NamedTuple):
    """Coefficients of p(x) p_n'(x) = A_n p_{n+1} + B_n p_n + C_n p_{n-1}, p = 1 - x^2."""

    n: int
    A: float
    B: float
    C: float
    residual: float


class OrthonormalTable(NamedTuple):
    """Values (and optionally derivatives) of p_0..p_{n_max}; shape (len(x), n_max + 1)."""

    values: FloatArray
    first: Optional[FloatArray]
    second: Optional[FloatArray]
    third: Optional[FloatArray] = None


def _check_degree(n: int) -> None:
    if n < 0:
        raise ParameterError(f"Degree must be non-negative, got {n}", n=n)


def _as_points(x: ArrayLike) -> FloatArray:
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if points.size and (np.max(np.abs(points)) > 1 + _X_SLACK or not np.all(np.isfinite(points))):
        raise ParameterError("Evaluation points must lie in [-1, 1]")
    return points


def eigenvalue(params: JacobiParams, n: int) -> float:
    """lambda_n = n(n + alpha + beta + 1)."""
    _check_degree(n)
    return n * (n + params.alpha + params.beta + 1.0)


def eigenvalues(params: JacobiParams, n_max: int) -> FloatArray:
    """lambda_0..lambda_{n_max}."""
    _check_degree(n_max)
    n = np.arange(n_max + 1, dtype=np.float64)
    return n * (n + params.alpha + params.beta + 1.0)


def zeroth_moment(params: JacobiParams) -> float:
    """mu_0 = 2^(a+b+1) B(a+1, b+1), the total mass of the weight."""
    a, b = params.alpha, params.beta
    return float(np.exp((a + b + 1.0) * np.log(2.0) + betaln(a + 1.0, b + 1.0)))


@lru_cache(maxsize=128)
def _recurrence_arrays(params: JacobiParams, n_max: int) -> Tuple[FloatArray, FloatArray]:
    a, b = params.alpha, params.beta
    off = np.zeros(n_max + 2)
    diag = np.zeros(n_max + 1)

    diag[0] = (b - a) / (a + b + 2.0)
    if n_max >= 1:
        n = np.arange(1, n_max + 1, dtype=np.float64)
        s = 2.0 * n + a + b
        diag[1:] = (b * b - a * a) / (s * (s + 2.0))

    # off[n] couples p_n and p_{n-1}; off[0] = 0 by convention.
    off[1] = np.sqrt(4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) ** 2 * (a + b + 3.0)))
    if n_max + 1 >= 2:
        n = np.arange(2, n_max + 2, dtype=np.float64)
        s = 2.0 * n + a + b
        off[2:] = (2.0 / s) * np.sqrt(
            n * (n + a) * (n + b) * (n + a + b) / ((s - 1.0) * (s + 1.0))
        )
    off.setflags(write=False)
    diag.setflags(write=False)
    return off, diag


def recurrence_arrays(params: JacobiParams, n_max: int) -> Tuple[FloatArray, FloatArray]:
    """
    Orthonormal recurrence data (a, b) with x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}.

    Returns read-only arrays a[0..n_max+1] (a[0] = 0) and b[0..n_max].
    """
    _check_degree(n_max)
    return _recurrence_arrays(params, n_max)


def recurrence_coeffs(params: JacobiParams, n: int) -> Tuple[float, float]:
    """(a_n, b_n) of the orthonormal three-term relation; a_0 = 0."""
    _check_degree(n)
    off, diag = recurrence_arrays(params, n)
    return float(off[n]), float(diag[n])


def orthonormal_table(
    params: JacobiParams, n_max: int, x: ArrayLike, derivatives: int = 0
) -> OrthonormalTable:
    """
    Evaluate p_0..p_{n_max} at x by the upward recurrence.

    derivatives=1, 2 or 3 also runs the differentiated recurrences
    p^(d)_{n+1} = ((x - b_n) p^(d)_n + d p^(d-1)_n - a_n p^(d)_{n-1}) / a_{n+1}.
    """
    _check_degree(n_max)
    if derivatives not in (0, 1, 2, 3):
        raise ParameterError(f"derivatives must be between 0 and 3, got {derivatives}")
    points = _as_points(x)
    off, diag = recurrence_arrays(params, n_max)

    values = np.zeros((points.size, n_max + 1))
    first = np.zeros_like(values) if derivatives >= 1 else None
    second = np.zeros_like(values) if derivatives >= 2 else None
    third = np.zeros_like(values) if derivatives >= 3 else None

    values[:, 0] = 1.0 / np.sqrt(zeroth_moment(params))
    for n in range(n_max):
        shifted = points - diag[n]
        prev = values[:, n - 1] if n >= 1 else 0.0
        values[:, n + 1] = (shifted * values[:, n] - off[n] * prev) / off[n + 1]
        if first is not None:
            prev1 = first[:, n - 1] if n >= 1 else 0.0
            first[:, n + 1] = (shifted * first[:, n] + values[:, n] - off[n] * prev1) / off[n + 1]
        if second is not None and first is not None:
            prev2 = second[:, n - 1] if n >= 1 else 0.0
            second[:, n + 1] = (
                shifted * second[:, n] + 2.0 * first[:, n] - off[n] * prev2
            ) / off[n + 1]
        if third is not None and second is not None:
            prev3 = third[:, n - 1] if n >= 1 else 0.0
            third[:, n + 1] = (shifted * third[:, n] + 3.0 * second[:, n] - off[n] * prev3) / off[n + 1]
    return OrthonormalTable(values, first, second, third)


def orthonormal_eval(
    params: JacobiParams, n: int, x: Union[float, ArrayLike]
) -> Union[float, FloatArray]:
    """p_n(x) for the orthonormal Jacobi family."""
    _check_degree(n)
    table = orthonormal_table(params, n, x)
    column = table.values[:, n]
    return float(column[0]) if np.ndim(x) == 0 else column


def orthonormal_derivative(
    params: JacobiParams, n: int, x: Union[float, ArrayLike]
) -> Union[float, FloatArray]:
    """p_n'(x)."""
    _check_degree(n)
    table = orthonormal_table(params, n, x, derivatives=1)
    assert table.first is not None
    column = table.first[:, n]
    return float(column[0]) if np.ndim(x) == 0 else column


def structure_coeffs_closed(params: JacobiParams, n: int) -> Tuple[float, float, float]:
    """
    Closed forms A_n = -n a_{n+1}, B_n = -(q p_n, p_n)/2, C_n = (n+a+b+1) a_n.

    They follow from comparing leading coefficients and integrating by parts
    against the Pearson relation (p w)' = q w.
    """
    _check_degree(n)
    a, b = params.alpha, params.beta
    off, diag = recurrence_arrays(params, n)
    A = -n * float(off[n + 1])
    B = -0.5 * ((b - a) - (a + b + 2.0) * float(diag[n]))
    C = (n + a + b + 1.0) * float(off[n])
    return A, B, C


def structure_coeffs(params: JacobiParams, n: int) -> StructureCoeffs:
    """
    A_n, B_n, C_n by quadrature inner products of p p_n' with p_{n+1}, p_n, p_{n-1}.

    The residual is the largest deviation of p p_n' from its three-term expansion
    over the quadrature nodes, relative to max |p p_n'|.
    """
    from .quadrature import integrate

    if n < 1:
        raise ParameterError(f"structure_coeffs needs n >= 1, got {n}", n=n)

    def integrand(x: FloatArray) -> FloatArray:
        table = orthonormal_table(params, n + 1, x, derivatives=1)
        assert table.first is not None
        lhs = (1.0 - x * x) * table.first[:, n]
        return lhs[:, None] * table.values[:, [n + 1, n, n - 1]]

    result = integrate(integrand, params, degree_hint=2 * n + 2)
    A, B, C = (float(v) for v in result.value)

    nodes = result.nodes
    table = orthonormal_table(params, n + 1, nodes, derivatives=1)
    assert table.first is not None
    lhs = (1.0 - nodes**2) * table.first[:, n]
    rhs = A * table.values[:, n + 1] + B * table.values[:, n] + C * table.values[:, n - 1]
    scale = max(1.0, float(np.max(np.abs(lhs))))
    residual = float(np.max(np.abs(lhs - rhs))) / scale
    return StructureCoeffs(n, A, B, C, residual)


def coefficient_table(params: JacobiParams, n_max: int) -> List[Tuple[int, float, float, float, float, float]]:
    """Rows (n, a_n, b_n, A_n, B_n, C_n) for n = 0..n_max from the closed forms."""
    _check_degree(n_max)
    off, diag = recurrence_arrays(params, n_max)
    rows = []
    for n in range(n_max + 1):
        A, B, C = structure_coeffs_closed(params, n)
        rows.append((n, float(off[n]), float(diag[n]), A, B, C))
    return rows


def normalized_moment(params: JacobiParams, k: int) -> Fraction:
    """
    Exact k-th moment of the weight divided by mu_0.

    With x = 2t - 1 the normalized weight is a Beta(beta+1, alpha+1) law in t, whose
    moments are rising-factorial ratios; parameters enter as exact binary fractions.
    """
    _check_degree(k)
    a, b = Fraction(params.alpha), Fraction(params.beta)
    t_moments = [Fraction(1)]
    for i in range(k):
        t_moments.append(t_moments[-1] * (b + 1 + i) / (a + b + 2 + i))
    return sum(
        (Fraction(comb(k, j)) * 2**j * (-1) ** (k - j) * t_moments[j] for j in range(k + 1)),
        Fraction(0),
    )
