"""
The orthonormal X1-Jacobi family and the intertwining operators around it.

P_n = A[p_n] / sqrt(lambda_n - lambda_tilde), with A[y] = b y' - g y applied to the
orthonormal partner polynomials p_n. P_n has degree n + 1 and the family is
orthonormal against W(x) = (1-x)^alpha (1+x)^beta / (x - c)^2.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
import sympy
from numpy.polynomial import Polynomial
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln
from sympy.polys.orthopolys import jacobi_poly

from ..core.exceptions import ParameterError
from ..utils.logging import get_logger
from .darboux import X, DarbouxData, solve_riccati
from .jacobi import JacobiParams, OrthonormalTable, _as_points, _check_degree, orthonormal_table, zeroth_moment
from .quadrature import AdaptiveResult, integrate

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]
Scalar = Union[float, FloatArray]


class ExactExceptional(NamedTuple):
    """A applied to the standard-normalization Jacobi polynomial, and the factor making it orthonormal."""

    poly: sympy.Poly
    scale: float


@dataclass(frozen=True, eq=False)
class ExceptionalBasis:
    """
    Orthonormal X1 family.

    `params` is the classical partner family the factorization acts on; `labels` are the
    exponents of the exceptional weight W.
    """

    params: JacobiParams
    darboux: DarbouxData

    @property
    def labels(self) -> JacobiParams:
        return self.darboux.labels

    @property
    def c(self) -> float:
        return self.darboux.c

    def norm(self, n: int) -> float:
        """lambda_n - lambda_tilde, the squared W-norm of A p_n."""
        _check_degree(n)
        return float(self.darboux.norms(n)[n])

    def norms(self, n_max: int) -> FloatArray:
        _check_degree(n_max)
        return self.darboux.norms(n_max)

    def weight_factor(self, x: ArrayLike) -> FloatArray:
        """1/(x - c)^2, the rational part of W over the label weight."""
        points = np.asarray(x, dtype=np.float64)
        return 1.0 / (points - self.c) ** 2

    def Q(self, x: ArrayLike) -> FloatArray:
        return np.asarray(self.darboux.Q(np.asarray(x, dtype=np.float64)))

    @cached_property
    def h_coeffs(self) -> Tuple[float, float]:
        """(h0, h1) of the linear numerator in the cancelled form of B."""
        h = self.darboux.exact.h_poly()
        coeffs = [float(v) for v in reversed(h.all_coeffs())] + [0.0, 0.0]
        return coeffs[0], coeffs[1]

    @cached_property
    def _ode_coeffs(self) -> Tuple[sympy.Poly, sympy.Poly, sympy.Poly, sympy.Poly]:
        exact = self.darboux.exact
        e, c = exact.e, exact.c
        xe_minus = sympy.Poly(X - e, X, domain=sympy.QQ)
        xe_plus = sympy.Poly(X + e, X, domain=sympy.QQ)
        xc = exact.btilde()
        g, h = exact.g_poly(), exact.h_poly()
        C2 = xe_minus * xe_plus * xc**2
        C1 = xc * (xe_minus * (h - c - e) - g * xe_plus)
        C0 = xe_minus * (xc * h.diff(X) - 2 * h) - g * h
        return C2, C1, C0, xc**2


def build_basis(labels: JacobiParams) -> ExceptionalBasis:
    """Solve the Riccati problem for labels and wrap the result as a basis."""
    darboux = solve_riccati(labels)
    return ExceptionalBasis(darboux.partner, darboux)


def exceptional_table(
    basis: ExceptionalBasis, n_max: int, x: ArrayLike, derivatives: int = 0
) -> OrthonormalTable:
    """P_0..P_{n_max} (and P_k' when derivatives=1) at x; shape (len(x), n_max + 1)."""
    if derivatives not in (0, 1):
        raise ParameterError(f"derivatives must be 0 or 1, got {derivatives}")
    unnormalized = apply_A_table(basis, n_max, x, derivatives)
    scale = 1.0 / np.sqrt(basis.norms(n_max))
    first = unnormalized.first * scale if unnormalized.first is not None else None
    return OrthonormalTable(unnormalized.values * scale, first, None)


def apply_A_table(
    basis: ExceptionalBasis, n_max: int, x: ArrayLike, derivatives: int = 0
) -> OrthonormalTable:
    """A p_0..A p_{n_max} and up to two of their derivatives, unnormalized."""
    _check_degree(n_max)
    if derivatives not in (0, 1, 2):
        raise ParameterError(f"derivatives must be 0, 1 or 2, got {derivatives}")
    points = _as_points(x)
    d = basis.darboux
    classical = orthonormal_table(basis.params, n_max, points, derivatives=derivatives + 1)
    assert classical.first is not None

    b = ((points - d.endpoint) * (points - d.c))[:, None]
    g = (d.g1 * points + d.g0)[:, None]
    values = b * classical.first - g * classical.values
    first = second = None
    if derivatives:
        assert classical.second is not None
        db = (2.0 * points - d.endpoint - d.c)[:, None]
        first = (db - g) * classical.first + b * classical.second - d.g1 * classical.values
        if derivatives == 2:
            assert classical.third is not None
            second = (2.0 - 2.0 * d.g1) * classical.first + (2.0 * db - g) * classical.second + b * classical.third
    return OrthonormalTable(values, first, second)


def apply_A(basis: ExceptionalBasis, n: int, x: Union[float, ArrayLike]) -> Scalar:
    """(A p_n)(x) = b(x) p_n'(x) - g(x) p_n(x)."""
    _check_degree(n)
    column = apply_A_table(basis, n, x).values[:, n]
    return float(column[0]) if np.ndim(x) == 0 else column


def orthonormal_exceptional_eval(basis: ExceptionalBasis, n: int, x: Union[float, ArrayLike]) -> Scalar:
    """P_n(x) = (A p_n)(x) / sqrt(lambda_n - lambda_tilde)."""
    _check_degree(n)
    norm = basis.norm(n)
    if norm <= 0:
        raise ParameterError(f"Exceptional norm for n={n} is not positive: {norm}", n=n)
    column = apply_A_table(basis, n, x).values[:, n] / np.sqrt(norm)
    return float(column[0]) if np.ndim(x) == 0 else column


def exceptional_weight(basis: ExceptionalBasis, x: Union[float, ArrayLike]) -> Scalar:
    """W(x) = (1-x)^alpha (1+x)^beta / (x - c)^2."""
    points = _as_points(x)
    labels = basis.labels
    values = (1.0 - points) ** labels.alpha * (1.0 + points) ** labels.beta * basis.weight_factor(points)
    return float(values[0]) if np.ndim(x) == 0 else values


def apply_B(
    basis: ExceptionalBasis,
    f: Callable[[FloatArray], Any],
    x: Union[float, ArrayLike],
    df: Optional[Callable[[FloatArray], Any]] = None,
) -> Scalar:
    """
    B[f](x) = ((x+e)/(x-c)) f'(x) + (h(x)/(x-c)^2) f(x).

    f' is taken from df, or from f.deriv() when f is a numpy Polynomial.
    """
    if df is None:
        if not isinstance(f, Polynomial):
            raise ParameterError("apply_B needs df unless f is a numpy Polynomial")
        df = f.deriv()
    points = _as_points(x)
    d = basis.darboux
    h0, h1 = basis.h_coeffs
    values = (points + d.endpoint) / (points - d.c) * np.asarray(df(points), dtype=np.float64)
    values = values + (h1 * points + h0) / (points - d.c) ** 2 * np.asarray(f(points), dtype=np.float64)
    return float(values[0]) if np.ndim(x) == 0 else values


def _standard_norm_sq_log(params: JacobiParams, n: int) -> float:
    """log of the squared norm of the standard-normalization Jacobi polynomial."""
    a, b = params.alpha, params.beta
    if n == 0:
        return float(np.log(zeroth_moment(params)))
    return float(
        (a + b + 1.0) * np.log(2.0)
        - np.log(2.0 * n + a + b + 1.0)
        + gammaln(n + a + 1.0)
        + gammaln(n + b + 1.0)
        - gammaln(n + a + b + 1.0)
        - gammaln(n + 1.0)
    )


@lru_cache(maxsize=256)
def exceptional_polynomial(basis: ExceptionalBasis, n: int) -> ExactExceptional:
    """
    Exact coefficient form of A P_n^(a,b) and the float factor with P_n = scale * poly.

    The polynomial has rational coefficients whenever the partner exponents do.
    """
    _check_degree(n)
    exact = basis.darboux.exact
    classical = sympy.Poly(jacobi_poly(n, exact.a, exact.b, X), X, domain=sympy.QQ)
    poly = exact.b_poly() * classical.diff(X) - exact.g_poly() * classical
    scale = float(np.exp(-0.5 * _standard_norm_sq_log(basis.params, n))) / np.sqrt(basis.norm(n))
    return ExactExceptional(poly, scale)


def ode_residual(
    basis: ExceptionalBasis, n: int, x: float, factor: float = 1.0, relative: bool = False
) -> float:
    """
    Residual of the second-order equation satisfied by y = factor * P_n, at x.

    The equation is cleared of denominators,
    C2 y'' + C1 y' + C0 y - (lambda_n - lambda_tilde)(x - c)^2 y = 0, each term is
    evaluated exactly at the rational value of x and summed in floating point. With
    relative=True the residual is divided by the largest term magnitude.
    """
    _check_degree(n)
    _as_points(x)
    C2, C1, C0, pole_sq = basis._ode_coeffs
    exact = basis.darboux.exact
    form = exceptional_polynomial(basis, n)
    y = form.poly
    eigen = n * (n + exact.a + exact.b + 1) + exact.lambda_hat

    point = sympy.Rational(float(x))
    terms = (
        C2.eval(point) * y.diff(X).diff(X).eval(point),
        C1.eval(point) * y.diff(X).eval(point),
        C0.eval(point) * y.eval(point),
        -eigen * pole_sq.eval(point) * y.eval(point),
    )
    scale = form.scale * factor
    values = [float(term) * scale for term in terms]
    residual = float(sum(values))
    if not relative:
        return residual
    largest = max(abs(v) for v in values)
    return abs(residual) / largest if largest > 0 else 0.0


def ode_residual_nodes(basis: ExceptionalBasis, n_max: int, x: ArrayLike) -> FloatArray:
    """
    Relative residual of the cleared equation for A p_0..A p_{n_max} at x, in floating point.

    y, y' and y'' come from the partner recurrence through A, not from the exact
    construction. Shape (len(x), n_max + 1); each entry is |sum of terms| over the
    largest term magnitude.
    """
    points = _as_points(x)
    table = apply_A_table(basis, n_max, points, derivatives=2)
    assert table.first is not None and table.second is not None
    C2, C1, C0, pole_sq = (
        Polynomial([float(coeff) for coeff in reversed(poly.all_coeffs())])(points)[:, None]
        for poly in basis._ode_coeffs
    )
    eigen = basis.norms(n_max)[None, :]
    terms = np.stack(
        [C2 * table.second, C1 * table.first, C0 * table.values, -eigen * pole_sq * table.values]
    )
    residual = np.abs(np.sum(terms, axis=0))
    largest = np.max(np.abs(terms), axis=0)
    return np.divide(residual, largest, out=np.zeros_like(residual), where=largest > 0)


def integrate_w(
    basis: ExceptionalBasis,
    integrand: Callable[[FloatArray], NDArray[np.float64]],
    degree_hint: int = 0,
) -> AdaptiveResult:
    """Integrate integrand against W using the label rule times 1/(x - c)^2."""

    def weighted(x: FloatArray) -> NDArray[np.float64]:
        values = np.asarray(integrand(x), dtype=np.float64)
        factor = basis.weight_factor(x).reshape((-1,) + (1,) * (values.ndim - 1))
        return values * factor

    return integrate(weighted, basis.labels, degree_hint=degree_hint)


def gram_matrix(basis: ExceptionalBasis, n_max: int) -> FloatArray:
    """W-Gram matrix of P_0..P_{n_max}."""

    def integrand(x: FloatArray) -> FloatArray:
        values = exceptional_table(basis, n_max, x).values
        return values[:, :, None] * values[:, None, :]

    return integrate_w(basis, integrand, degree_hint=2 * n_max + 2).value


def adjoint_defect(basis: ExceptionalBasis, f: Polynomial, h: Polynomial) -> float:
    """|<A f, h>_W - <f, B h>_classical| for polynomials f and h."""
    d = basis.darboux
    b = Polynomial([d.endpoint * d.c, -(d.endpoint + d.c), 1.0])
    g = Polynomial([d.g0, d.g1])
    Af = b * f.deriv() - g * f
    degree = Af.degree() + h.degree()

    left = integrate_w(basis, lambda x: Af(x) * h(x), degree_hint=degree).value
    right = integrate(
        lambda x: f(x) * np.asarray(apply_B(basis, h, x), dtype=np.float64),
        basis.params,
        degree_hint=degree,
    ).value
    defect = float(abs(left - right))
    logger.debug("Adjoint defect", extra={"context": {"defect": defect, "degree": degree}})
    return defect
