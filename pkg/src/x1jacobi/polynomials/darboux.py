"""
Codimension-one Darboux factorization of the Jacobi operator.

For the X1 family with labels (alpha, beta), weight
W(x) = (1-x)^alpha (1+x)^beta / (x - c)^2, the transform starts from a classical
partner family whose exponent at one endpoint e in {+1, -1} is raised by one:
(alpha + 1, beta - 1) for e = +1 and (alpha - 1, beta + 1) for e = -1.

With p = 1 - x^2 and q = (b - a) - (a + b + 2) x for the partner (a, b), the
superpotential is w = g/b, b(x) = (x - e)(x - c), g(x) = g1 x + g0, and the
Riccati equation p(w' + w^2) + q w = lambda_hat is cleared to the degree-4
identity

    p (g' b - g b' + g^2) + q g b - lambda_hat b^2 = 0.

Matching the roots of b against p and the leading coefficients gives, with kappa
the partner exponent at e, s = a + b + 2 and d = b - a,

    g1 = 1 - kappa,  g0 = kappa c - e,  lambda_hat = (kappa - 1)(s - kappa),
    (2 kappa - s)(c - e kappa) = d (kappa - 1).

The remaining coefficient equations are checked by exact polynomial algebra
rather than assumed. Under the positive eigenvalue convention lambda_tilde = -lambda_hat.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import sympy
from scipy.optimize import least_squares

from ..core.exceptions import AdmissibilityError, ParameterError
from ..utils.logging import get_logger, timing_decorator
from .jacobi import JacobiParams

logger = get_logger(__name__)

X = sympy.Symbol("x")

# Exact rational recovery for float labels such as 0.5 or 1.5.
_RATIONAL_DENOMINATOR_LIMIT = 10**6
# Seeds for irrational labels come from coarser rational neighbours.
_SEED_DENOMINATOR_LIMIT = 10**3
RICCATI_TOL = 1e-12
NORM_CHECK_DEGREE = 10**4


def _poly(expr: Any) -> sympy.Poly:
    return sympy.Poly(expr, X, domain=sympy.QQ)


def to_rational(value: float, limit: int = _RATIONAL_DENOMINATOR_LIMIT) -> Optional[sympy.Rational]:
    """Rational with denominator <= limit that reproduces value exactly, if any."""
    candidate = Fraction(value).limit_denominator(limit)
    if float(candidate) != float(value):
        return None
    return sympy.Rational(candidate.numerator, candidate.denominator)


@dataclass(frozen=True)
class ExactDarboux:
    """Rational data of one Darboux branch; polynomials are built on demand."""

    e: int
    a: sympy.Rational
    b: sympy.Rational
    c: sympy.Rational
    g0: sympy.Rational
    g1: sympy.Rational
    lambda_hat: sympy.Rational

    def p(self) -> sympy.Poly:
        return _poly(1 - X**2)

    def q(self) -> sympy.Poly:
        return _poly((self.b - self.a) - (self.a + self.b + 2) * X)

    def b_poly(self) -> sympy.Poly:
        return _poly((X - self.e) * (X - self.c))

    def g_poly(self) -> sympy.Poly:
        return _poly(self.g1 * X + self.g0)

    def btilde(self) -> sympy.Poly:
        return _poly(X - self.c)

    def ptilde(self) -> sympy.Poly:
        return _poly(-(X + self.e))

    def Q(self) -> sympy.Poly:
        """Q(x) = x^2/2 - c x, the antiderivative of btilde with Q(0) = 0."""
        return _poly(X**2 / 2 - self.c * X)

    def h_poly(self) -> sympy.Poly:
        """Linear h with (x+e) g - q (x-c) - (x+e) b' = (x-e) h."""
        numerator = (
            _poly(X + self.e) * self.g_poly()
            - self.q() * self.btilde()
            - _poly(X + self.e) * self.b_poly().diff(X)
        )
        h, remainder = numerator.div(_poly(X - self.e))
        if not remainder.is_zero:
            raise AdmissibilityError(
                "B-operator numerator is not divisible by (x - e)", branch=self.describe()
            )
        return h

    def riccati_residual(self) -> sympy.Poly:
        p, q, b, g = self.p(), self.q(), self.b_poly(), self.g_poly()
        return p * (g.diff(X) * b - g * b.diff(X) + g**2) + q * g * b - self.lambda_hat * b**2

    def describe(self) -> Dict[str, Any]:
        return {
            "e": self.e,
            "partner": (str(self.a), str(self.b)),
            "c": str(self.c),
            "g0": str(self.g0),
            "g1": str(self.g1),
            "lambda_hat": str(self.lambda_hat),
        }


@dataclass(frozen=True)
class DarbouxData:
    """
    Everything defining the X1 transform, in floats, with the exact branch attached.

    Q_coeffs and ptilde_g_coeffs are ascending power coefficients.
    """

    c: float
    g0: float
    g1: float
    lambda_tilde: float
    d0: float
    d1: float
    ptilde_g_coeffs: Tuple[float, ...]
    Q_coeffs: Tuple[float, float, float]
    endpoint: int
    labels: JacobiParams
    partner: JacobiParams
    riccati_residual: float
    exact: ExactDarboux = field(repr=False, compare=False)

    @property
    def lambda_hat(self) -> float:
        return -self.lambda_tilde

    def Q(self, x: Any) -> Any:
        """Q(x) = (d1/2) x^2 + d0 x."""
        return self.Q_coeffs[2] * x * x + self.Q_coeffs[1] * x

    def Q_range(self) -> Tuple[float, float]:
        """Image of [-1, 1] under the monotone Q."""
        ends = (self.Q(-1.0), self.Q(1.0))
        return min(ends), max(ends)

    def norms(self, n_max: int) -> np.ndarray:
        """lambda_n - lambda_tilde for n = 0..n_max."""
        n = np.arange(n_max + 1, dtype=np.float64)
        return n * (n + self.partner.alpha + self.partner.beta + 1.0) - self.lambda_tilde

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "g0": self.g0,
            "g1": self.g1,
            "lambda_tilde": self.lambda_tilde,
            "d0": self.d0,
            "d1": self.d1,
            "endpoint": self.endpoint,
            "alpha": self.labels.alpha,
            "beta": self.labels.beta,
            "partner_alpha": self.partner.alpha,
            "partner_beta": self.partner.beta,
            "ptilde_g_coeffs": list(self.ptilde_g_coeffs),
            "Q_coeffs": list(self.Q_coeffs),
            "riccati_residual": self.riccati_residual,
        }


@dataclass
class _Branch:
    e: int
    partner: Tuple[float, float]
    exact: Optional[ExactDarboux] = None
    reason: Optional[str] = None
    residual: float = float("nan")

    @property
    def admissible(self) -> bool:
        return self.exact is not None and self.reason is None

    def describe(self) -> Dict[str, Any]:
        info: Dict[str, Any] = {"e": self.e, "partner": self.partner}
        if self.exact is not None:
            info["c"] = float(self.exact.c)
            info["lambda_tilde"] = -float(self.exact.lambda_hat)
        info["status"] = "admissible" if self.admissible else (self.reason or "rejected")
        return info


def _partner_exponents(e: int, alpha: Any, beta: Any) -> Tuple[Any, Any]:
    return (alpha + 1, beta - 1) if e == 1 else (alpha - 1, beta + 1)


def eliminate(e: int, a: sympy.Rational, b: sympy.Rational) -> Optional[ExactDarboux]:
    """Closed-form elimination for one endpoint; None when the pole would be at infinity."""
    kappa = a if e == 1 else b
    s = a + b + 2
    d = b - a
    if 2 * kappa - s == 0:
        return None
    c = e * kappa + d * (kappa - 1) / (2 * kappa - s)
    return ExactDarboux(
        e=e,
        a=a,
        b=b,
        c=sympy.Rational(c),
        g0=sympy.Rational(kappa * c - e),
        g1=sympy.Rational(1 - kappa),
        lambda_hat=sympy.Rational((kappa - 1) * (s - kappa)),
    )


def _residual_vector(unknowns: np.ndarray, e: int, a: float, b: float) -> np.ndarray:
    """Coefficients (x^0..x^4) of the cleared Riccati residual in floating point."""
    c, g0, g1, lam = unknowns
    P = np.polynomial.Polynomial
    p = P([1.0, 0.0, -1.0])
    q = P([b - a, -(a + b + 2.0)])
    bb = P([-e, 1.0]) * P([-c, 1.0])
    g = P([g0, g1])
    residual = p * (g.deriv() * bb - g * bb.deriv() + g * g) + q * g * bb - lam * bb * bb
    coefficients = np.zeros(5)
    coefficients[: residual.coef.size] = residual.coef[:5]
    return coefficients


def _polish(seed: ExactDarboux, e: int, a: float, b: float) -> ExactDarboux:
    """Levenberg-Marquardt polish of a rational-neighbour solution at float partner exponents."""
    start = np.array([float(seed.c), float(seed.g0), float(seed.g1), float(seed.lambda_hat)])
    result = least_squares(
        _residual_vector, start, args=(e, a, b), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
    )
    c, g0, g1, lam = (float(v) for v in result.x)
    return ExactDarboux(
        e=e,
        a=sympy.Rational(a),
        b=sympy.Rational(b),
        c=sympy.Rational(c),
        g0=sympy.Rational(g0),
        g1=sympy.Rational(g1),
        lambda_hat=sympy.Rational(lam),
    )


def _branch(e: int, alpha: float, beta: float) -> _Branch:
    a_f, b_f = _partner_exponents(e, alpha, beta)
    branch = _Branch(e=e, partner=(a_f, b_f))
    if a_f <= -1 or b_f <= -1:
        branch.reason = "partner exponents leave (-1, inf)"
        return branch

    alpha_r, beta_r = to_rational(alpha), to_rational(beta)
    if alpha_r is not None and beta_r is not None:
        a_r, b_r = _partner_exponents(e, alpha_r, beta_r)
        exact = eliminate(e, a_r, b_r)
        if exact is None:
            branch.reason = "no finite pole"
            return branch
    else:
        seed_alpha = to_rational(float(Fraction(alpha).limit_denominator(_SEED_DENOMINATOR_LIMIT)))
        seed_beta = to_rational(float(Fraction(beta).limit_denominator(_SEED_DENOMINATOR_LIMIT)))
        assert seed_alpha is not None and seed_beta is not None
        seed = eliminate(e, *_partner_exponents(e, seed_alpha, seed_beta))
        if seed is None:
            branch.reason = "no finite pole at the rational seed"
            return branch
        exact = _polish(seed, e, a_f, b_f)
        logger.info(
            "Polished irrational Darboux branch",
            extra={"context": {"e": e, "c": float(exact.c)}},
        )

    branch.exact = exact
    coefficients = exact.riccati_residual().all_coeffs()
    branch.residual = max((abs(float(v)) for v in coefficients), default=0.0)
    g = exact.g_poly()
    if branch.residual > RICCATI_TOL:
        branch.reason = f"Riccati residual {branch.residual:.3e} above tolerance"
    elif g.eval(exact.c) == 0 or g.eval(exact.e) == 0:
        branch.reason = "superpotential not in lowest terms"
    elif abs(exact.c) <= 1:
        branch.reason = "pole inside [-1, 1]"
    else:
        n = np.arange(NORM_CHECK_DEGREE + 1, dtype=np.float64)
        norms = n * (n + a_f + b_f + 1.0) + float(exact.lambda_hat)
        if not np.all(norms > 0):
            branch.reason = "non-positive exceptional norm"
    return branch


def _build(labels: JacobiParams, branch: _Branch) -> DarbouxData:
    exact = branch.exact
    assert exact is not None
    c, g0, g1 = float(exact.c), float(exact.g0), float(exact.g1)
    e = exact.e
    ptilde_g = exact.ptilde() * exact.g_poly()
    ptilde_g_coeffs = tuple(float(v) for v in reversed(ptilde_g.all_coeffs()))
    return DarbouxData(
        c=c,
        g0=g0,
        g1=g1,
        lambda_tilde=-float(exact.lambda_hat),
        d0=-c,
        d1=1.0,
        ptilde_g_coeffs=ptilde_g_coeffs,
        Q_coeffs=(0.0, -c, 0.5),
        endpoint=e,
        labels=labels,
        partner=JacobiParams(*branch.partner),
        riccati_residual=branch.residual,
        exact=exact,
    )


@timing_decorator("darboux.solve_riccati")
def solve_riccati(params: JacobiParams) -> DarbouxData:
    """
    Solve the codimension-one Riccati problem for X1 labels (alpha, beta).

    Both endpoint routes are tried. Routes that reach the same pole describe the same
    family and count as one branch; the e = +1 route is preferred. No admissible branch,
    or admissible branches with different poles, raise AdmissibilityError listing every
    branch examined.
    """
    alpha, beta = params.alpha, params.beta
    if alpha == beta:
        raise AdmissibilityError(
            f"X1 admissibility needs alpha != beta, got alpha = beta = {alpha}",
            alpha=alpha,
            beta=beta,
        )
    if alpha * beta <= 0:
        raise AdmissibilityError(
            f"X1 admissibility needs alpha * beta > 0, got ({alpha}, {beta})",
            alpha=alpha,
            beta=beta,
        )

    branches = [_branch(e, alpha, beta) for e in (1, -1)]
    admissible = [branch for branch in branches if branch.admissible]
    described = [branch.describe() for branch in branches]
    if not admissible:
        raise AdmissibilityError(
            f"No admissible Darboux branch for ({alpha}, {beta})", branches=described
        )
    poles = {float(branch.exact.c) for branch in admissible if branch.exact is not None}
    if max(poles) - min(poles) > 1e-9 * max(1.0, max(abs(p) for p in poles)):
        raise AdmissibilityError(
            f"Multiple admissible Darboux branches for ({alpha}, {beta})", branches=described
        )

    data = _build(params, admissible[0])
    logger.info(
        "Darboux factorization solved",
        extra={"context": {"alpha": alpha, "beta": beta, "c": data.c, "lambda_tilde": data.lambda_tilde}},
    )
    return data


def riccati_residual_coeffs(data: DarbouxData) -> List[float]:
    """Coefficients of the cleared Riccati residual polynomial, ascending."""
    return [float(v) for v in reversed(data.exact.riccati_residual().all_coeffs())]


def require_admissible(data: DarbouxData) -> None:
    """Re-check the invariants of a DarbouxData built elsewhere."""
    if abs(data.c) <= 1:
        raise ParameterError(f"Pole c = {data.c} lies inside [-1, 1]")
    if np.any(data.norms(NORM_CHECK_DEGREE) <= 0):
        raise ParameterError("Exceptional norms lambda_n - lambda_tilde must be positive")
