"""
Gauss-Jacobi rules and the adaptive doubling protocol used for every inner product.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import roots_jacobi

from ..core.config import settings
from ..core.exceptions import EigensolverFailure, ParameterError, QuadratureNonConvergence
from ..utils.logging import get_logger
from .jacobi import JacobiParams, recurrence_arrays, zeroth_moment

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]
Integrand = Callable[[FloatArray], NDArray[np.float64]]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in (-1, 1), strictly increasing, with positive weights."""

    nodes: FloatArray
    weights: FloatArray

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    def apply(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        """Contract the leading (node) axis of values against the weights."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class AdaptiveResult:
    """Converged integral with the rule that produced it."""

    value: NDArray[np.float64]
    node_count: int
    error_estimate: float
    nodes: FloatArray


def _golub_welsch(params: JacobiParams, m: int) -> QuadratureRule:
    off, diag = recurrence_arrays(params, m)
    mu0 = zeroth_moment(params)
    if m == 1:
        return QuadratureRule(np.array([diag[0]]), np.array([mu0]))
    try:
        nodes, vectors = eigh_tridiagonal(np.array(diag[:m]), np.array(off[1:m]))
    except LinAlgError as exc:
        raise EigensolverFailure(f"Golub-Welsch eigensolve failed for m={m}: {exc}") from exc
    weights = mu0 * vectors[0, :] ** 2
    return QuadratureRule(nodes, weights)


@lru_cache(maxsize=64)
def gauss_rule(params: JacobiParams, m: int) -> QuadratureRule:
    """
    m-point Gauss-Jacobi rule, exact for degree <= 2m - 1 against the weight.

    Up to GOLUB_WELSCH_MAX_NODES the rule comes from the symmetric tridiagonal
    recurrence matrix (nodes are eigenvalues, weights are mu_0 times squared first
    eigenvector components). Larger rules use scipy's roots_jacobi, which avoids the
    O(m^2) eigenvector storage.
    """
    if m < 1:
        raise ParameterError(f"Node count must be >= 1, got {m}", m=m)
    if m <= settings.quadrature.GOLUB_WELSCH_MAX_NODES:
        rule = _golub_welsch(params, m)
    else:
        nodes, weights = roots_jacobi(m, params.alpha, params.beta)
        rule = QuadratureRule(np.asarray(nodes, dtype=np.float64), np.asarray(weights, dtype=np.float64))

    if not (np.all(np.isfinite(rule.nodes)) and np.all(rule.weights > 0)):
        raise EigensolverFailure(f"Gauss-Jacobi rule with m={m} is degenerate", m=m)
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


def starting_nodes(degree_hint: int, initial: Optional[int] = None) -> int:
    """Smallest doubling of the initial node count that is exact for degree_hint."""
    m = initial or settings.quadrature.INITIAL_NODES
    while 2 * m - 1 < degree_hint:
        m *= 2
    return m


def integrate(
    integrand: Integrand,
    params: JacobiParams,
    degree_hint: int = 0,
    rtol: Optional[float] = None,
    max_nodes: Optional[int] = None,
) -> AdaptiveResult:
    """
    Integrate integrand(x) * (1-x)^alpha (1+x)^beta over [-1, 1].

    The integrand maps a node vector to an array whose leading axis runs over the
    nodes; any trailing shape is integrated elementwise. Node counts double from
    max(INITIAL_NODES, exactness bound of degree_hint) until two successive results
    agree to rtol relative to max(1, max |value|); past max_nodes the integral is
    reported as non-convergent.
    """
    rtol = rtol if rtol is not None else settings.quadrature.RELATIVE_TOL
    max_nodes = max_nodes or settings.quadrature.MAX_NODES

    m = starting_nodes(degree_hint)
    rule = gauss_rule(params, m)
    previous = rule.apply(np.asarray(integrand(rule.nodes), dtype=np.float64))
    while True:
        m *= 2
        if m > max_nodes:
            raise QuadratureNonConvergence(
                f"Adaptive quadrature did not converge within {max_nodes} nodes",
                max_nodes=max_nodes,
                alpha=params.alpha,
                beta=params.beta,
            )
        rule = gauss_rule(params, m)
        current = rule.apply(np.asarray(integrand(rule.nodes), dtype=np.float64))
        scale = max(1.0, float(np.max(np.abs(current)))) if current.size else 1.0
        error = float(np.max(np.abs(current - previous))) / scale if current.size else 0.0
        if error <= rtol:
            logger.debug(
                f"Quadrature converged with {m} nodes",
                extra={"context": {"nodes": m, "error": error}},
            )
            return AdaptiveResult(current, m, error, rule.nodes)
        previous = current
