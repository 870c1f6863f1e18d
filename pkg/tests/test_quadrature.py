"""Tests for Gauss-Jacobi rules and the adaptive integrator."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from x1jacobi.core.exceptions import ParameterError, QuadratureNonConvergence
from x1jacobi.polynomials.jacobi import JacobiParams, normalized_moment, zeroth_moment
from x1jacobi.polynomials.quadrature import gauss_rule, integrate, starting_nodes

DEFAULT = JacobiParams(2.0, 1.0)
LEGENDRE = JacobiParams(0.0, 0.0)


class TestGaussRule:
    def test_single_node(self):
        rule = gauss_rule(LEGENDRE, 1)
        assert_allclose(rule.nodes, [0.0], atol=1e-15)
        assert_allclose(rule.weights, [2.0], rtol=1e-14)

    def test_two_nodes(self):
        rule = gauss_rule(LEGENDRE, 2)
        assert_allclose(rule.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], rtol=1e-14)
        assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-14)

    def test_exact_for_degree_2m_minus_1(self):
        rule = gauss_rule(DEFAULT, 5)
        for k in range(10):
            exact = float(normalized_moment(DEFAULT, k)) * zeroth_moment(DEFAULT)
            assert_allclose(np.sum(rule.weights * rule.nodes**k), exact, atol=1e-12)

    def test_nodes_sorted_and_weights_positive(self):
        rule = gauss_rule(DEFAULT, 64)
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(rule.weights > 0)
        assert np.all(np.abs(rule.nodes) < 1)

    def test_large_rule_uses_same_convention(self):
        small = gauss_rule(DEFAULT, 1024)
        large = gauss_rule(DEFAULT, 2048)
        assert_allclose(np.sum(small.weights), np.sum(large.weights), rtol=1e-12)

    def test_rejects_zero_nodes(self):
        with pytest.raises(ParameterError):
            gauss_rule(DEFAULT, 0)


class TestIntegrate:
    def test_polynomial_moment(self):
        result = integrate(lambda x: x**6, DEFAULT, degree_hint=6)
        exact = float(normalized_moment(DEFAULT, 6)) * zeroth_moment(DEFAULT)
        assert_allclose(result.value, exact, atol=1e-12)

    def test_matrix_valued_integrand(self):
        powers = np.arange(4)
        result = integrate(lambda x: x[:, None, None] ** (powers[None, :, None] + powers[None, None, :]), LEGENDRE)
        expected = np.array([[2 / (i + j + 1) if (i + j) % 2 == 0 else 0.0 for j in powers] for i in powers])
        assert result.value.shape == (4, 4)
        assert_allclose(result.value, expected, atol=1e-14)

    def test_non_convergence(self):
        with pytest.raises(QuadratureNonConvergence):
            integrate(lambda x: np.sign(x - 0.1), DEFAULT, max_nodes=256)

    def test_starting_nodes(self):
        assert starting_nodes(10, initial=4) == 8
        assert starting_nodes(0, initial=64) == 64
        assert starting_nodes(300, initial=64) == 256
