"""Tests for the orthonormal X1 family and its intertwining operators."""

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from numpy.testing import assert_allclose
from scipy.special import eval_jacobi

from x1jacobi.core.exceptions import ParameterError
from x1jacobi.polynomials.quadrature import gauss_rule
from x1jacobi.polynomials.exceptional import (
    adjoint_defect,
    apply_A,
    apply_B,
    exceptional_polynomial,
    exceptional_table,
    exceptional_weight,
    gram_matrix,
    apply_A_table,
    ode_residual,
    ode_residual_nodes,
    orthonormal_exceptional_eval,
)

SAMPLE = np.cos(np.pi * (np.arange(20) + 0.5) / 20)


def as_numpy(poly) -> Polynomial:
    return Polynomial([float(v) for v in reversed(poly.all_coeffs())])


class TestBasis:
    def test_labels_and_partner(self, basis):
        assert (basis.labels.alpha, basis.labels.beta) == (2.0, 1.0)
        assert (basis.params.alpha, basis.params.beta) == (3.0, 0.0)
        assert basis.c == -3.0

    def test_norms_positive(self, basis):
        norms = basis.norms(100)
        assert np.all(norms > 0)
        assert_allclose(norms[:3], [4.0, 9.0, 16.0])

    def test_weight_positive_inside(self, basis):
        x = np.linspace(-0.99, 0.99, 50)
        assert np.all(np.asarray(exceptional_weight(basis, x)) > 0)


class TestOrthonormality:
    def test_gram_is_identity(self, basis):
        gram = gram_matrix(basis, 20)
        assert np.max(np.abs(gram - np.eye(21))) < 1e-8

    def test_mirrored_gram(self, mirrored_basis):
        gram = gram_matrix(mirrored_basis, 10)
        assert np.max(np.abs(gram - np.eye(11))) < 1e-8

    @pytest.mark.parametrize("n", range(11))
    def test_degree_is_n_plus_one(self, basis, n):
        assert exceptional_polynomial(basis, n).poly.degree() == n + 1

    def test_exact_form_matches_evaluation(self, basis):
        for n in (0, 3, 12):
            form = exceptional_polynomial(basis, n)
            exact = form.scale * as_numpy(form.poly)(SAMPLE)
            assert_allclose(orthonormal_exceptional_eval(basis, n, SAMPLE), exact, atol=1e-10)

    def test_table_matches_single_evaluation(self, basis):
        table = exceptional_table(basis, 6, SAMPLE, derivatives=1)
        assert_allclose(table.values[:, 6], orthonormal_exceptional_eval(basis, 6, SAMPLE), rtol=1e-13)
        h = 1e-6
        forward = orthonormal_exceptional_eval(basis, 6, 0.3 + h)
        backward = orthonormal_exceptional_eval(basis, 6, 0.3 - h)
        numeric = (forward - backward) / (2 * h)
        assert_allclose(exceptional_table(basis, 6, 0.3, derivatives=1).first[0, 6], numeric, rtol=1e-6)

    def test_bad_derivative_order(self, basis):
        with pytest.raises(ParameterError):
            exceptional_table(basis, 3, 0.0, derivatives=2)


class TestOperators:
    def test_B_inverts_A(self, basis):
        """B A P_n = (lambda_n - lambda_tilde) P_n in the standard normalization."""
        a, b = basis.params.alpha, basis.params.beta
        for n in (0, 1, 4, 9):
            Ap = as_numpy(exceptional_polynomial(basis, n).poly)
            expected = basis.norm(n) * eval_jacobi(n, a, b, SAMPLE)
            assert_allclose(apply_B(basis, Ap, SAMPLE), expected, rtol=1e-10, atol=1e-10)

    def test_apply_A_scalar(self, basis):
        assert isinstance(apply_A(basis, 2, 0.1), float)

    def test_apply_B_needs_derivative(self, basis):
        with pytest.raises(ParameterError, match="df"):
            apply_B(basis, np.cos, 0.2)

    def test_adjoint_relation(self, basis):
        f = Polynomial([0.3, -1.0, 2.0])
        h = Polynomial([1.0, 0.0, -1.0, 3.0])
        assert adjoint_defect(basis, f, h) < 1e-10


class TestODE:
    def test_residual_small(self, basis):
        worst = max(ode_residual(basis, n, float(x), relative=True) for n in range(0, 13, 3) for x in SAMPLE)
        assert worst < 1e-8

    def test_constant_case_at_origin(self, basis):
        assert abs(ode_residual(basis, 0, 0.0)) < 1e-12

    def test_mirrored_residual(self, mirrored_basis):
        assert ode_residual(mirrored_basis, 5, 0.4, relative=True) < 1e-8

    def test_residual_on_gauss_nodes(self, basis, mirrored_basis):
        for family in (basis, mirrored_basis):
            nodes = gauss_rule(family.params, 40).nodes
            residual = ode_residual_nodes(family, 30, nodes)
            assert residual.shape == (40, 31)
            assert np.max(residual) < 1e-8

    def test_nodes_residual_detects_wrong_curvature(self, basis, monkeypatch):
        import x1jacobi.polynomials.exceptional as exceptional

        def bent(*args, **kwargs):
            table = apply_A_table(*args, **kwargs)
            return table._replace(second=1.01 * table.second)

        monkeypatch.setattr(exceptional, "apply_A_table", bent)
        assert np.max(ode_residual_nodes(basis, 8, SAMPLE)) > 1e-4

    def test_second_derivative_matches_finite_difference(self, basis):
        h = 1e-5
        x = np.array([0.3 - h, 0.3, 0.3 + h])
        table = apply_A_table(basis, 6, x, derivatives=2)
        numeric = (table.first[2] - table.first[0]) / (2 * h)
        assert_allclose(table.second[1, 1:], numeric[1:], rtol=1e-6, atol=1e-6)

    def test_apply_A_table_derivative_order(self, basis):
        with pytest.raises(ParameterError, match="derivatives"):
            apply_A_table(basis, 3, 0.0, derivatives=3)
