"""Tests du solveur tridiagonal et des règles de Gauss."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_genlaguerre, roots_jacobi

from src.errors import ValidationError
from src.jacobi_core import JacobiParams
from src.quadrature import (
    bucketed,
    gauss_jacobi_rule,
    gauss_laguerre_rule,
    integrate,
    moment_sequence,
    node_count_heuristic,
    sturm_bisection_eigenvalues,
    tridiagonal_eigen,
)


class TestTridiagonalEigen:
    def setup_method(self):
        rng = np.random.default_rng(3)
        self.diagonal = rng.standard_normal(40)
        self.offdiagonal = rng.uniform(0.1, 1.0, 39)

    def test_matches_scipy(self):
        result = tridiagonal_eigen(self.diagonal, self.offdiagonal, vectors=True)
        values, vectors = eigh_tridiagonal(self.diagonal, self.offdiagonal)
        assert_allclose(result.values, values, atol=1e-12)
        assert_allclose(result.first_row**2, vectors[0] ** 2, atol=1e-12)

    def test_vectors_reconstruct_matrix(self):
        result = tridiagonal_eigen(self.diagonal, self.offdiagonal, vectors=True)
        matrix = (
            np.diag(self.diagonal)
            + np.diag(self.offdiagonal, 1)
            + np.diag(self.offdiagonal, -1)
        )
        rebuilt = (result.vectors * result.values) @ result.vectors.T
        assert_allclose(rebuilt, matrix, atol=1e-12)
        assert_allclose(result.vectors[0], result.first_row, atol=1e-12)

    def test_sorted_and_without_vectors(self):
        result = tridiagonal_eigen(self.diagonal, self.offdiagonal)
        assert result.vectors is None
        assert np.all(np.diff(result.values) >= 0)

    def test_sturm_oracle_agrees(self):
        values = tridiagonal_eigen(self.diagonal, self.offdiagonal).values
        assert_allclose(sturm_bisection_eigenvalues(self.diagonal, self.offdiagonal),
                        values, atol=1e-11)

    def test_single_entry(self):
        result = tridiagonal_eigen(np.array([2.5]), np.array([]))
        assert result.values.tolist() == [2.5]
        assert result.first_row.tolist() == [1.0]

    def test_invalid_input(self):
        with pytest.raises(ValidationError):
            tridiagonal_eigen(np.ones(3), np.ones(3))
        with pytest.raises(ValidationError):
            tridiagonal_eigen(np.array([1.0, np.nan]), np.array([0.5]))


class TestGaussJacobiRule:
    def test_legendre_five_nodes(self):
        rule = gauss_jacobi_rule(JacobiParams(0, 0), 5)
        expected = [-0.9061798459, -0.5384693101, 0.0, 0.5384693101, 0.9061798459]
        assert_allclose(rule.nodes, expected, atol=1e-10)
        assert rule.weights.sum() == pytest.approx(2.0, abs=1e-14)
        assert rule.exactness == 9

    def test_gauss_chebyshev(self):
        rule = gauss_jacobi_rule(JacobiParams(-0.5, -0.5), 4)
        k = np.arange(4, 0, -1)
        assert_allclose(rule.nodes, np.cos((2 * k - 1) * math.pi / 8), atol=1e-14)
        assert_allclose(rule.weights, np.full(4, math.pi / 4), atol=1e-13)

    @pytest.mark.parametrize("alpha,beta", [(0.5, 0.2), (2.0, 0.3), (-0.6, -0.9)])
    def test_matches_scipy_roots(self, alpha, beta):
        rule = gauss_jacobi_rule(JacobiParams(alpha, beta), 20)
        nodes, weights = roots_jacobi(20, alpha, beta)
        assert_allclose(rule.nodes, nodes, atol=1e-13)
        assert_allclose(rule.weights, weights, rtol=1e-10)

    def test_exact_for_moments(self):
        params = JacobiParams(0.5, 0.2)
        rule = gauss_jacobi_rule(params, 10)
        moments = moment_sequence(params, 19)
        for k in range(20):
            assert integrate(rule, lambda x, k=k: x**k) == pytest.approx(
                moments[k], rel=1e-12, abs=1e-14
            )

    def test_exponential_integral(self):
        rule = gauss_jacobi_rule(JacobiParams(0, 0), 16)
        value = integrate(rule, lambda x: np.exp(-(1.0 - x)))
        assert value == pytest.approx(1.0 - math.exp(-2.0), abs=1e-14)

    def test_scalar_integrand_fallback(self):
        rule = gauss_jacobi_rule(JacobiParams(0, 0), 8)
        assert integrate(rule, lambda x: 1.0) == pytest.approx(2.0, abs=1e-14)

    def test_invalid_node_count(self):
        with pytest.raises(ValidationError):
            gauss_jacobi_rule(JacobiParams(0, 0), 0)

    def test_rule_frame(self):
        frame = gauss_jacobi_rule(JacobiParams(0, 0), 3).to_frame()
        assert list(frame.columns) == ["node", "weight"]
        assert len(frame) == 3


class TestNodeCounts:
    def test_heuristic(self):
        params = JacobiParams(0, 0)
        assert node_count_heuristic(params, 0.0, 10) == 45
        assert node_count_heuristic(params, 100.0, 0) == 140
        with pytest.raises(ValidationError):
            node_count_heuristic(params, -1.0, 3)

    def test_bucketing(self):
        assert bucketed(45) == 48
        assert bucketed(48) == 48
        assert bucketed(1) == 16


class TestMoments:
    def test_legendre_moments(self):
        moments = moment_sequence(JacobiParams(0, 0), 4)
        assert_allclose(moments, [2.0, 0.0, 2 / 3, 0.0, 0.4],
                        atol=1e-15)


class TestGaussLaguerre:
    def test_weights_sum_to_gamma(self):
        rule = gauss_laguerre_rule(-0.5, 64)
        assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert np.all(rule.nodes > 0)

    def test_invalid_exponent(self):
        with pytest.raises(ValidationError):
            gauss_laguerre_rule(-1.0, 10)

    @pytest.mark.parametrize("exponent", [-0.5, 0.0, 0.5, 2.0])
    def test_matches_scipy_roots(self, exponent):
        rule = gauss_laguerre_rule(exponent, 32)
        nodes, weights = roots_genlaguerre(32, exponent)
        assert_allclose(rule.nodes, nodes, rtol=1e-12)
        significant = weights > 1e-12
        assert_allclose(rule.weights[significant], weights[significant], rtol=1e-9)

    def test_large_rules_stay_finite(self):
        # au-delà de ~450 nœuds, la construction par racines produit des NaN
        rule = gauss_laguerre_rule(-0.5, 512)
        assert np.all(np.isfinite(rule.nodes)) and np.all(np.isfinite(rule.weights))
        assert np.all(rule.weights >= 0.0)
        assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        first_moment = float(np.dot(rule.weights, rule.nodes))
        assert first_moment == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-10)

    def test_rule_is_read_only(self):
        rule = gauss_laguerre_rule(0.0, 8)
        with pytest.raises(ValueError):
            rule.weights[0] = 1.0
