"""Tests des coefficients, polynômes orthonormés et opérateurs sur les suites."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import eval_jacobi

from src.errors import ValidationError
from src.jacobi_core import (
    CoefficientTable,
    FiniteSequence,
    JacobiParams,
    apply_delta,
    apply_delta_star,
    apply_jacobi_operator,
    coefficient_table,
    eval_jacobi_p,
    eval_orthonormal,
    gasper_simple,
    normalization_constant,
    orthonormal_table,
    recurrence_coefficients,
    region_v_membership,
    total_mass,
)
from src.quadrature import gauss_jacobi_rule

parameters = st.floats(min_value=-0.95, max_value=5.0, allow_nan=False)
values = st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False),
                  min_size=1, max_size=25)


class TestJacobiParams:
    def test_rejects_out_of_range(self):
        invalid = [(-1.0, 0.0), (0.0, -1.5), (float("nan"), 0.0), (math.inf, 0.0)]
        for alpha, beta in invalid:
            with pytest.raises(ValidationError):
                JacobiParams(alpha, beta)

    def test_validation_error_is_value_error(self):
        with pytest.raises(ValueError):
            JacobiParams(-2.0, 0.0)

    def test_standard_range_and_shift(self):
        assert JacobiParams(-0.5, -0.5).standard_range
        assert not JacobiParams(-0.6, 0.0).standard_range
        assert JacobiParams(0.5, 0.2).shifted(1.0, 0.0) == JacobiParams(1.5, 0.2)


class TestCoefficients:
    def test_known_values(self):
        a0, b0 = recurrence_coefficients(JacobiParams(0, 0), 0)
        assert a0 == pytest.approx(1 / math.sqrt(3), abs=1e-15)
        assert b0 == 0.0
        a1, _ = recurrence_coefficients(JacobiParams(-0.5, -0.5), 1)
        assert a1 == pytest.approx(0.5, abs=1e-15)

    def test_normalization_constants(self):
        params = JacobiParams(0, 0)
        w0 = normalization_constant(params, 0)
        assert w0 == pytest.approx(math.sqrt(0.5), abs=1e-15)
        w2 = normalization_constant(params, 2)
        assert w2 == pytest.approx(math.sqrt(2.5), abs=1e-14)

    def test_normalization_no_overflow(self):
        w = normalization_constant(JacobiParams(3.0, 1.5), 100_000)
        assert np.isfinite(w) and w > 0

    def test_total_mass(self):
        assert total_mass(JacobiParams(0, 0)) == pytest.approx(2.0, abs=1e-14)
        assert total_mass(JacobiParams(-0.5, -0.5)) == pytest.approx(math.pi, abs=1e-13)

    def test_negative_index_rejected(self):
        with pytest.raises(ValidationError):
            recurrence_coefficients(JacobiParams(0, 0), -1)

    @settings(max_examples=40, deadline=None)
    @given(alpha=parameters, beta=parameters)
    def test_factorization_identities(self, alpha, beta):
        table = coefficient_table(JacobiParams(alpha, beta), 60)
        product = table.d[:-1] * table.e[:-1]
        assert_allclose(product, table.a[:-1], rtol=1e-13, atol=1e-15)
        expected_b = 1.0 - table.d**2 - np.concatenate([[0.0], table.e[:-1] ** 2])
        assert_allclose(expected_b, table.b, atol=1e-13)

    def test_table_is_immutable(self):
        table = coefficient_table(JacobiParams(0.5, 0.2), 10)
        with pytest.raises(ValueError):
            table.a[0] = 1.0


class TestCoefficientTableJson:
    def setup_method(self):
        self.table = CoefficientTable.build(JacobiParams(0.5, 0.2), 12)

    def test_json_restores_table(self):
        restored = CoefficientTable.from_json(self.table.to_json())
        assert restored.params == self.table.params
        assert restored.cutoff == 12
        assert_allclose(restored.w, self.table.w, rtol=0, atol=0)

    def test_invalid_payloads(self):
        with pytest.raises(ValidationError):
            CoefficientTable.from_json("{}")
        with pytest.raises(ValidationError):
            CoefficientTable.from_json("pas du json")
        data = self.table.to_dict()
        data["a"] = data["a"][:-1]
        with pytest.raises(ValidationError):
            CoefficientTable.from_json(json.dumps(data))


class TestOrthonormalPolynomials:
    def test_legendre_value_at_one(self):
        assert eval_orthonormal(JacobiParams(0, 0), 1, 1.0) == pytest.approx(
            math.sqrt(1.5), abs=1e-15
        )

    def test_domain_check(self):
        with pytest.raises(ValidationError):
            orthonormal_table(JacobiParams(0, 0), 3, [0.0, 1.5])

    @pytest.mark.parametrize(
        "alpha,beta", [(0.0, 0.0), (0.5, 0.2), (-0.5, -0.5), (2.0, 0.3)]
    )
    def test_orthonormality(self, alpha, beta):
        params = JacobiParams(alpha, beta)
        rule = gauss_jacobi_rule(params, 32)
        table = orthonormal_table(params, 20, rule.nodes)
        gram = (table * rule.weights) @ table.T
        assert_allclose(gram, np.eye(21), atol=1e-12)

    def test_matches_scipy_jacobi(self):
        params = JacobiParams(0.5, 0.2)
        x = np.linspace(-0.99, 0.99, 41)
        for n in range(16):
            assert_allclose(eval_jacobi_p(params, n, x), eval_jacobi(n, 0.5, 0.2, x),
                            rtol=1e-10, atol=1e-12)


class TestFiniteSequence:
    def test_basic_operations(self):
        f = FiniteSequence([1.0, 2.0, 0.0])
        g = FiniteSequence.delta(4)
        assert f.support == 2
        assert f[10] == 0.0
        assert (f + g).support == 4
        assert f.trimmed().support == 1
        assert f.norm() == pytest.approx(math.sqrt(5))
        assert f.inner(FiniteSequence([1.0, 1.0])) == 3.0
        assert (2 * f).to_list() == [2.0, 4.0, 0.0]
        assert FiniteSequence.zeros(3).is_zero()

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            FiniteSequence([1.0, math.nan])

    def test_values_are_read_only(self):
        f = FiniteSequence([1.0, 2.0])
        with pytest.raises(ValueError):
            f.values[0] = 3.0
        padded = f.padded(4)
        padded[0] = 5.0
        assert f[0] == 1.0


class TestOperators:
    def setup_method(self):
        self.params = JacobiParams(0.5, 0.2)

    def test_output_supports(self):
        f = FiniteSequence(np.ones(6))
        assert apply_jacobi_operator(self.params, f).support == 6
        assert apply_delta(self.params, f).support == 5
        assert apply_delta_star(self.params, f).support == 6

    def test_jacobi_operator_on_polynomial_vector(self):
        x = 0.3
        N = 15
        p = FiniteSequence(orthonormal_table(self.params, N, x)[:, 0])
        Jp = apply_jacobi_operator(self.params, p)
        assert_allclose(Jp.values[:N], x * p.values[:N], atol=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(f=values, g=values)
    def test_delta_adjointness(self, f, g):
        f, g = FiniteSequence(f), FiniteSequence(g)
        lhs = apply_delta(self.params, f).inner(g)
        rhs = f.inner(apply_delta_star(self.params, g))
        assert abs(lhs - rhs) <= 1e-13 * max(1.0, f.norm() * g.norm())

    @settings(max_examples=50, deadline=None)
    @given(f=values)
    def test_factorization(self, f):
        f = FiniteSequence(f)
        factored = apply_delta_star(self.params, apply_delta(self.params, f)) * -1.0
        direct = apply_jacobi_operator(self.params, f, shifted=True)
        assert np.max(np.abs((factored - direct).values)) <= 1e-12 * max(1.0, f.norm())
        assert direct.inner(f) <= 1e-12 * max(1.0, f.norm() ** 2)


class TestRegionV:
    def test_membership(self):
        assert region_v_membership(JacobiParams(0, 0))
        assert region_v_membership(JacobiParams(-0.5, -0.5))
        assert region_v_membership(JacobiParams(0.5, 0.2))
        assert not region_v_membership(JacobiParams(0.0, 1.0))
        assert not region_v_membership(JacobiParams(-0.6, -0.9))

    def test_simple_condition_implies_membership(self):
        for alpha, beta in [(0.0, 0.0), (1.0, 0.5), (3.0, -0.5), (0.2, -0.9)]:
            params = JacobiParams(alpha, beta)
            if gasper_simple(params):
                assert region_v_membership(params)
