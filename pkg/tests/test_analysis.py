"""Tests de l'analyseur : constantes du noyau, poids A_p, normes et maximaux."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.analysis import (
    BoundReport,
    WeightSeq,
    ap_constant,
    ap_stabilization,
    estimate_bound_constant,
    maximal_inequality_experiment,
    uniform_pn_bound_constant,
    w_ratio_limit_check,
    weak_l1_norm,
    weighted_lp_norm,
)
from src.errors import ValidationError
from src.jacobi_core import FiniteSequence, JacobiParams
from src.semigroup import TimeGrid


class TestWeights:
    def test_validation(self):
        with pytest.raises(ValidationError):
            WeightSeq(np.array([1.0, 0.0]))
        with pytest.raises(ValidationError):
            WeightSeq(np.array([]))
        with pytest.raises(ValidationError):
            WeightSeq.unit(3).head(10)

    def test_power_weight(self):
        w = WeightSeq.power(2.0, 3)
        assert w.values.tolist() == [1.0, 4.0, 9.0, 16.0]
        assert w.descriptor == {"kind": "power", "gamma": 2.0}


class TestApConstant:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_unit_weight(self, p):
        assert ap_constant(WeightSeq.unit(50), p, 50) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_exponent(self):
        with pytest.raises(ValidationError):
            ap_constant(WeightSeq.unit(5), 0.5, 5)

    def test_power_weight_inside_class_is_stable(self):
        report = ap_stabilization(lambda N: WeightSeq.power(0.3, N), 2.0, 200)
        assert report["stable"]
        assert report["constant_N"] >= 1.0

    def test_power_weight_outside_class_grows(self):
        report = ap_stabilization(lambda N: WeightSeq.power(1.5, N), 2.0, 200)
        assert not report["stable"]
        assert report["ratio"] > 1.2


class TestNorms:
    def test_weighted_lp(self):
        w = WeightSeq(np.array([1.0, 2.0, 3.0]))
        assert weighted_lp_norm([1.0, -1.0, 2.0], w, 1.0) == pytest.approx(9.0)
        assert weighted_lp_norm(FiniteSequence([3.0]), w, 2.0) == pytest.approx(3.0)

    def test_weak_norm_with_ties(self):
        assert weak_l1_norm([3.0, 1.0, 1.0], WeightSeq.unit(2)) == pytest.approx(3.0)
        assert weak_l1_norm([0.0, 0.0], WeightSeq.unit(1)) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False),
                    min_size=1, max_size=30))
    def test_weak_norm_below_l1(self, values):
        w = WeightSeq.power(0.5, len(values))
        assert weak_l1_norm(values, w) <= weighted_lp_norm(values, w, 1.0) * (1 + 1e-12)


class TestBoundConstants:
    def setup_method(self):
        self.params = JacobiParams(0.5, 0.2)
        self.grid = TimeGrid.logarithmic(0.1, 10.0, 5)

    def test_report_validation(self):
        with pytest.raises(ValidationError):
            BoundReport("lemma31", -1.0, (), {})
        with pytest.raises(ValidationError):
            BoundReport("lemma31", float("nan"), (), {})

    def test_rejects_bad_requests(self):
        with pytest.raises(ValidationError):
            estimate_bound_constant("lemma31", JacobiParams(-0.6, 0.0), (0, 5), self.grid)
        for kind in ("foo", "unif_pn"):
            with pytest.raises(ValidationError):
                estimate_bound_constant(kind, self.params, (0, 5), self.grid)
        with pytest.raises(ValidationError):
            estimate_bound_constant("lemma41", self.params, (5, 2), self.grid)
        with pytest.raises(ValidationError):
            estimate_bound_constant("lemma31", self.params, (0, 5), TimeGrid((0.0,)))

    def test_empty_local_region(self):
        with pytest.raises(ValidationError):
            estimate_bound_constant("lemma42", self.params, (0, 1), self.grid)

    @pytest.mark.parametrize("kind", ["lemma31", "lemma41", "cz_a", "lemma42"])
    def test_size_constants(self, kind):
        report = estimate_bound_constant(kind, self.params, (0, 15), self.grid)
        n, m, t = report.argmax
        assert n != m
        assert t in self.grid.times
        assert 0.0 < report.estimated_constant < np.inf
        assert report.ranges["index_range"] == [0, 15]

    @pytest.mark.parametrize("kind", ["cz_b1", "cz_b2"])
    def test_smoothness_below_telescoped_majorant(self, kind):
        report = estimate_bound_constant(kind, self.params, (4, 16), self.grid)
        majorant = report.extras["telescoped_majorant"]
        assert report.estimated_constant <= majorant + 1e-12
        n, l, m = report.argmax
        assert abs(n - m) > 2 * abs(n - l)

    def test_second_smoothness_condition_mirrors_first(self):
        first = estimate_bound_constant("cz_b1", self.params, (4, 16), self.grid)
        second = estimate_bound_constant("cz_b2", self.params, (4, 16), self.grid)
        assert second.bound_kind == "cz_b2"
        assert second.estimated_constant == first.estimated_constant
        assert second.argmax == first.argmax

    def test_uniform_pn(self):
        report = uniform_pn_bound_constant(JacobiParams(0.0, 0.0), (0, 30))
        assert 0.0 < report.estimated_constant < 2.0
        assert report.bound_kind == "unif_pn"
        with pytest.raises(ValidationError):
            uniform_pn_bound_constant(JacobiParams(0, 0), (0, 3), np.array([0.0, 1.0]))
        with pytest.raises(ValidationError):
            uniform_pn_bound_constant(JacobiParams(-0.6, 0.0), (0, 3))

    def test_w_ratio_limit(self):
        assert w_ratio_limit_check(self.params, 10_000) == pytest.approx(0.5, abs=1e-3)


class TestMaximalExperiment:
    def setup_method(self):
        self.params = JacobiParams(0.5, 0.2)
        self.grid = TimeGrid.logarithmic(1e-2, 10.0, 8)
        self.w = WeightSeq.power(0.3, 200)
        self.test_set = [
            FiniteSequence.zeros(3),
            FiniteSequence.delta(0),
            FiniteSequence([0.5, -1.0, 0.0, 2.0]),
        ]

    def test_ratios_and_skipped(self):
        report = maximal_inequality_experiment(
            self.params, self.w, 2.0, self.test_set, self.grid, truncation=60
        )
        assert report.skipped == 1
        assert len(report.heat_ratios) == 2
        assert report.heat_ratio >= 1.0 - 1e-12
        assert report.poisson_ratio >= 1.0 - 1e-12
        assert report.metadata["truncation"] == 60
        assert report.to_dict()["p"] == 2.0

    def test_weak_type_without_poisson(self):
        report = maximal_inequality_experiment(
            self.params, self.w, 1.0, self.test_set, self.grid, truncation=60,
            include_poisson=False,
        )
        assert report.poisson_ratio is None
        assert all(np.isfinite(report.heat_ratios))
        assert report.heat_ratio > 0.0

    def test_only_zero_sequences(self):
        report = maximal_inequality_experiment(
            self.params, self.w, 2.0, [FiniteSequence.zeros(2)], self.grid
        )
        assert report.heat_ratio == 0.0
        assert report.skipped == 1

    def test_invalid_exponent(self):
        with pytest.raises(ValidationError):
            maximal_inequality_experiment(self.params, self.w, 0.5, self.test_set, self.grid)
