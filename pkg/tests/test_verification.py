"""Tests des suites de vérification."""

import pytest

from src.errors import InvariantViolation, ValidationError
from src.jacobi_core import JacobiParams
from src.verification import InvariantSuiteRunner


class TestInvariantSuiteRunner:
    def setup_method(self):
        self.runner = InvariantSuiteRunner(JacobiParams(0.5, 0.2), cases=4, seed=3)

    @pytest.mark.parametrize("suite", ["kronecker", "factorization", "chebyshev", "ap"])
    def test_fast_suites_pass(self, suite):
        summary = self.runner.run(suite)
        assert summary["passed"]
        assert summary["suite"] == suite
        assert summary["seed"] == 3
        assert summary["checks"] > 0

    def test_unknown_suite(self):
        with pytest.raises(ValidationError):
            self.runner.run("inconnue")

    def test_positivity_outside_region_v(self):
        runner = InvariantSuiteRunner(JacobiParams(-0.6, -0.9), cases=2)
        with pytest.raises(InvariantViolation) as excinfo:
            runner.run("positivity")
        witness = excinfo.value.witness
        assert witness["in_region_v"] is False
        assert witness["value"] < 0.0
        assert abs(witness["m"] - witness["n"]) <= witness["k"] <= witness["m"] + witness["n"]
        assert excinfo.value.exit_code == 3

    def test_same_seed_same_summary(self):
        first = InvariantSuiteRunner(JacobiParams(0, 0), cases=3, seed=11)
        second = InvariantSuiteRunner(JacobiParams(0, 0), cases=3, seed=11)
        assert first.run("factorization") == second.run("factorization")

    @pytest.mark.slow
    @pytest.mark.parametrize("suite", ["semigroup", "chapman", "oracle", "lemma51",
                                       "energy", "positivity"])
    def test_heavy_suites_pass(self, suite):
        assert self.runner.run(suite)["passed"]

    @pytest.mark.slow
    def test_poisson_suite(self):
        runner = InvariantSuiteRunner(JacobiParams(0.5, 0.2), cases=5, seed=3)
        summary = runner.run("poisson")
        assert summary["passed"]
        assert summary["checks"] > 0
        assert summary["max_residual"] <= 1e-6
