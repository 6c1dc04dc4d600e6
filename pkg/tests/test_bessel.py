"""Tests des fonctions de Bessel modifiées."""

import math

import pytest
from scipy.special import iv, ive

from src.bessel import modified_bessel_i, modified_bessel_i_scaled
from src.errors import ValidationError


class TestModifiedBessel:
    def test_known_value(self):
        assert modified_bessel_i(0, 1.0) == pytest.approx(1.2660658778, abs=1e-10)

    def test_zero_argument(self):
        assert modified_bessel_i(0, 0.0) == 1.0
        assert modified_bessel_i(3, 0.0) == 0.0
        assert modified_bessel_i_scaled(0, 0.0) == 1.0

    @pytest.mark.parametrize("t", [0.1, 2.0, 19.9, 20.0])
    @pytest.mark.parametrize("order", [0, 1, 5, 17, 40])
    def test_series_branch(self, order, t):
        assert modified_bessel_i(order, t) == pytest.approx(iv(order, t), rel=1e-12)

    @pytest.mark.parametrize("t", [20.5, 50.0, 120.0, 200.0])
    @pytest.mark.parametrize("order", [0, 1, 5, 17, 40, 150])
    def test_miller_branch(self, order, t):
        expected = ive(order, t)
        assert modified_bessel_i_scaled(order, t) == pytest.approx(expected, rel=1e-12)

    def test_unscaled_large_argument(self):
        assert modified_bessel_i(2, 100.0) == pytest.approx(iv(2, 100.0), rel=1e-12)

    def test_invalid_arguments(self):
        with pytest.raises(ValidationError):
            modified_bessel_i(-1, 1.0)
        with pytest.raises(ValidationError):
            modified_bessel_i(1.5, 1.0)
        with pytest.raises(ValidationError):
            modified_bessel_i(0, 201.0)
        with pytest.raises(ValidationError):
            modified_bessel_i_scaled(0, -0.1)

    @pytest.mark.parametrize("t", [500.0, 5000.0, 2e4, 1e6])
    @pytest.mark.parametrize("order", [0, 1, 17, 150])
    def test_scaled_large_argument(self, order, t):
        expected = ive(order, t)
        assert modified_bessel_i_scaled(order, t) == pytest.approx(expected, rel=1e-11)

    def test_scaled_has_no_upper_limit(self):
        value = modified_bessel_i_scaled(0, 1e12)
        assert value == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * 1e12), rel=1e-12)
