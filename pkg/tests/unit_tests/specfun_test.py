import math

import numpy as np
import pytest
import scipy.special

from tra_solver.errors import GammaPoleError, ParameterDomainError, ZeroDivisorError
from tra_solver.specfun import (
    arg_gamma,
    gamma,
    hyp_terminating,
    is_gamma_pole,
    log_gamma,
    pochhammer
)


class TestLogGamma:
    def test_should_return_zero_for_one(self):
        assert log_gamma(1) == pytest.approx(0, abs=1e-14)

    def test_should_return_log_factorial_for_integer(self):
        assert log_gamma(5).real == pytest.approx(math.log(24), rel=1e-13)
        assert log_gamma(5).imag == 0

    def test_should_match_half_line_modulus_identity(self):
        for t in np.linspace(0, 10, 21):
            modulus_squared = abs(gamma(0.5 + 1j * t)) ** 2
            assert modulus_squared * math.cosh(math.pi * t) / math.pi == pytest.approx(
                1, rel=1e-10
            )

    def test_should_satisfy_factorial_recurrence(self):
        rng = np.random.default_rng(42)
        for x in rng.uniform(0.1, 30, size=25):
            assert math.exp(log_gamma(x + 1).real - log_gamma(x).real) == pytest.approx(
                x, rel=1e-12
            )

    def test_should_match_library_log_gamma_in_complex_plane(self):
        for z in [0.5 + 1j, 2.5 - 3j, 0.1 + 0.2j, -1.5 + 0.5j, 12 + 7j]:
            expected = scipy.special.loggamma(z)
            actual = log_gamma(z)
            assert actual.real == pytest.approx(expected.real, abs=1e-12)
            assert math.remainder(actual.imag - expected.imag, 2 * math.pi) == pytest.approx(
                0, abs=1e-12
            )

    def test_should_use_reflection_for_negative_non_integer(self):
        assert math.exp(log_gamma(-0.5).real) == pytest.approx(2 * math.sqrt(math.pi))

    @pytest.mark.parametrize('pole', [0, -1, -2, -7.0])
    def test_should_raise_pole_error(self, pole: float):
        assert is_gamma_pole(pole)
        with pytest.raises(GammaPoleError):
            log_gamma(pole)

    def test_should_not_treat_complex_point_as_pole(self):
        assert not is_gamma_pole(-1 + 0.5j)


class TestArgGamma:
    def test_should_return_zero_for_positive_real(self):
        assert arg_gamma(2.0) == 0

    def test_should_be_odd_in_imaginary_part(self):
        assert arg_gamma(1 - 2j) == pytest.approx(-arg_gamma(1 + 2j))


class TestPochhammer:
    def test_should_return_one_for_empty_product(self):
        assert pochhammer(7.5, 0) == 1

    def test_should_return_rising_factorial(self):
        assert pochhammer(3, 4) == 360

    def test_should_return_zero_when_factor_hits_zero(self):
        assert pochhammer(-2, 4) == 0

    def test_should_reject_negative_index(self):
        with pytest.raises(ParameterDomainError):
            pochhammer(1.0, -1)


class TestHypTerminating:
    def test_should_return_one_for_zero_order(self):
        assert hyp_terminating([0, 2.5], [1.5], 0.3, 0) == 1

    def test_should_sum_two_term_confluent_series(self):
        assert hyp_terminating([-1], [3], 1, 1).real == pytest.approx(2 / 3)

    def test_should_sum_two_term_gauss_series(self):
        assert hyp_terminating([-1, 5], [3], 0.5, 1).real == pytest.approx(1 / 6)

    def test_should_return_exactly_real_value_for_real_parameters(self):
        assert hyp_terminating([-4, 1.5, 2.25], [0.5, 3.0], 0.7, 4).imag == 0

    def test_should_match_library_gauss_function(self):
        expected = scipy.special.hyp2f1(-6, 2.5, 1.5, 0.3)
        assert hyp_terminating([-6, 2.5], [1.5], 0.3, 6).real == pytest.approx(
            expected, rel=1e-12
        )

    def test_should_keep_complex_parameters(self):
        value = hyp_terminating([-1, 1 + 1j], [2], 1, 1)
        assert value == pytest.approx(1 - (1 + 1j) / 2)

    def test_should_raise_when_denominator_vanishes(self):
        with pytest.raises(ZeroDivisorError):
            hyp_terminating([-3, 1], [-1], 0.5, 3)

    def test_should_reject_non_terminating_series(self):
        with pytest.raises(ParameterDomainError):
            hyp_terminating([1.5, 2], [3], 0.5, 2)
