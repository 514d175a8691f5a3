import cmath
import logging
import math
from typing import Sequence, Union

from tra_solver.errors import (
    GammaPoleError,
    ParameterDomainError,
    RangeError,
    ZeroDivisorError
)


LOGGER = logging.getLogger(__name__)


RealOrComplex = Union[float, complex]


LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7
)

HALF_LOG_TWO_PI = 0.5 * math.log(2 * math.pi)
LOG_PI = math.log(math.pi)


def is_gamma_pole(z: RealOrComplex) -> bool:
    value = complex(z)
    return (
        value.imag == 0
        and value.real <= 0
        and value.real == math.floor(value.real)
    )


def _check_finite(value: complex, name: str) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise RangeError(f'{name} is not finite: {value!r}')
    return value


def _lanczos_log_gamma(z: complex) -> complex:
    z -= 1
    series = complex(LANCZOS_COEFFICIENTS[0])
    for k, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        series += coefficient / (z + k)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(series)


def log_gamma(z: RealOrComplex) -> complex:
    """
    Principal-branch log of the gamma function for complex arguments.

    Uses the Lanczos approximation (g=7, nine terms) and the reflection
    formula for Re(z) < 0.5.
    """
    value = _check_finite(complex(z), 'log_gamma argument')
    if is_gamma_pole(value):
        raise GammaPoleError(value)
    if value.real >= 0.5:
        return _check_finite(_lanczos_log_gamma(value), 'log_gamma')
    sin_pi_z = cmath.sin(math.pi * value)
    return _check_finite(
        LOG_PI - cmath.log(sin_pi_z) - _lanczos_log_gamma(1 - value),
        'log_gamma'
    )


def gamma(z: RealOrComplex) -> complex:
    return cmath.exp(log_gamma(z))


def arg_gamma(z: RealOrComplex) -> float:
    return log_gamma(z).imag


def pochhammer(a: float, n: int) -> float:
    if n < 0 or int(n) != n:
        raise ParameterDomainError(f'pochhammer index must be a nonnegative integer: {n!r}')
    result = 1.0
    for k in range(int(n)):
        result *= a + k
        if not math.isfinite(result):
            raise RangeError(f'pochhammer overflow: ({a!r})_{n}')
    return result


def _is_real(value: RealOrComplex) -> bool:
    return not isinstance(value, complex) or value.imag == 0


def hyp_terminating(
    num_params: Sequence[RealOrComplex],
    den_params: Sequence[RealOrComplex],
    z: RealOrComplex,
    n: int
) -> complex:
    """
    Finite sum of the hypergeometric series pFq whose first numerator
    parameter is -n.
    """
    if n < 0 or int(n) != n:
        raise ParameterDomainError(f'series order must be a nonnegative integer: {n!r}')
    if not num_params or complex(num_params[0]) != -n:
        raise ParameterDomainError(
            f'first numerator parameter must be -n={-n}, got {num_params[:1]!r}'
        )
    term = complex(1.0)
    total = complex(1.0)
    for k in range(int(n)):
        denominator = complex(1.0)
        for b in den_params:
            denominator *= complex(b) + k
        if denominator == 0:
            raise ZeroDivisorError(
                f'denominator Pochhammer vanishes at term {k + 1}', index=k
            )
        numerator = complex(1.0)
        for a in num_params:
            numerator *= complex(a) + k
        term *= numerator * complex(z) / (denominator * (k + 1))
        total += term
    _check_finite(total, 'hypergeometric sum')
    if all(_is_real(p) for p in [*num_params, *den_params, z]):
        return complex(total.real, 0.0)
    return total
