import cmath
import dataclasses
import enum
import logging
import math
from typing import Callable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.optimize

from tra_solver.errors import (
    AsymmetryError,
    FitFailureError,
    ParameterDomainError,
    ZeroDivisorError
)
from tra_solver.specfun import (
    RealOrComplex,
    arg_gamma,
    hyp_terminating,
    log_gamma,
    pochhammer
)


LOGGER = logging.getLogger(__name__)


class FamilyName(str, enum.Enum):
    JACOBI_P = 'JacobiP'
    LAGUERRE_L = 'LaguerreL'
    MEIXNER_POLLACZEK = 'MeixnerPollaczek'
    HYP_MEIXNER_POLLACZEK = 'HypMeixnerPollaczek'
    MEIXNER = 'Meixner'
    KRAWTCHOUK = 'Krawtchouk'
    CONTINUOUS_DUAL_HAHN = 'ContinuousDualHahn'
    DUAL_HAHN = 'DualHahn'
    NOVEL_H = 'NovelH'
    NOVEL_G = 'NovelG'


# families whose recursion is known in a non-symmetric standard form
STANDARD_FORM_FAMILIES = {
    FamilyName.JACOBI_P,
    FamilyName.LAGUERRE_L,
    FamilyName.MEIXNER_POLLACZEK,
    FamilyName.NOVEL_H,
    FamilyName.NOVEL_G
}

FINITE_FAMILIES = {FamilyName.KRAWTCHOUK, FamilyName.DUAL_HAHN}

NOVEL_FAMILIES = {FamilyName.NOVEL_H, FamilyName.NOVEL_G}


class NovelGDiagonal(str, enum.Enum):
    SEED_CONSISTENT = 'seed-consistent'
    PRINTED = 'printed'


SEED_DEFECT_TOLERANCE = 1e-10


@dataclasses.dataclass(frozen=True)
class PolynomialFamily:
    name: FamilyName
    params: Mapping[str, float]
    normalized: bool = False
    # NovelG only
    novel_g_diagonal: NovelGDiagonal = NovelGDiagonal.SEED_CONSISTENT

    def get(self, key: str) -> float:
        try:
            return self.params[key]
        except KeyError as exc:
            raise ParameterDomainError(
                f'{self.name.value} requires parameter {key!r}'
            ) from exc

    @staticmethod
    def jacobi(mu: float, nu: float, normalized: bool = False) -> 'PolynomialFamily':
        return PolynomialFamily(FamilyName.JACOBI_P, {'mu': mu, 'nu': nu}, normalized)

    @staticmethod
    def laguerre(nu: float, normalized: bool = False) -> 'PolynomialFamily':
        return PolynomialFamily(FamilyName.LAGUERRE_L, {'nu': nu}, normalized)

    @staticmethod
    def meixner_pollaczek(
        mu: float, theta: float, normalized: bool = True
    ) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.MEIXNER_POLLACZEK, {'mu': mu, 'theta': theta}, normalized
        )

    @staticmethod
    def hyperbolic_meixner_pollaczek(mu: float, theta: float) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.HYP_MEIXNER_POLLACZEK, {'mu': mu, 'theta': theta}, True
        )

    @staticmethod
    def meixner(mu: float, beta: float) -> 'PolynomialFamily':
        return PolynomialFamily(FamilyName.MEIXNER, {'mu': mu, 'beta': beta}, True)

    @staticmethod
    def krawtchouk(gamma: float, N: int) -> 'PolynomialFamily':  # pylint: disable=invalid-name
        return PolynomialFamily(FamilyName.KRAWTCHOUK, {'gamma': gamma, 'N': N}, True)

    @staticmethod
    def continuous_dual_hahn(mu: float, alpha: float, beta: float) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.CONTINUOUS_DUAL_HAHN,
            {'mu': mu, 'alpha': alpha, 'beta': beta},
            True
        )

    @staticmethod
    def dual_hahn(
        alpha: float, beta: float, N: int  # pylint: disable=invalid-name
    ) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.DUAL_HAHN, {'alpha': alpha, 'beta': beta, 'N': N}, True
        )

    @staticmethod
    def novel_h(
        mu: float, nu: float, alpha: float, theta: float, normalized: bool = False
    ) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.NOVEL_H,
            {'mu': mu, 'nu': nu, 'alpha': alpha, 'theta': theta},
            normalized
        )

    @staticmethod
    def novel_g(
        mu: float,
        nu: float,
        sigma: float,
        normalized: bool = False,
        diagonal: NovelGDiagonal = NovelGDiagonal.SEED_CONSISTENT
    ) -> 'PolynomialFamily':
        return PolynomialFamily(
            FamilyName.NOVEL_G, {'mu': mu, 'nu': nu, 'sigma': sigma}, normalized, diagonal
        )


class RecursionRow(NamedTuple):
    """
    One row of `variable * P_n = diagonal * P_n + lower * P_{n-1} + upper * P_{n+1}`.
    """
    diagonal: RealOrComplex
    lower: float
    upper: float


@dataclasses.dataclass(frozen=True)
class RecursionCoeffs:
    a: Callable[[int], float]
    b: Callable[[int], float]

    @staticmethod
    def from_sequences(a: Sequence[float], b: Sequence[float]) -> 'RecursionCoeffs':
        a_values = list(a)
        b_values = list(b)
        return RecursionCoeffs(a=a_values.__getitem__, b=b_values.__getitem__)


class StandardRecursion(NamedTuple):
    """
    `x P_n = a_n P_n + c_{n-1} P_{n-1} + d_n P_{n+1}`: c_n is the coefficient
    of P_n in row n+1, d_n the coefficient of P_{n+1} in row n.
    """
    a: Sequence[float]
    c: Sequence[float]
    d: Sequence[float]


def _require_integer(value: float, name: str) -> int:
    if value < 0 or int(value) != value:
        raise ParameterDomainError(f'{name} must be a nonnegative integer: {value!r}')
    return int(value)


def validate_family(family: PolynomialFamily) -> None:
    name = family.name
    if name in (FamilyName.JACOBI_P, FamilyName.NOVEL_H, FamilyName.NOVEL_G):
        if family.get('mu') <= -1 or family.get('nu') <= -1:
            raise ParameterDomainError(
                f'{name.value} requires mu > -1 and nu > -1: {dict(family.params)!r}'
            )
    if name == FamilyName.NOVEL_H and not 0 < family.get('theta') < math.pi:
        raise ParameterDomainError('NovelH requires 0 < theta < pi')
    if name == FamilyName.NOVEL_G:
        family.get('sigma')
    if name == FamilyName.LAGUERRE_L and family.get('nu') <= -1:
        raise ParameterDomainError('LaguerreL requires nu > -1')
    if name == FamilyName.MEIXNER_POLLACZEK:
        if family.get('mu') <= 0 or not 0 < family.get('theta') < math.pi:
            raise ParameterDomainError('MeixnerPollaczek requires mu > 0 and 0 < theta < pi')
    if name == FamilyName.HYP_MEIXNER_POLLACZEK:
        if family.get('mu') <= 0 or family.get('theta') <= 0:
            raise ParameterDomainError('HypMeixnerPollaczek requires mu > 0 and theta > 0')
    if name == FamilyName.MEIXNER:
        if family.get('mu') <= 0 or not 0 < family.get('beta') < 1:
            raise ParameterDomainError('Meixner requires mu > 0 and 0 < beta < 1')
    if name == FamilyName.KRAWTCHOUK:
        _require_integer(family.get('N'), 'N')
        if not 0 < family.get('gamma') < 1:
            raise ParameterDomainError('Krawtchouk requires 0 < gamma < 1')
    if name == FamilyName.CONTINUOUS_DUAL_HAHN:
        mu, alpha, beta = family.get('mu'), family.get('alpha'), family.get('beta')
        if min(mu + alpha, mu + beta, alpha + beta) <= 0:
            raise ParameterDomainError(
                'ContinuousDualHahn requires mu+alpha, mu+beta and alpha+beta positive'
            )
    if name == FamilyName.DUAL_HAHN:
        _require_integer(family.get('N'), 'N')
        if family.get('alpha') <= -1 or family.get('beta') <= -1:
            raise ParameterDomainError('DualHahn requires alpha > -1 and beta > -1')
    if family.normalized is False and name not in STANDARD_FORM_FAMILIES:
        raise ParameterDomainError(f'{name.value} is only defined in orthonormal form')


def _check_index(family: PolynomialFamily, n: int) -> None:
    if family.name in FINITE_FAMILIES and n > family.get('N'):
        raise ParameterDomainError(
            f'{family.name.value} index {n} exceeds N={family.get("N")}'
        )


def jacobi_standard_row(n: int, mu: float, nu: float) -> RecursionRow:
    s = mu + nu
    if n == 0:
        return RecursionRow((nu - mu) / (s + 2), 0.0, 2 / (s + 2))
    return RecursionRow(
        diagonal=(nu * nu - mu * mu) / ((2 * n + s) * (2 * n + s + 2)),
        lower=2 * (n + mu) * (n + nu) / ((2 * n + s) * (2 * n + s + 1)),
        upper=2 * (n + 1) * (n + s + 1) / ((2 * n + s + 1) * (2 * n + s + 2))
    )


def _novel_g_row(
    n: int, mu: float, nu: float, sigma: float, diagonal: NovelGDiagonal
) -> RecursionRow:
    def shifted_square(k: int) -> float:
        return sigma + (k + (mu + nu) / 2 + 1) ** 2

    jacobi = jacobi_standard_row(n, mu, nu)
    if diagonal == NovelGDiagonal.PRINTED:
        denominator = (2 * n + mu + nu) * (2 * n + mu + nu + 2)
        if denominator == 0:
            raise ZeroDivisorError('printed NovelG diagonal is singular for mu + nu = 0', index=n)
        reflected_diagonal = 1 + 2 * (n + mu) * (n + nu) / denominator
    else:
        # diagonal of the (1 - y) multiplication matrix
        reflected_diagonal = 1 - jacobi.diagonal
    drift = 2 * n * (n + nu) / (2 * n + mu + nu) if n > 0 else 0.0
    return RecursionRow(
        diagonal=shifted_square(n) * reflected_diagonal - drift - 0.5 * (mu + 1) ** 2,
        lower=-shifted_square(n - 1) * jacobi.lower,
        upper=-shifted_square(n) * jacobi.upper
    )


def _standard_row(family: PolynomialFamily, n: int, x: RealOrComplex) -> RecursionRow:
    name = family.name
    if name == FamilyName.JACOBI_P:
        return jacobi_standard_row(n, family.get('mu'), family.get('nu'))
    if name == FamilyName.LAGUERRE_L:
        nu = family.get('nu')
        return RecursionRow(2 * n + nu + 1, -(n + nu), -(n + 1.0))
    if name == FamilyName.MEIXNER_POLLACZEK:
        mu, theta = family.get('mu'), family.get('theta')
        return RecursionRow(-(n + mu) * math.cos(theta), 0.5 * (n + 2 * mu - 1), 0.5 * (n + 1))
    if name == FamilyName.NOVEL_H:
        mu, nu = family.get('mu'), family.get('nu')
        alpha, theta = family.get('alpha'), family.get('theta')
        jacobi = jacobi_standard_row(n, mu, nu)
        energy_term = math.sin(theta) / x * ((n + (mu + nu + 1) / 2) ** 2 + alpha)
        return RecursionRow(energy_term + jacobi.diagonal, jacobi.lower, jacobi.upper)
    if name == FamilyName.NOVEL_G:
        return _novel_g_row(
            n, family.get('mu'), family.get('nu'), family.get('sigma'), family.novel_g_diagonal
        )
    raise ParameterDomainError(f'{name.value} has no standard recursion')


def _orthonormal_row(family: PolynomialFamily, n: int) -> RecursionRow:
    name = family.name
    if name == FamilyName.HYP_MEIXNER_POLLACZEK:
        mu, theta = family.get('mu'), family.get('theta')
        return RecursionRow(
            -(n + mu) * math.cosh(theta),
            0.5 * math.sqrt(n * (n + 2 * mu - 1)),
            0.5 * math.sqrt((n + 1) * (n + 2 * mu))
        )
    if name == FamilyName.MEIXNER:
        mu, beta = family.get('mu'), family.get('beta')
        return RecursionRow(
            -(n * (1 + beta) + 2 * mu * beta),
            math.sqrt(n * (n + 2 * mu - 1) * beta),
            math.sqrt((n + 1) * (n + 2 * mu) * beta)
        )
    if name == FamilyName.KRAWTCHOUK:
        gamma, size = family.get('gamma'), family.get('N')
        spread = gamma * (1 - gamma)
        return RecursionRow(
            size * gamma + n * (1 - 2 * gamma),
            -math.sqrt(n * (size - n + 1) * spread),
            -math.sqrt(max((n + 1) * (size - n) * spread, 0.0))
        )
    if name == FamilyName.CONTINUOUS_DUAL_HAHN:
        mu, alpha, beta = family.get('mu'), family.get('alpha'), family.get('beta')
        return RecursionRow(
            (n + mu + alpha) * (n + mu + beta) + n * (n + alpha + beta - 1) - mu * mu,
            -math.sqrt(n * (n + alpha + beta - 1) * (n + mu + alpha - 1) * (n + mu + beta - 1)),
            -math.sqrt((n + 1) * (n + alpha + beta) * (n + mu + alpha) * (n + mu + beta))
        )
    if name == FamilyName.DUAL_HAHN:
        alpha, beta, size = family.get('alpha'), family.get('beta'), family.get('N')
        return RecursionRow(
            (
                -2 * n * n - (alpha - beta) * n + size * (2 * n + alpha + 1)
                + 0.25 * (alpha + beta + 1) ** 2
            ),
            -math.sqrt(n * (n + alpha) * (size - n + 1) * (size - n + beta + 1)),
            -math.sqrt(max((n + 1) * (n + alpha + 1) * (size - n) * (size - n + beta), 0.0))
        )
    raise ParameterDomainError(f'{name.value} has no orthonormal recursion')


def _symmetrized_off_diagonal(lower_next: float, upper: float) -> float:
    product = upper * lower_next
    if product <= 0:
        raise AsymmetryError(
            f'recursion cannot be symmetrized: upper={upper!r}, next lower={lower_next!r}',
            defect=abs(product)
        )
    return math.copysign(math.sqrt(product), upper)


def recursion_row(family: PolynomialFamily, n: int, x: RealOrComplex = 0.0) -> RecursionRow:
    """
    Row n of the family's recursion; symmetrized when the family is normalized.
    `x` only matters for NovelH, whose coefficients depend on z.
    """
    if n < 0:
        raise ParameterDomainError(f'recursion index must be nonnegative: {n}')
    if family.name not in STANDARD_FORM_FAMILIES:
        return _orthonormal_row(family, n)
    row = _standard_row(family, n, x)
    if not family.normalized:
        return row
    upper = _symmetrized_off_diagonal(_standard_row(family, n + 1, x).lower, row.upper)
    if n == 0:
        return RecursionRow(row.diagonal, 0.0, upper)
    lower = _symmetrized_off_diagonal(row.lower, _standard_row(family, n - 1, x).upper)
    return RecursionRow(row.diagonal, lower, upper)


def recursion_variable(family: PolynomialFamily, x: RealOrComplex) -> RealOrComplex:
    name = family.name
    if name in (FamilyName.JACOBI_P, FamilyName.LAGUERRE_L, FamilyName.KRAWTCHOUK):
        return x
    if name == FamilyName.MEIXNER_POLLACZEK:
        return x * math.sin(family.get('theta'))
    if name == FamilyName.HYP_MEIXNER_POLLACZEK:
        return 1j * x * math.sinh(family.get('theta'))
    if name == FamilyName.MEIXNER:
        return (family.get('beta') - 1) * x
    if name in (FamilyName.CONTINUOUS_DUAL_HAHN, FamilyName.NOVEL_G):
        return x * x
    if name == FamilyName.DUAL_HAHN:
        return (x + (family.get('alpha') + family.get('beta') + 1) / 2) ** 2
    if name == FamilyName.NOVEL_H:
        return math.cos(family.get('theta'))
    raise ParameterDomainError(f'unknown family: {name!r}')


def novel_first_kind_seed(family: PolynomialFamily, x: RealOrComplex) -> RealOrComplex:
    mu, nu = family.get('mu'), family.get('nu')
    if family.name == FamilyName.NOVEL_H:
        alpha, theta = family.get('alpha'), family.get('theta')
        return (mu - nu) / 2 + 0.5 * (mu + nu + 2) * (
            math.cos(theta)
            - math.sin(theta) / x * (0.25 * (mu + nu + 1) ** 2 + alpha)
        )
    if family.name == FamilyName.NOVEL_G:
        shifted_square = family.get('sigma') + ((mu + nu) / 2 + 1) ** 2
        if shifted_square == 0:
            raise ZeroDivisorError('sigma + B_0^2 vanishes in the NovelG seed', index=0)
        return mu + 1 - (mu + nu + 2) * (x * x + 0.5 * (mu + 1) ** 2) / (2 * shifted_square)
    raise ParameterDomainError(f'{family.name.value} has no explicit seed')


def novel_g_seed_defect(family: PolynomialFamily) -> float:
    """
    First-kind NovelG seed minus the P_1 implied by the n = 0 row of the recursion.
    Both are linear in z^2 with the same slope, so the difference is a constant;
    it vanishes when seed and recursion describe one polynomial sequence.
    """
    if family.name != FamilyName.NOVEL_G:
        raise ParameterDomainError(f'{family.name.value} has no NovelG seed')
    validate_family(family)
    row = recursion_row(dataclasses.replace(family, normalized=False), 0, 0.0)
    defect = novel_first_kind_seed(family, 0.0) + row.diagonal / row.upper
    return float(np.real(defect))


def _second_kind_seed(
    family: PolynomialFamily, x: RealOrComplex, second_kind: Tuple[float, float]
) -> RealOrComplex:
    c0, c1 = second_kind
    if family.name == FamilyName.NOVEL_H:
        return c0 + c1 / x
    if family.name == FamilyName.NOVEL_G:
        return c0 + c1 * x * x
    raise ParameterDomainError('second-kind seeds are only defined for the novel families')


def _warn_on_seed_defect(family: PolynomialFamily) -> None:
    defect = novel_g_seed_defect(family)
    if abs(defect) > SEED_DEFECT_TOLERANCE:
        LOGGER.warning(
            'Printed NovelG diagonal disagrees with the first-kind seed by %.6g (%r)',
            defect,
            dict(family.params)
        )


def eval_sequence(
    family: PolynomialFamily,
    x: RealOrComplex,
    n_max: int,
    second_kind: Optional[Tuple[float, float]] = None
) -> np.ndarray:
    """
    P_0..P_{n_max} by forward recursion with P_0 = 1.

    Novel families are seeded with their first-kind P_1 unless explicit
    second-kind coefficients (c0, c1) are given. Normalized standard-form
    families are scaled by the symmetrizing factors A_n with A_0 = 1.
    """
    validate_family(family)
    n_max = _require_integer(n_max, 'n_max')
    _check_index(family, n_max)
    if family.name == FamilyName.NOVEL_H and x == 0:
        raise ParameterDomainError('NovelH is a polynomial in 1/z and needs z != 0')
    standard = dataclasses.replace(family, normalized=False) \
        if family.name in STANDARD_FORM_FAMILIES else family
    variable = recursion_variable(family, x)
    if isinstance(variable, complex) and variable.imag == 0:
        variable = variable.real
    is_complex = any(
        isinstance(value, complex) and value.imag != 0 for value in (variable, x)
    )
    values = np.zeros(n_max + 1, dtype=complex if is_complex else float)
    values[0] = 1.0
    if n_max == 0:
        return values
    if second_kind is not None:
        values[1] = _second_kind_seed(family, x, second_kind)
    elif family.name in NOVEL_FAMILIES:
        if family.novel_g_diagonal == NovelGDiagonal.PRINTED:
            _warn_on_seed_defect(family)
        values[1] = novel_first_kind_seed(family, x)
    else:
        row = recursion_row(standard, 0, x)
        values[1] = (variable - row.diagonal) / row.upper
    for n in range(1, n_max):
        row = recursion_row(standard, n, x)
        if row.upper == 0:
            raise ZeroDivisorError(f'upper coefficient vanishes at n={n}', index=n)
        values[n + 1] = ((variable - row.diagonal) * values[n] - row.lower * values[n - 1]) \
            / row.upper
    if family.normalized and family.name in STANDARD_FORM_FAMILIES:
        values = values * symmetrizing_factors(standard, n_max, x)
    return values


def symmetrizing_factors(
    family: PolynomialFamily, n_max: int, x: RealOrComplex = 0.0
) -> np.ndarray:
    factors = np.ones(n_max + 1)
    standard = dataclasses.replace(family, normalized=False)
    for n in range(n_max):
        upper = recursion_row(standard, n, x).upper
        lower_next = recursion_row(standard, n + 1, x).lower
        if lower_next == 0:
            raise ZeroDivisorError(f'lower coefficient vanishes at n={n + 1}', index=n + 1)
        ratio = upper / lower_next
        if ratio <= 0:
            raise AsymmetryError(
                f'recursion cannot be symmetrized at n={n}', defect=abs(ratio)
            )
        factors[n + 1] = factors[n] * math.sqrt(ratio)
    return factors


def jacobi_norm(n: int, mu: float, nu: float) -> float:
    s = mu + nu
    if n == 0:
        log_value = (
            (s + 1) * math.log(2)
            + math.lgamma(mu + 1) + math.lgamma(nu + 1) - math.lgamma(s + 2)
        )
    else:
        log_value = (
            (s + 1) * math.log(2) - math.log(2 * n + s + 1)
            + math.lgamma(n + mu + 1) + math.lgamma(n + nu + 1)
            - math.lgamma(n + 1) - math.lgamma(n + s + 1)
        )
    return math.exp(log_value)


def laguerre_norm(n: int, nu: float) -> float:
    return math.exp(math.lgamma(n + nu + 1) - math.lgamma(n + 1))


def meixner_pollaczek_norm(n: int, mu: float, theta: float) -> float:
    return math.exp(
        math.log(2 * math.pi) + math.lgamma(n + 2 * mu)
        - 2 * mu * math.log(2 * math.sin(theta)) - math.lgamma(n + 1)
    )


def standard_norms(family: PolynomialFamily, n_max: int) -> List[float]:
    name = family.name
    if name == FamilyName.JACOBI_P:
        return [jacobi_norm(n, family.get('mu'), family.get('nu')) for n in range(n_max + 1)]
    if name == FamilyName.LAGUERRE_L:
        return [laguerre_norm(n, family.get('nu')) for n in range(n_max + 1)]
    if name == FamilyName.MEIXNER_POLLACZEK:
        return [
            meixner_pollaczek_norm(n, family.get('mu'), family.get('theta'))
            for n in range(n_max + 1)
        ]
    raise ParameterDomainError(f'{name.value} has no known norms')


def standard_recursion(family: PolynomialFamily, n_max: int) -> StandardRecursion:
    standard = dataclasses.replace(family, normalized=False)
    rows = [recursion_row(standard, n) for n in range(n_max + 2)]
    return StandardRecursion(
        a=[row.diagonal for row in rows[:n_max + 1]],
        c=[row.lower for row in rows[1:n_max + 2]],
        d=[row.upper for row in rows[:n_max + 1]]
    )


def normalize(
    std_recursion: StandardRecursion,
    norms: Sequence[float],
    relative_tolerance: float = 1e-12
) -> RecursionCoeffs:
    """
    Symmetric coefficients b_n of the orthonormal recursion, computed as
    c_n * sqrt(lambda_n / lambda_{n+1}) and required to equal
    d_n * sqrt(lambda_{n+1} / lambda_n).
    """
    if any(value <= 0 for value in norms):
        raise ParameterDomainError('norms must be positive')
    count = min(len(std_recursion.c), len(std_recursion.d), len(norms) - 1)
    b_values = []
    for n in range(count):
        ratio = math.sqrt(norms[n + 1] / norms[n])
        from_lower = std_recursion.c[n] / ratio
        from_upper = std_recursion.d[n] * ratio
        scale = max(abs(from_lower), abs(from_upper), 1e-300)
        defect = abs(from_lower - from_upper) / scale
        if defect > relative_tolerance:
            raise AsymmetryError(
                f'normalized off-diagonals disagree at n={n}: {from_lower!r} != {from_upper!r}',
                defect=defect
            )
        b_values.append(from_lower)
    return RecursionCoeffs.from_sequences(std_recursion.a[:count + 1], b_values)


def _factorial(n: int) -> float:
    return float(math.factorial(n))


def _jacobi_closed_form(mu: float, nu: float, x: RealOrComplex, n: int) -> complex:
    """
    C(n+mu, n) ((1+x)/2)^n 2F1(-n, -n-nu; mu+1; (x-1)/(x+1)), which is the same
    polynomial as (mu+1)_n/n! 2F1(-n, n+mu+nu+1; mu+1; (1-x)/2) term by term
    rearranged into a binomial sum. Negative arguments go through
    P(mu, nu; x) = (-1)^n P(nu, mu; -x), so the series argument stays in [-1, 0].
    """
    if complex(x).real < 0:
        return (-1) ** n * _jacobi_closed_form(nu, mu, -x, n)
    return pochhammer(mu + 1, n) / _factorial(n) * ((1 + x) / 2) ** n * hyp_terminating(
        [-n, -n - nu], [mu + 1], (x - 1) / (x + 1), n
    )


def _meixner_pollaczek_closed_form(
    mu: float, x: RealOrComplex, phase: RealOrComplex, n: int
) -> complex:
    # sum_k (mu+ix)_k (mu-ix)_(n-k) phase^(n-2k) / (k! (n-k)!) with phase = e^(i theta)
    rising = math.prod((mu - 1j * x + k for k in range(n)), start=complex(1.0))
    return phase ** n * rising / _factorial(n) * hyp_terminating(
        [-n, mu + 1j * x], [1 - n - mu + 1j * x], phase ** -2, n
    )


def closed_form(family: PolynomialFamily, x: RealOrComplex, n: int) -> complex:
    """
    Terminating hypergeometric representation, scaled so that the n=0 value is 1.
    """
    validate_family(family)
    _check_index(family, n)
    name = family.name
    if name == FamilyName.JACOBI_P:
        mu, nu = family.get('mu'), family.get('nu')
        value = _jacobi_closed_form(mu, nu, x, n)
        if family.normalized:
            value *= math.sqrt(jacobi_norm(0, mu, nu) / jacobi_norm(n, mu, nu))
        return value
    if name == FamilyName.LAGUERRE_L:
        nu = family.get('nu')
        value = pochhammer(nu + 1, n) / _factorial(n) * hyp_terminating(
            [-n], [nu + 1], x, n
        )
        if family.normalized:
            value *= math.sqrt(laguerre_norm(0, nu) / laguerre_norm(n, nu))
        return value
    if name == FamilyName.MEIXNER_POLLACZEK:
        mu, theta = family.get('mu'), family.get('theta')
        value = _meixner_pollaczek_closed_form(mu, x, cmath.exp(1j * theta), n)
        if family.normalized:
            value /= math.sqrt(pochhammer(2 * mu, n) / _factorial(n))
        return value
    if name == FamilyName.HYP_MEIXNER_POLLACZEK:
        mu, theta = family.get('mu'), family.get('theta')
        return _meixner_pollaczek_closed_form(mu, x, math.exp(-theta), n) \
            / math.sqrt(pochhammer(2 * mu, n) / _factorial(n))
    if name == FamilyName.MEIXNER:
        mu, beta = family.get('mu'), family.get('beta')
        return math.sqrt(pochhammer(2 * mu, n) / _factorial(n)) * beta ** (n / 2) \
            * hyp_terminating([-n, -x], [2 * mu], 1 - 1 / beta, n)
    if name == FamilyName.KRAWTCHOUK:
        gamma, size = family.get('gamma'), int(family.get('N'))
        return math.sqrt(math.comb(size, n)) * (gamma / (1 - gamma)) ** (n / 2) \
            * hyp_terminating([-n, -x], [-size], 1 / gamma, n)
    if name == FamilyName.CONTINUOUS_DUAL_HAHN:
        mu, alpha, beta = family.get('mu'), family.get('alpha'), family.get('beta')
        prefactor = math.sqrt(
            pochhammer(mu + alpha, n) * pochhammer(mu + beta, n)
            / (_factorial(n) * pochhammer(alpha + beta, n))
        )
        return prefactor * hyp_terminating(
            [-n, mu + 1j * x, mu - 1j * x], [mu + alpha, mu + beta], 1, n
        )
    if name == FamilyName.DUAL_HAHN:
        alpha, beta, size = family.get('alpha'), family.get('beta'), int(family.get('N'))
        prefactor = math.sqrt(
            pochhammer(alpha + 1, n) * pochhammer(beta + 1, size - n)
            / (_factorial(n) * _factorial(size - n))
        ) / math.sqrt(pochhammer(beta + 1, size) / _factorial(size))
        return prefactor * hyp_terminating(
            [-n, -x, x + alpha + beta + 1], [alpha + 1, -size], 1, n
        )
    raise ParameterDomainError(f'{name.value} has no known closed form')


def weight(family: PolynomialFamily, x: float) -> float:
    """
    Weight under which the family (as evaluated by eval_sequence) is orthogonal;
    orthonormal when the family is normalized.
    """
    validate_family(family)
    name = family.name
    if name == FamilyName.JACOBI_P:
        mu, nu = family.get('mu'), family.get('nu')
        value = (1 - x) ** mu * (1 + x) ** nu
        return value / jacobi_norm(0, mu, nu) if family.normalized else value
    if name == FamilyName.LAGUERRE_L:
        nu = family.get('nu')
        value = x ** nu * math.exp(-x)
        return value / laguerre_norm(0, nu) if family.normalized else value
    if name == FamilyName.MEIXNER_POLLACZEK:
        mu, theta = family.get('mu'), family.get('theta')
        log_value = (2 * theta - math.pi) * x + 2 * log_gamma(mu + 1j * x).real
        value = math.exp(log_value) / (2 * math.pi)
        if family.normalized:
            value *= math.exp(2 * mu * math.log(2 * math.sin(theta)) - math.lgamma(2 * mu))
        return value
    if name == FamilyName.MEIXNER:
        mu, beta = family.get('mu'), family.get('beta')
        return math.exp(
            2 * mu * math.log(1 - beta) + x * math.log(beta)
            + math.lgamma(x + 2 * mu) - math.lgamma(2 * mu) - math.lgamma(x + 1)
        )
    if name == FamilyName.KRAWTCHOUK:
        gamma, size = family.get('gamma'), int(family.get('N'))
        return math.comb(size, int(x)) * gamma ** x * (1 - gamma) ** (size - x)
    if name == FamilyName.CONTINUOUS_DUAL_HAHN:
        mu, alpha, beta = family.get('mu'), family.get('alpha'), family.get('beta')
        log_ratio = (
            log_gamma(mu + 1j * x) + log_gamma(alpha + 1j * x)
            + log_gamma(beta + 1j * x) - log_gamma(2j * x)
        ).real
        return math.exp(
            2 * log_ratio
            - math.lgamma(mu + alpha) - math.lgamma(mu + beta) - math.lgamma(alpha + beta)
        ) / (2 * math.pi)
    if name == FamilyName.DUAL_HAHN:
        alpha, beta, size = family.get('alpha'), family.get('beta'), int(family.get('N'))
        m = int(x)
        value = _factorial(size) * (2 * m + alpha + beta + 1) * pochhammer(alpha + 1, m) \
            * pochhammer(size - m + 1, m) / (
                pochhammer(m + alpha + beta + 1, size + 1)
                * pochhammer(beta + 1, m) * _factorial(m)
            )
        return value * pochhammer(beta + 1, size) / _factorial(size)
    raise ParameterDomainError(f'{name.value} has no known weight function')


def mp_phase_shift(mu: float, z: float) -> float:
    return arg_gamma(mu + 1j * z) - mu * math.pi / 2


def mp_bound_spectrum(mu: float, m_max: int) -> List[float]:
    if mu < 0:
        m_max = min(m_max, math.floor(-mu))
    return [-((m + mu) ** 2) for m in range(m_max + 1)]


def mp_asymptotic_amplitude(mu: float, theta: float, z: float) -> float:
    log_value = (
        math.log(2) + 0.5 * math.lgamma(2 * mu) + (math.pi / 2 - theta) * z
        - mu * math.log(2 * math.sin(theta)) - log_gamma(mu + 1j * z).real
    )
    return math.exp(log_value)


def mp_asymptotic_phase(mu: float, theta: float, z: float, n: float) -> float:
    return (
        n * theta + arg_gamma(mu + 1j * z) - mu * (math.pi / 2 - theta)
        - z * math.log(2 * n * math.sin(theta))
    )


def cdh_phase_shift(mu: float, alpha: float, beta: float, z: float) -> float:
    return (
        arg_gamma(2j * z) - arg_gamma(mu + 1j * z)
        - arg_gamma(alpha + 1j * z) - arg_gamma(beta + 1j * z)
    )


def _gbar_offsets(sigma: float, nu: float) -> Tuple[float, float]:
    if sigma >= 0:
        raise ParameterDomainError(f'NovelG discrete spectrum requires sigma < 0: {sigma!r}')
    root = math.sqrt(-sigma)
    return (nu + 1) / 2 - root, (nu + 1) / 2 + root


def gbar_level(sigma: float, nu: float, n: int) -> float:
    """
    -2 (n + (nu + 1) / 2 - sqrt(-sigma))^2 for any n, with no bound-state check;
    use it for single levels such as gbar_level(-9, 1, 0) == -8.
    """
    lower_offset, _ = _gbar_offsets(sigma, nu)
    return -2 * (n + lower_offset) ** 2


def gbar_spectrum(sigma: float, nu: float, n_max: int) -> List[float]:
    """
    Levels n = 0..min(n_max, floor(offset)) with offset = (nu + 1) / 2 - sqrt(-sigma).
    Empty when the offset is negative, e.g. gbar_spectrum(-9, 1, 5) == [].
    """
    lower_offset, _ = _gbar_offsets(sigma, nu)
    top = min(n_max, math.floor(lower_offset))
    return [gbar_level(sigma, nu, n) for n in range(top + 1)]


def _gbar_gamma_arguments(sigma: float, nu: float, z: float) -> Tuple[complex, complex, complex]:
    lower_offset, upper_offset = _gbar_offsets(sigma, nu)
    if z <= 0:
        raise ParameterDomainError(f'NovelG scattering quantities require z > 0: {z!r}')
    scaled = 1j * z / math.sqrt(2)
    return 1j * math.sqrt(2 * z), lower_offset + scaled, upper_offset + scaled


def gbar_phase_shift(sigma: float, nu: float, z: float) -> float:
    top, lower, upper = _gbar_gamma_arguments(sigma, nu, z)
    return arg_gamma(top) - arg_gamma(lower) - arg_gamma(upper)


def gbar_amplitude(sigma: float, nu: float, z: float) -> float:
    """
    Known only up to a z-independent constant; compare ratios.
    """
    top, lower, upper = _gbar_gamma_arguments(sigma, nu, z)
    return math.exp((log_gamma(top) - log_gamma(lower) - log_gamma(upper)).real)


def novel_h_orthonormal_factor(n: int, mu: float, nu: float) -> float:
    s = mu + nu
    return math.sqrt(
        (2 * n + s + 1) / (s + 1)
        * pochhammer(1, n) * pochhammer(s + 1, n)
        / (pochhammer(mu + 1, n) * pochhammer(nu + 1, n))
    )


class Oscillation(str, enum.Enum):
    LINEAR = 'linear'
    LOGARITHMIC = 'logarithmic'


class AsymptoticFit(NamedTuple):
    """
    P_n ~ amplitude * n^-tau * cos(theta * t + log_coefficient * ln n + delta)
    with t = n for linear and t = ln n for logarithmic oscillation.
    """
    tau: float
    amplitude: float
    theta: float
    delta: float
    log_coefficient: float
    residual: float
    oscillation: Oscillation


def oscillation_for(family: PolynomialFamily) -> Oscillation:
    if family.name == FamilyName.NOVEL_G:
        return Oscillation.LOGARITHMIC
    return Oscillation.LINEAR


def _linear_model(
    n: np.ndarray, log_amplitude: float, tau: float, theta: float, kappa: float, delta: float
) -> np.ndarray:
    return np.exp(log_amplitude - tau * np.log(n)) * np.cos(theta * n + kappa * np.log(n) + delta)


def _logarithmic_model(
    n: np.ndarray, log_amplitude: float, tau: float, theta: float, delta: float
) -> np.ndarray:
    return np.exp(log_amplitude - tau * np.log(n)) * np.cos(theta * np.log(n) + delta)


def _crossing_phases(t: np.ndarray, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    signs = np.where(f >= 0, 1, -1)
    index = np.nonzero(signs[:-1] != signs[1:])[0]
    if len(index) < 2:
        raise FitFailureError(
            f'sequence has {len(index)} sign changes, at least 2 are needed',
            residual=math.inf
        )
    crossings = t[index] - f[index] * (t[index + 1] - t[index]) / (f[index + 1] - f[index])
    # cos falls through zero at pi/2 and rises through it at 3pi/2
    first_phase = math.pi / 2 if f[index[0]] > 0 else 3 * math.pi / 2
    return crossings, first_phase + math.pi * np.arange(len(index))


def _initial_guess(
    n: np.ndarray, f: np.ndarray, oscillation: Oscillation
) -> List[float]:
    log_n = np.log(n)
    if oscillation == Oscillation.LINEAR:
        crossings, phases = _crossing_phases(n, f)
        design = np.column_stack([crossings, np.log(crossings), np.ones_like(crossings)])
        if len(crossings) < 3:
            design = design[:, [0, 2]]
        solution = np.linalg.lstsq(design, phases, rcond=None)[0]
        theta, delta = solution[0], solution[-1]
        kappa = solution[1] if len(solution) == 3 else 0.0
        phase = theta * n + kappa * log_n + delta
    else:
        crossings, phases = _crossing_phases(log_n, f)
        design = np.column_stack([crossings, np.ones_like(crossings)])
        theta, delta = np.linalg.lstsq(design, phases, rcond=None)[0]
        kappa = 0.0
        phase = theta * log_n + delta
    cosine = np.cos(phase)
    mask = np.abs(cosine) > 0.5
    if mask.sum() < 2:
        raise FitFailureError('too few samples away from the nodes', residual=math.inf)
    envelope = np.log(np.abs(f[mask] / cosine[mask]) + 1e-300)
    slope, intercept = np.polyfit(log_n[mask], envelope, 1)
    if oscillation == Oscillation.LINEAR:
        return [intercept, -slope, theta, kappa, delta]
    return [intercept, -slope, theta, delta]


def asymptotic_fit(
    family: PolynomialFamily,
    x: RealOrComplex,
    n_lo: int,
    n_hi: int,
    max_residual: float = 0.05
) -> AsymptoticFit:
    """
    Least-squares fit of the large-n form of P_n(x) over n_lo..n_hi.

    The residual is rms(P - model) / rms(P); fits above `max_residual`
    raise FitFailureError.
    """
    if n_lo < 1 or n_hi < n_lo + 50:
        raise ParameterDomainError(
            f'asymptotic fit needs 1 <= n_lo and n_hi >= n_lo + 50: {n_lo}, {n_hi}'
        )
    values = eval_sequence(family, x, n_hi)[n_lo:]
    if np.iscomplexobj(values):
        if np.max(np.abs(values.imag)) > 1e-10 * np.max(np.abs(values.real)):
            raise ParameterDomainError('asymptotic fit needs a real sequence')
        values = values.real
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    oscillation = oscillation_for(family)
    model = _linear_model if oscillation == Oscillation.LINEAR else _logarithmic_model
    initial = _initial_guess(n, values, oscillation)
    LOGGER.debug('asymptotic fit initial guess for %s: %s', family.name.value, initial)
    try:
        fitted, _ = scipy.optimize.curve_fit(
            model, n, values, p0=initial,
            sigma=n ** -float(np.clip(initial[1], -2.0, 2.0)),
            maxfev=20000
        )
    except (RuntimeError, ValueError) as exc:
        raise FitFailureError(f'least-squares fit did not converge: {exc}', residual=math.inf) \
            from exc
    residual = float(
        np.sqrt(np.mean((values - model(n, *fitted)) ** 2) / np.mean(values ** 2))
    )
    if residual > max_residual:
        raise FitFailureError(
            f'asymptotic fit residual {residual:.3g} exceeds {max_residual:.3g}',
            residual=residual
        )
    log_amplitude, tau, theta = fitted[0], fitted[1], fitted[2]
    delta = fitted[-1]
    kappa = fitted[3] if oscillation == Oscillation.LINEAR else 0.0
    if theta < 0:
        theta, kappa, delta = -theta, -kappa, -delta
    return AsymptoticFit(
        tau=float(tau),
        amplitude=float(math.exp(log_amplitude)),
        theta=float(theta),
        delta=math.remainder(float(delta), 2 * math.pi),
        log_coefficient=float(kappa),
        residual=residual,
        oscillation=oscillation
    )
