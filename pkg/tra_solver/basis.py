import dataclasses
import enum
import logging
import math
from typing import Callable, Dict, NamedTuple, Tuple

import numpy as np

from tra_solver.eigensolve import SymTridiag, eig_tridiag
from tra_solver.errors import ParameterDomainError
from tra_solver.orthopoly import (
    FamilyName,
    PolynomialFamily,
    eval_sequence,
    jacobi_norm,
    laguerre_norm,
    recursion_row,
    validate_family
)


LOGGER = logging.getLogger(__name__)


class BasisFamily(str, enum.Enum):
    JACOBI = 'Jacobi'
    LAGUERRE = 'Laguerre'


class MapName(str, enum.Enum):
    QUADRATIC = 'Quadratic'
    LINEAR = 'Linear'
    EXP = 'Exp'
    SHIFTED_EXP = 'ShiftedExp'
    TANH = 'Tanh'
    TANH_SQ = 'TanhSq'
    SIN = 'Sin'
    SIN_SQ = 'SinSq'


class MapValues(NamedTuple):
    y: float
    dy: float
    d2y: float


@dataclasses.dataclass(frozen=True)
class CoordinateMap:
    name: MapName
    scale: float
    factor: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ParameterDomainError(f'map scale must be positive: {self.scale!r}')
        if not self.factor > 0:
            raise ParameterDomainError(f'map factor must be positive: {self.factor!r}')

    @property
    def rule(self) -> '_MapRule':
        return MAP_RULES[self.name]

    @property
    def compatible_family(self) -> BasisFamily:
        return self.rule.family


class _MapRule(NamedTuple):
    family: BasisFamily
    forward: Callable[[float, float, float], MapValues]
    inverse: Callable[[float, float, float], float]
    domain: Callable[[float], Tuple[float, float]]
    # dx/dy = constant(scale) * (1 - y)^a * (1 + y)^b  (Jacobi-compatible)
    # dx/dy = constant(scale) * y^a                    (Laguerre-compatible)
    measure_constant: Callable[[float], float]
    measure_exponents: Tuple[float, float]


def _quadratic(x: float, scale: float, _: float) -> MapValues:
    return MapValues((scale * x) ** 2, 2 * scale * scale * x, 2 * scale * scale)


def _linear(x: float, scale: float, _: float) -> MapValues:
    return MapValues(scale * x, scale, 0.0)


def _exp(x: float, scale: float, factor: float) -> MapValues:
    y = factor * math.exp(-scale * x)
    return MapValues(y, -scale * y, scale * scale * y)


def _shifted_exp(x: float, scale: float, _: float) -> MapValues:
    decay = math.exp(-scale * x)
    return MapValues(1 - 2 * decay, 2 * scale * decay, -2 * scale * scale * decay)


def _tanh(x: float, scale: float, _: float) -> MapValues:
    y = math.tanh(scale * x)
    return MapValues(y, scale * (1 - y * y), -2 * scale * scale * y * (1 - y * y))


def _tanh_sq(x: float, scale: float, _: float) -> MapValues:
    t = math.tanh(scale * x)
    sech_sq = 1 - t * t
    return MapValues(
        2 * t * t - 1,
        4 * scale * t * sech_sq,
        4 * scale * scale * sech_sq * (1 - 3 * t * t)
    )


def _sin(x: float, scale: float, _: float) -> MapValues:
    return MapValues(
        math.sin(scale * x), scale * math.cos(scale * x), -scale * scale * math.sin(scale * x)
    )


def _sin_sq(x: float, scale: float, _: float) -> MapValues:
    angle = 2 * scale * x
    return MapValues(
        -math.cos(angle), 2 * scale * math.sin(angle), 4 * scale * scale * math.cos(angle)
    )


MAP_RULES: Dict[MapName, _MapRule] = {
    MapName.QUADRATIC: _MapRule(
        BasisFamily.LAGUERRE, _quadratic,
        lambda y, scale, _: math.sqrt(y) / scale,
        lambda scale: (0.0, math.inf),
        lambda scale: 1 / (2 * scale), (-0.5, 0.0)
    ),
    MapName.LINEAR: _MapRule(
        BasisFamily.LAGUERRE, _linear,
        lambda y, scale, _: y / scale,
        lambda scale: (0.0, math.inf),
        lambda scale: 1 / scale, (0.0, 0.0)
    ),
    MapName.EXP: _MapRule(
        BasisFamily.LAGUERRE, _exp,
        lambda y, scale, factor: -math.log(y / factor) / scale,
        lambda scale: (-math.inf, math.inf),
        lambda scale: 1 / scale, (-1.0, 0.0)
    ),
    MapName.SHIFTED_EXP: _MapRule(
        BasisFamily.JACOBI, _shifted_exp,
        lambda y, scale, _: -math.log((1 - y) / 2) / scale,
        lambda scale: (0.0, math.inf),
        lambda scale: 1 / scale, (-1.0, 0.0)
    ),
    MapName.TANH: _MapRule(
        BasisFamily.JACOBI, _tanh,
        lambda y, scale, _: math.atanh(y) / scale,
        lambda scale: (-math.inf, math.inf),
        lambda scale: 1 / scale, (-1.0, -1.0)
    ),
    MapName.TANH_SQ: _MapRule(
        BasisFamily.JACOBI, _tanh_sq,
        lambda y, scale, _: math.atanh(math.sqrt((1 + y) / 2)) / scale,
        lambda scale: (0.0, math.inf),
        lambda scale: 1 / (math.sqrt(2) * scale), (-1.0, -0.5)
    ),
    MapName.SIN: _MapRule(
        BasisFamily.JACOBI, _sin,
        lambda y, scale, _: math.asin(y) / scale,
        lambda scale: (-math.pi / (2 * scale), math.pi / (2 * scale)),
        lambda scale: 1 / scale, (-0.5, -0.5)
    ),
    MapName.SIN_SQ: _MapRule(
        BasisFamily.JACOBI, _sin_sq,
        lambda y, scale, _: math.acos(-y) / (2 * scale),
        lambda scale: (0.0, math.pi / (2 * scale)),
        lambda scale: 1 / (2 * scale), (-0.5, -0.5)
    )
}


def map_domain(coordinate_map: CoordinateMap) -> Tuple[float, float]:
    return coordinate_map.rule.domain(coordinate_map.scale)


def map_eval(coordinate_map: CoordinateMap, x: float) -> MapValues:
    low, high = map_domain(coordinate_map)
    if not low <= x <= high:
        raise ParameterDomainError(
            f'x={x!r} outside the {coordinate_map.name.value} domain [{low}, {high}]'
        )
    return coordinate_map.rule.forward(x, coordinate_map.scale, coordinate_map.factor)


def map_inverse(coordinate_map: CoordinateMap, y: float) -> float:
    try:
        return coordinate_map.rule.inverse(y, coordinate_map.scale, coordinate_map.factor)
    except ValueError as exc:
        raise ParameterDomainError(
            f'y={y!r} outside the {coordinate_map.name.value} range'
        ) from exc


def measure(coordinate_map: CoordinateMap, y: float) -> float:
    """
    |dx/dy| as a function of y.
    """
    rule = coordinate_map.rule
    a, b = rule.measure_exponents
    constant = rule.measure_constant(coordinate_map.scale)
    if rule.family == BasisFamily.LAGUERRE:
        return constant * y ** a
    return constant * (1 - y) ** a * (1 + y) ** b


@dataclasses.dataclass(frozen=True)
class BasisSpec:
    """
    Jacobi: phi_n = A_n (1-y)^alpha (1+y)^beta P_n^(mu,nu)(y)
    Laguerre: phi_n = A_n y^alpha e^(-beta y) L_n^nu(y)

    For Jacobi, alpha is always the exponent of (1 - y) and beta that of (1 + y),
    matching the polynomial weight (1 - y)^mu (1 + y)^nu; the ground state of the
    three-parameter problem therefore takes 2 alpha = mu and 2 beta = nu + 1.

    A_n = 1 / sqrt(c * h_n), with c the measure constant of the map and
    h_n the polynomial norm, so that matched exponents give an orthonormal set.
    """
    family: BasisFamily
    alpha: float
    beta: float
    mu: float
    nu: float
    coordinate_map: CoordinateMap

    def __post_init__(self):
        if self.coordinate_map.compatible_family != self.family:
            raise ParameterDomainError(
                f'{self.coordinate_map.name.value} map is not compatible with'
                f' the {self.family.value} basis'
            )
        if self.family == BasisFamily.JACOBI:
            if self.alpha < 0 or self.beta < 0:
                raise ParameterDomainError('Jacobi basis requires alpha, beta >= 0')
        elif self.alpha < 0 or self.beta <= 0:
            raise ParameterDomainError('Laguerre basis requires alpha >= 0 and beta > 0')
        validate_family(self.polynomial_family)

    @staticmethod
    def jacobi(
        alpha: float, beta: float, mu: float, nu: float, coordinate_map: CoordinateMap
    ) -> 'BasisSpec':
        return BasisSpec(BasisFamily.JACOBI, alpha, beta, mu, nu, coordinate_map)

    @staticmethod
    def laguerre(
        alpha: float, beta: float, nu: float, coordinate_map: CoordinateMap
    ) -> 'BasisSpec':
        return BasisSpec(BasisFamily.LAGUERRE, alpha, beta, 0.0, nu, coordinate_map)

    @property
    def polynomial_family(self) -> PolynomialFamily:
        if self.family == BasisFamily.JACOBI:
            return PolynomialFamily.jacobi(self.mu, self.nu)
        return PolynomialFamily.laguerre(self.nu)


def polynomial_norm(spec: BasisSpec, n: int) -> float:
    if spec.family == BasisFamily.JACOBI:
        return jacobi_norm(n, spec.mu, spec.nu)
    return laguerre_norm(n, spec.nu)


def normalization(spec: BasisSpec, n: int) -> float:
    constant = spec.coordinate_map.rule.measure_constant(spec.coordinate_map.scale)
    return 1 / math.sqrt(constant * polynomial_norm(spec, n))


def envelope(spec: BasisSpec, y: float) -> float:
    if spec.family == BasisFamily.JACOBI:
        return (1 - y) ** spec.alpha * (1 + y) ** spec.beta
    return y ** spec.alpha * math.exp(-spec.beta * y)


def _envelope_log_derivatives(spec: BasisSpec, y: float) -> Tuple[float, float]:
    """
    g = w'/w and h = w''/w of the envelope.
    """
    if spec.family == BasisFamily.JACOBI:
        alpha, beta = spec.alpha, spec.beta
        g = beta / (1 + y) - alpha / (1 - y)
        h = (
            beta * (beta - 1) / (1 + y) ** 2 + alpha * (alpha - 1) / (1 - y) ** 2
            - 2 * alpha * beta / (1 - y * y)
        )
        return g, h
    g = spec.alpha / y - spec.beta
    return g, g * g - spec.alpha / (y * y)


class ReducedDerivatives(NamedTuple):
    """
    phi_n = A_n w(y) value[n], d phi_n/dy = A_n w(y) first[n],
    d2 phi_n/dy2 = A_n w(y) second[n], for n = 0..n_max.
    """
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray


def _polynomial_derivatives(
    spec: BasisSpec, n_max: int, y: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = eval_sequence(spec.polynomial_family, y, n_max)
    first = np.zeros(n_max + 1)
    second = np.zeros(n_max + 1)
    n = np.arange(n_max + 1)
    if spec.family == BasisFamily.JACOBI:
        s = spec.mu + spec.nu
        if n_max >= 1:
            shifted = eval_sequence(PolynomialFamily.jacobi(spec.mu + 1, spec.nu + 1), y, n_max - 1)
            first[1:] = 0.5 * (n[1:] + s + 1) * shifted
        if n_max >= 2:
            twice = eval_sequence(PolynomialFamily.jacobi(spec.mu + 2, spec.nu + 2), y, n_max - 2)
            second[2:] = 0.25 * (n[2:] + s + 1) * (n[2:] + s + 2) * twice
    else:
        if n_max >= 1:
            first[1:] = -eval_sequence(PolynomialFamily.laguerre(spec.nu + 1), y, n_max - 1)
        if n_max >= 2:
            second[2:] = eval_sequence(PolynomialFamily.laguerre(spec.nu + 2), y, n_max - 2)
    return values, first, second


def reduced_derivatives(spec: BasisSpec, n_max: int, y: float) -> ReducedDerivatives:
    values, first, second = _polynomial_derivatives(spec, n_max, y)
    g, h = _envelope_log_derivatives(spec, y)
    return ReducedDerivatives(
        value=values,
        first=first + g * values,
        second=second + 2 * g * first + h * values
    )


def basis_eval_y(spec: BasisSpec, n: int, y: float) -> float:
    value = eval_sequence(spec.polynomial_family, y, n)[n]
    return normalization(spec, n) * envelope(spec, y) * float(value)


def basis_eval(spec: BasisSpec, n: int, x: float) -> float:
    return basis_eval_y(spec, n, map_eval(spec.coordinate_map, x).y)


def basis_eval_all(spec: BasisSpec, size: int, x: float) -> np.ndarray:
    """
    phi_0(x) .. phi_{size-1}(x) from a single recursion pass.
    """
    y = map_eval(spec.coordinate_map, x).y
    factors = np.array([normalization(spec, n) for n in range(size)])
    return factors * envelope(spec, y) * eval_sequence(spec.polynomial_family, y, size - 1)


class BasisDerivatives(NamedTuple):
    value: float
    dy: float
    d2y: float


def basis_derivatives(spec: BasisSpec, n: int, x: float) -> BasisDerivatives:
    y = map_eval(spec.coordinate_map, x).y
    reduced = reduced_derivatives(spec, n, y)
    scale = normalization(spec, n) * envelope(spec, y)
    return BasisDerivatives(
        value=scale * float(reduced.value[n]),
        dy=scale * float(reduced.first[n]),
        d2y=scale * float(reduced.second[n])
    )


def position_matrix(family: PolynomialFamily, size: int) -> SymTridiag:
    """
    Matrix of multiplication by y in the orthonormal polynomial basis.
    """
    if family.name not in (FamilyName.JACOBI_P, FamilyName.LAGUERRE_L):
        raise ParameterDomainError(
            f'position matrix is only defined for Jacobi and Laguerre, got {family.name.value}'
        )
    if size < 1:
        raise ParameterDomainError(f'position matrix size must be positive: {size}')
    orthonormal = dataclasses.replace(family, normalized=True)
    validate_family(orthonormal)
    rows = [recursion_row(orthonormal, n) for n in range(size)]
    return SymTridiag.from_sequences(
        [row.diagonal for row in rows], [row.upper for row in rows[:-1]]
    )


class QuadratureRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray


def gauss_quadrature(family: PolynomialFamily, size: int) -> QuadratureRule:
    """
    Gauss rule for the family's weight ((1-y)^mu (1+y)^nu or y^nu e^-y),
    exact for polynomials of degree <= 2 * size - 1.

    Weights are Christoffel numbers h_0 / sum_n p_n(y_k)^2 with p_0 = 1, which keeps
    the tiny weights near the ends of the support accurate.
    """
    nodes = eig_tridiag(position_matrix(family, size)).values
    if family.name == FamilyName.JACOBI_P:
        total = jacobi_norm(0, family.get('mu'), family.get('nu'))
    else:
        total = laguerre_norm(0, family.get('nu'))
    orthonormal = dataclasses.replace(family, normalized=True)
    values = np.array([eval_sequence(orthonormal, float(y), size - 1) for y in nodes])
    peak = np.max(np.abs(values), axis=1)
    scaled = values / peak[:, np.newaxis]
    weights = total * (1 / peak) ** 2 / np.sum(scaled * scaled, axis=1)
    return QuadratureRule(nodes=nodes, weights=weights)


def quadrature_remainder(spec: BasisSpec, y: float) -> float:
    """
    phi_m phi_n |dx/dy| divided by A_m A_n P_m P_n and the polynomial weight.
    """
    rule = spec.coordinate_map.rule
    a, b = rule.measure_exponents
    constant = rule.measure_constant(spec.coordinate_map.scale)
    if spec.family == BasisFamily.JACOBI:
        return constant * (1 - y) ** (2 * spec.alpha + a - spec.mu) \
            * (1 + y) ** (2 * spec.beta + b - spec.nu)
    return constant * y ** (2 * spec.alpha + a - spec.nu) * math.exp((1 - 2 * spec.beta) * y)


def overlap_matrix(spec: BasisSpec, size: int, n_quad: int) -> np.ndarray:
    rule = gauss_quadrature(spec.polynomial_family, n_quad)
    factors = np.array([normalization(spec, n) for n in range(size)])
    values = np.array([
        eval_sequence(spec.polynomial_family, y, size - 1) for y in rule.nodes
    ])
    remainder = np.array([quadrature_remainder(spec, y) for y in rule.nodes])
    weighted = values * (rule.weights * remainder)[:, np.newaxis]
    return np.outer(factors, factors) * (values.T @ weighted)


def overlap(spec: BasisSpec, n: int, m: int, n_quad: int) -> float:
    return float(overlap_matrix(spec, max(n, m) + 1, n_quad)[n, m])
