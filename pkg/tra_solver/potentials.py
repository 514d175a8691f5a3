import dataclasses
import enum
import logging
import math
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from tra_solver.basis import CoordinateMap, MapName, map_inverse
from tra_solver.errors import ParameterDomainError


LOGGER = logging.getLogger(__name__)


class PotentialName(str, enum.Enum):
    THREE_PARAMETER = 'ThreeParameter'
    OSCILLATOR = 'Oscillator'
    COULOMB = 'Coulomb'
    MORSE = 'Morse'
    TRIGONOMETRIC_SCARF = 'TrigonometricScarf'
    HYPERBOLIC_SCARF = 'HyperbolicScarf'
    ROSEN_MORSE_I = 'RosenMorseI'
    ROSEN_MORSE_II = 'RosenMorseII'
    GENERALIZED_POSCHL_TELLER = 'GeneralizedPoschlTeller'
    ECKART = 'Eckart'
    POSCHL_TELLER_I = 'PoschlTellerI'
    POSCHL_TELLER_II = 'PoschlTellerII'


Parameters = Mapping[str, float]


class _CatalogEntry(NamedTuple):
    parameter_names: Tuple[str, ...]
    domain: Callable[[Parameters], Tuple[float, float]]
    evaluate: Callable[[Parameters, float], float]
    default_map: Optional[MapName]
    radial: bool = False


def _three_parameter(p: Parameters, x: float) -> float:
    scale = p['lambda']
    growth = math.expm1(scale * x)
    return (
        (p['V0'] + p['V1'] * (1 - 2 * math.exp(-scale * x))) / growth
        + p['VR'] * math.exp(scale * x) / growth ** 2
    )


def _whole_line(_: Parameters) -> Tuple[float, float]:
    return (-math.inf, math.inf)


def _half_line(_: Parameters) -> Tuple[float, float]:
    return (0.0, math.inf)


def _csc(value: float) -> float:
    return 1 / math.sin(value)


def _csch(value: float) -> float:
    return 1 / math.sinh(value)


CATALOG: Dict[PotentialName, _CatalogEntry] = {
    PotentialName.THREE_PARAMETER: _CatalogEntry(
        ('V0', 'V1', 'VR', 'lambda'), _half_line, _three_parameter, MapName.SHIFTED_EXP
    ),
    PotentialName.OSCILLATOR: _CatalogEntry(
        ('omega',), _half_line,
        lambda p, x: 0.5 * p['omega'] ** 4 * x * x,
        MapName.QUADRATIC, radial=True
    ),
    PotentialName.COULOMB: _CatalogEntry(
        ('Z',), _half_line, lambda p, x: -p['Z'] / x, MapName.LINEAR, radial=True
    ),
    PotentialName.MORSE: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _whole_line,
        lambda p, x: (
            p['V0'] + p['V1'] * math.exp(-2 * p['alpha'] * x)
            - p['V2'] * math.exp(-p['alpha'] * x)
        ),
        MapName.EXP
    ),
    PotentialName.TRIGONOMETRIC_SCARF: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'),
        lambda p: (0.0, math.pi / p['alpha']),
        lambda p, x: (
            p['V0'] + p['V1'] * _csc(p['alpha'] * x) ** 2
            - p['V2'] * _csc(p['alpha'] * x) / math.tan(p['alpha'] * x)
        ),
        MapName.SIN
    ),
    PotentialName.HYPERBOLIC_SCARF: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _whole_line,
        lambda p, x: (
            p['V0'] + p['V1'] / math.cosh(p['alpha'] * x) ** 2
            + p['V2'] * math.tanh(p['alpha'] * x) / math.cosh(p['alpha'] * x)
        ),
        MapName.TANH_SQ
    ),
    PotentialName.ROSEN_MORSE_I: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'),
        lambda p: (-math.pi / (2 * p['alpha']), math.pi / (2 * p['alpha'])),
        lambda p, x: (
            p['V0'] + p['V1'] * math.tan(p['alpha'] * x)
            + p['V2'] / math.cos(p['alpha'] * x) ** 2
        ),
        None
    ),
    PotentialName.ROSEN_MORSE_II: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _whole_line,
        lambda p, x: (
            p['V0'] + p['V1'] * math.tanh(p['alpha'] * x)
            - p['V2'] / math.cosh(p['alpha'] * x) ** 2
        ),
        MapName.TANH
    ),
    PotentialName.GENERALIZED_POSCHL_TELLER: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _half_line,
        lambda p, x: (
            p['V0'] + p['V1'] * _csch(p['alpha'] * x) ** 2
            - p['V2'] * _csch(p['alpha'] * x) / math.tanh(p['alpha'] * x)
        ),
        None
    ),
    PotentialName.ECKART: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _half_line,
        lambda p, x: (
            p['V0'] - p['V1'] / math.tanh(p['alpha'] * x)
            + p['V2'] * _csch(p['alpha'] * x) ** 2
        ),
        MapName.SHIFTED_EXP
    ),
    PotentialName.POSCHL_TELLER_I: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'),
        lambda p: (0.0, math.pi / (2 * p['alpha'])),
        lambda p, x: (
            -p['V0'] + p['V1'] / math.cos(p['alpha'] * x) ** 2
            + p['V2'] * _csc(p['alpha'] * x) ** 2
        ),
        MapName.SIN_SQ
    ),
    PotentialName.POSCHL_TELLER_II: _CatalogEntry(
        ('V0', 'V1', 'V2', 'alpha'), _half_line,
        lambda p, x: (
            p['V0'] - p['V1'] / math.cosh(p['alpha'] * x) ** 2
            + p['V2'] * _csch(p['alpha'] * x) ** 2
        ),
        MapName.TANH_SQ
    )
}


@dataclasses.dataclass(frozen=True)
class PotentialSpec:
    name: PotentialName
    parameters: Mapping[str, float]

    def __post_init__(self):
        expected = set(self.entry.parameter_names)
        if set(self.parameters) != expected:
            raise ParameterDomainError(
                f'{self.name.value} expects parameters {sorted(expected)},'
                f' got {sorted(self.parameters)}'
            )
        for key in ('lambda', 'alpha'):
            if key in self.parameters and not self.parameters[key] > 0:
                raise ParameterDomainError(f'{key} must be positive: {self.parameters[key]!r}')
        if self.name == PotentialName.THREE_PARAMETER and self.parameters['VR'] < 0:
            raise ParameterDomainError(f'VR must be nonnegative: {self.parameters["VR"]!r}')

    @staticmethod
    def three_parameter(v0: float, v1: float, vr: float, scale: float) -> 'PotentialSpec':
        return PotentialSpec(
            PotentialName.THREE_PARAMETER, {'V0': v0, 'V1': v1, 'VR': vr, 'lambda': scale}
        )

    @staticmethod
    def three_parameter_dimensionless(
        u0: float, u1: float, ur: float, scale: float
    ) -> 'PotentialSpec':
        energy_unit = scale * scale / 2
        return PotentialSpec.three_parameter(
            u0 * energy_unit, u1 * energy_unit, ur * energy_unit, scale
        )

    @staticmethod
    def oscillator(omega: float) -> 'PotentialSpec':
        return PotentialSpec(PotentialName.OSCILLATOR, {'omega': omega})

    @staticmethod
    def coulomb(charge: float) -> 'PotentialSpec':
        return PotentialSpec(PotentialName.COULOMB, {'Z': charge})

    @property
    def entry(self) -> _CatalogEntry:
        return CATALOG[self.name]

    @property
    def domain(self) -> Tuple[float, float]:
        return self.entry.domain(self.parameters)

    @property
    def is_radial(self) -> bool:
        return self.entry.radial

    def get(self, key: str) -> float:
        return self.parameters[key]


class DimensionlessStrengths(NamedTuple):
    u0: float
    u1: float
    ur: float


def dimensionless_strengths(spec: PotentialSpec) -> DimensionlessStrengths:
    """
    u_i = 2 V_i / lambda^2 for the three-parameter potential.
    """
    if spec.name != PotentialName.THREE_PARAMETER:
        raise ParameterDomainError(f'{spec.name.value} has no dimensionless strengths')
    factor = 2 / spec.get('lambda') ** 2
    return DimensionlessStrengths(
        u0=factor * spec.get('V0'), u1=factor * spec.get('V1'), ur=factor * spec.get('VR')
    )


def potential_eval(spec: PotentialSpec, x: float) -> float:
    low, high = spec.domain
    if not low < x < high:
        raise ParameterDomainError(
            f'{spec.name.value} is only defined for {low} < x < {high}, got x={x!r}'
        )
    try:
        value = spec.entry.evaluate(spec.parameters, x)
    except ZeroDivisionError as exc:
        raise ParameterDomainError(f'{spec.name.value} is singular at x={x!r}') from exc
    if not math.isfinite(value):
        raise ParameterDomainError(f'{spec.name.value} is not finite at x={x!r}')
    return value


def effective_potential(spec: PotentialSpec, x: float, angular_momentum: int = 0) -> float:
    value = potential_eval(spec, x)
    if angular_momentum:
        value += angular_momentum * (angular_momentum + 1) / (2 * x * x)
    return value


def transformed_potential(
    spec: PotentialSpec, coordinate_map: CoordinateMap, y: float
) -> float:
    """
    V(x(y)); for the three-parameter potential under the shifted exponential map
    with matching scale this is (1-y)/(1+y) [V0 + V1 y + 2 VR/(1+y)].
    """
    if (
        spec.name == PotentialName.THREE_PARAMETER
        and coordinate_map.name == MapName.SHIFTED_EXP
        and coordinate_map.scale == spec.get('lambda')
    ):
        if not -1 < y < 1:
            raise ParameterDomainError(f'{spec.name.value} is singular at y={y!r}')
        bracket = spec.get('V0') + spec.get('V1') * y + 2 * spec.get('VR') / (1 + y)
        return (1 - y) / (1 + y) * bracket
    return potential_eval(spec, map_inverse(coordinate_map, y))


class Landmarks(NamedTuple):
    gamma: float
    zero_crossing: float
    extremum: float
    extremum_value: float


def three_parameter_landmarks(spec: PotentialSpec) -> Landmarks:
    """
    With VR = 0 the potential is -2 V1 (e^(-lambda x) - gamma) / (e^(lambda x) - 1),
    gamma = (V0 + V1) / (2 V1). It crosses zero at e^(-lambda x) = gamma and has its
    extremum at e^(-lambda x) = 1 - sqrt(1 - gamma), where it equals
    2 V1 (1 - sqrt(1 - gamma))^2.
    """
    if spec.name != PotentialName.THREE_PARAMETER:
        raise ParameterDomainError(f'landmarks are not defined for {spec.name.value}')
    if spec.get('VR') != 0 or spec.get('V1') == 0:
        raise ParameterDomainError('landmarks require VR = 0 and V1 != 0')
    gamma = (spec.get('V0') + spec.get('V1')) / (2 * spec.get('V1'))
    if not 0 < gamma < 1:
        raise ParameterDomainError(f'landmarks require 0 < gamma < 1, got {gamma!r}')
    scale = spec.get('lambda')
    extremum = -math.log(1 - math.sqrt(1 - gamma)) / scale
    return Landmarks(
        gamma=gamma,
        zero_crossing=-math.log(gamma) / scale,
        extremum=extremum,
        extremum_value=potential_eval(spec, extremum)
    )


class GridPoint(NamedTuple):
    x: float
    value: float


def potential_grid(
    spec: PotentialSpec,
    x_lo: float,
    x_hi: float,
    n_points: int,
    angular_momentum: int = 0
) -> List[GridPoint]:
    if n_points < 2:
        raise ParameterDomainError(f'a potential grid needs at least 2 points: {n_points}')
    if not x_lo < x_hi:
        raise ParameterDomainError(f'grid needs x_lo < x_hi: {x_lo!r}, {x_hi!r}')
    grid = [
        GridPoint(float(x), effective_potential(spec, float(x), angular_momentum))
        for x in np.linspace(x_lo, x_hi, n_points)
    ]
    LOGGER.debug('sampled %s on %d points in [%g, %g]', spec.name.value, n_points, x_lo, x_hi)
    return grid


def potential_grid_frame(grid: List[GridPoint]) -> pd.DataFrame:
    return pd.DataFrame(grid, columns=['x', 'V'])
