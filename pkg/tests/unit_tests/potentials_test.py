import math

import numpy as np
import pytest

from tra_solver.basis import CoordinateMap, MapName, map_eval
from tra_solver.errors import ParameterDomainError
from tra_solver.potentials import (
    CATALOG,
    PotentialName,
    PotentialSpec,
    dimensionless_strengths,
    effective_potential,
    potential_eval,
    potential_grid,
    potential_grid_frame,
    three_parameter_landmarks,
    transformed_potential
)


@pytest.fixture(name='three_parameter_spec')
def _three_parameter_spec() -> PotentialSpec:
    return PotentialSpec.three_parameter(v0=-1.5, v1=2.5, vr=0.8, scale=1.3)


@pytest.fixture(name='landmark_spec')
def _landmark_spec() -> PotentialSpec:
    # gamma = (V0 + V1) / (2 V1) = 0.3
    return PotentialSpec.three_parameter(v0=-2.0, v1=5.0, vr=0.0, scale=0.9)


def _catalog_spec(name: PotentialName) -> PotentialSpec:
    entry = CATALOG[name]
    parameters = {key: 0.5 + 0.25 * index for index, key in enumerate(entry.parameter_names)}
    return PotentialSpec(name, parameters)


class TestPotentialSpec:
    def test_should_reject_negative_centrifugal_strength(self):
        with pytest.raises(ParameterDomainError):
            PotentialSpec.three_parameter(1.0, 1.0, -0.1, 1.0)

    def test_should_reject_missing_parameter(self):
        with pytest.raises(ParameterDomainError):
            PotentialSpec(PotentialName.MORSE, {'V0': 1.0, 'V1': 1.0, 'alpha': 1.0})

    def test_should_reject_nonpositive_range(self):
        with pytest.raises(ParameterDomainError):
            PotentialSpec.three_parameter(1.0, 1.0, 0.0, 0.0)

    def test_should_convert_dimensionless_strengths(self):
        spec = PotentialSpec.three_parameter_dimensionless(-6.0, 10.0, 2.5, scale=2.0)
        assert spec.get('V0') == pytest.approx(-12.0)
        assert tuple(dimensionless_strengths(spec)) == pytest.approx((-6.0, 10.0, 2.5))


class TestPotentialEval:
    def test_should_equal_minus_twice_reduced_form_without_centrifugal_term(self):
        v0, v1, scale = -1.2, 3.1, 0.7
        spec = PotentialSpec.three_parameter(v0, v1, 0.0, scale)
        gamma = (v0 + v1) / (2 * v1)
        for x in np.random.default_rng(5).uniform(0.01, 20, size=50):
            reduced = v1 * (math.exp(-scale * x) - gamma) / (math.exp(scale * x) - 1)
            expected = -2 * reduced
            assert potential_eval(spec, x) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_should_equal_bracketed_form(self, three_parameter_spec: PotentialSpec):
        v0, v1, vr, scale = -1.5, 2.5, 0.8, 1.3
        for x in [0.05, 0.5, 2.0, 7.5]:
            expected = (
                v0 + v1 * (1 - 2 * math.exp(-scale * x)) + vr / (1 - math.exp(-scale * x))
            ) / (math.exp(scale * x) - 1)
            assert potential_eval(three_parameter_spec, x) == pytest.approx(expected, rel=1e-12)

    def test_should_cross_zero_at_landmark(self, landmark_spec: PotentialSpec):
        landmarks = three_parameter_landmarks(landmark_spec)
        assert landmarks.gamma == pytest.approx(0.3)
        assert landmarks.zero_crossing == pytest.approx(-math.log(0.3) / 0.9)
        assert potential_eval(landmark_spec, landmarks.zero_crossing) == pytest.approx(
            0, abs=1e-14
        )

    def test_should_reach_extremum_at_landmark(self, landmark_spec: PotentialSpec):
        landmarks = three_parameter_landmarks(landmark_spec)
        step = 1e-6
        slope = (
            potential_eval(landmark_spec, landmarks.extremum + step)
            - potential_eval(landmark_spec, landmarks.extremum - step)
        ) / (2 * step)
        assert abs(slope) < 1e-6
        assert potential_eval(landmark_spec, landmarks.extremum) == pytest.approx(
            landmarks.extremum_value
        )

    def test_should_report_minus_twice_reduced_extremum_value(self, landmark_spec: PotentialSpec):
        landmarks = three_parameter_landmarks(landmark_spec)
        reduced_extremum = -5.0 * (1 - math.sqrt(0.7)) ** 2
        assert landmarks.extremum_value == pytest.approx(-2 * reduced_extremum)
        assert landmarks.extremum_value == pytest.approx(0.2668, abs=1e-4)

    def test_should_reject_landmarks_with_centrifugal_term(
        self, three_parameter_spec: PotentialSpec
    ):
        with pytest.raises(ParameterDomainError):
            three_parameter_landmarks(three_parameter_spec)

    def test_should_decay_at_long_range(self, three_parameter_spec: PotentialSpec):
        x = 20 / 1.3
        value = potential_eval(three_parameter_spec, x)
        assert abs(value) * math.exp(1.3 * x / 2) < 1e-3 * 2.5

    def test_should_reject_origin(self, three_parameter_spec: PotentialSpec):
        with pytest.raises(ParameterDomainError):
            potential_eval(three_parameter_spec, 0.0)

    def test_should_add_centrifugal_term(self):
        spec = PotentialSpec.coulomb(1.0)
        assert effective_potential(spec, 2.0, angular_momentum=1) == pytest.approx(-0.5 + 0.25)

    @pytest.mark.parametrize('name', list(PotentialName), ids=lambda name: name.value)
    def test_should_be_finite_inside_domain(self, name: PotentialName):
        spec = _catalog_spec(name)
        low, high = spec.domain
        low, high = max(low, -10.0), min(high, 10.0)
        margin = 1e-3 * (high - low)
        for x in np.linspace(low + margin, high - margin, 100):
            assert math.isfinite(potential_eval(spec, float(x)))


class TestTransformedPotential:
    def test_should_match_pull_back_for_shifted_exponential(
        self, three_parameter_spec: PotentialSpec
    ):
        coordinate_map = CoordinateMap(MapName.SHIFTED_EXP, 1.3)
        for y in np.random.default_rng(6).uniform(-0.999, 0.999, size=50):
            x = -math.log1p(-(1 + y) / 2) / 1.3
            assert transformed_potential(three_parameter_spec, coordinate_map, y) == (
                pytest.approx(potential_eval(three_parameter_spec, x), rel=1e-12)
            )

    def test_should_be_linear_for_oscillator(self):
        omega, scale = 1.1, 0.8
        coordinate_map = CoordinateMap(MapName.QUADRATIC, scale)
        spec = PotentialSpec.oscillator(omega)
        for y in [0.1, 1.0, 4.0]:
            assert transformed_potential(spec, coordinate_map, y) == pytest.approx(
                omega ** 4 / (2 * scale ** 2) * y
            )

    def test_should_pull_back_through_general_map(self):
        spec = _catalog_spec(PotentialName.ROSEN_MORSE_II)
        coordinate_map = CoordinateMap(MapName.TANH, 0.6)
        for x in [-2.0, 0.3, 1.7]:
            y = map_eval(coordinate_map, x).y
            assert transformed_potential(spec, coordinate_map, y) == pytest.approx(
                potential_eval(spec, x)
            )

    def test_should_reject_singular_point(self, three_parameter_spec: PotentialSpec):
        with pytest.raises(ParameterDomainError):
            transformed_potential(
                three_parameter_spec, CoordinateMap(MapName.SHIFTED_EXP, 1.3), -1.0
            )


class TestPotentialGrid:
    def test_should_return_endpoints_for_two_points(self, three_parameter_spec: PotentialSpec):
        grid = potential_grid(three_parameter_spec, 0.5, 3.0, 2)
        assert [point.x for point in grid] == [0.5, 3.0]

    def test_should_be_strictly_increasing(self, three_parameter_spec: PotentialSpec):
        grid = potential_grid(three_parameter_spec, 0.1, 10.0, 200)
        assert np.all(np.diff([point.x for point in grid]) > 0)

    def test_should_emit_family_of_curves(self):
        for ur in range(1, 12, 2):
            spec = PotentialSpec.three_parameter_dimensionless(-2.0, -5.0, float(ur), scale=1.0)
            grid = potential_grid(spec, 0.05, 8.0, 50)
            assert len(grid) == 50

    def test_should_reject_grid_outside_domain(self, three_parameter_spec: PotentialSpec):
        with pytest.raises(ParameterDomainError):
            potential_grid(three_parameter_spec, -1.0, 1.0, 10)

    def test_should_reject_single_point(self, three_parameter_spec: PotentialSpec):
        with pytest.raises(ParameterDomainError):
            potential_grid(three_parameter_spec, 0.5, 1.0, 1)

    def test_should_convert_to_frame(self, three_parameter_spec: PotentialSpec):
        frame = potential_grid_frame(potential_grid(three_parameter_spec, 0.5, 1.0, 3))
        assert list(frame.columns) == ['x', 'V']
        assert len(frame) == 3
