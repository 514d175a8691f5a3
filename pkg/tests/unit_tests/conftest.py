import logging
from typing import Iterable
from unittest.mock import patch

import pytest

from tra_solver.potentials import PotentialSpec
from tra_solver.solver import SolveConfig


@pytest.fixture(scope='session', autouse=True)
def setup_logging():
    logging.basicConfig(level='INFO')
    for name in ['tests', 'tra_solver']:
        logging.getLogger(name).setLevel('DEBUG')


@pytest.fixture()
def env_mock() -> Iterable[dict]:
    env_dict: dict = {}
    with patch('os.environ', env_dict):
        yield env_dict


@pytest.fixture(name='oscillator_config')
def _oscillator_config() -> SolveConfig:
    return SolveConfig(potential=PotentialSpec.oscillator(1.0), basis_size=30, sweep_sizes=())


@pytest.fixture(name='reference_config')
def _reference_config() -> SolveConfig:
    return SolveConfig(
        potential=PotentialSpec.three_parameter_dimensionless(-6.0, 10.0, 2.5, 1.0),
        sweep_sizes=()
    )
