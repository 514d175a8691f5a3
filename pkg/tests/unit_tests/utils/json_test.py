import json
import math
from pathlib import Path
from typing import NamedTuple

import numpy as np

from tra_solver.solver import SolverMode
from tra_solver.utils.json import (
    get_json_compatible_value,
    get_recursively_filtered_dict_without_null_values,
    write_json
)


class _Point(NamedTuple):
    x: float
    label: str


class TestGetRecursivelyFilteredDictWithoutNullValues:
    def test_should_remove_none_values_from_nested_dicts(self):
        record = {'a': 1, 'b': None, 'c': {'d': None, 'e': [1, None]}}
        assert get_recursively_filtered_dict_without_null_values(record) == {
            'a': 1, 'c': {'e': [1]}
        }


class TestGetJsonCompatibleValue:
    def test_should_convert_numpy_values(self):
        value = {'values': np.array([1.5, 2.0]), 'flag': np.bool_(True), 'n': np.int64(3)}
        assert get_json_compatible_value(value) == {
            'values': [1.5, 2.0], 'flag': True, 'n': 3
        }

    def test_should_convert_enums_and_named_tuples(self):
        value = [SolverMode.FIXED_BASIS, _Point(1.0, 'a')]
        assert get_json_compatible_value(value) == ['fixed-basis', {'x': 1.0, 'label': 'a'}]

    def test_should_stringify_non_finite_floats(self):
        assert get_json_compatible_value([math.nan, np.inf]) == ['nan', 'inf']

    def test_should_stringify_keys(self):
        assert get_json_compatible_value({10: [1.0]}) == {'10': [1.0]}


class TestWriteJson:
    def test_should_write_sorted_json(self, tmp_path: Path):
        path = tmp_path / 'nested' / 'result.json'
        write_json(path, {'b': np.float64(1.25), 'a': [1, 2]})
        text = path.read_text(encoding='utf-8')
        assert json.loads(text) == {'a': [1, 2], 'b': 1.25}
        assert text.index('"a"') < text.index('"b"')

    def test_should_write_identical_bytes_for_identical_data(self, tmp_path: Path):
        data = {'values': np.linspace(0, 1, 7)}
        write_json(tmp_path / 'first.json', data)
        write_json(tmp_path / 'second.json', data)
        assert (tmp_path / 'first.json').read_bytes() == (tmp_path / 'second.json').read_bytes()
