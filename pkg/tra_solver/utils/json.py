import enum
import json
import math
from pathlib import Path
from typing import Any, Callable, Union

import numpy as np


def get_recursively_filtered_dict_items_where_value(
    record: Any,
    condition: Callable[[Any], bool]
) -> Any:
    if isinstance(record, dict):
        return {
            key: get_recursively_filtered_dict_items_where_value(value, condition=condition)
            for key, value in record.items()
            if condition(value)
        }
    if isinstance(record, list):
        return [
            get_recursively_filtered_dict_items_where_value(value, condition=condition)
            for value in record
            if condition(value)
        ]
    return record


def get_recursively_filtered_dict_without_null_values(record: Any) -> Any:
    return get_recursively_filtered_dict_items_where_value(
        record,
        lambda value: value is not None
    )


def get_json_compatible_value(value: Any) -> Any:
    """
    Converts numpy values, enums, tuples and named tuples to plain JSON types.

    Non-finite floats become strings so that the output stays strict JSON.
    """
    if isinstance(value, enum.Enum):
        return value.value
    if hasattr(value, '_asdict'):
        return get_json_compatible_value(value._asdict())
    if isinstance(value, dict):
        return {str(key): get_json_compatible_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [get_json_compatible_value(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else str(float(value))
    return value


def write_json(path: Union[str, Path], data: Any) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as json_fp:
        json.dump(get_json_compatible_value(data), json_fp, indent=2, sort_keys=True)
        json_fp.write('\n')
