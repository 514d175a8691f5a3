from pathlib import Path
from typing import Mapping, Union

import pandas as pd


CSV_FLOAT_FORMAT = '%.15g'


def write_frame_csv(
    frame: pd.DataFrame,
    path: Union[str, Path],
    metadata: Mapping[str, str]
) -> None:
    """
    Writes `frame` preceded by one `# key: value` line per metadata item.
    """
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as csv_fp:
        for key, value in metadata.items():
            csv_fp.write(f'# {key}: {value}\n')
        frame.to_csv(csv_fp, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def read_frame_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, comment='#')
