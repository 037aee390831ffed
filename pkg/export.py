"""
File output for figure data: CSV through pandas with fixed float formatting,
JSON through json.dumps. Column headers carry the symbol and its units.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, Sequence

import numpy as np
import pandas as pd

from state_model import Quadrature

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'

UNITS = {
    'q': 'sqrt(hbar)',
    'p': 'sqrt(hbar)',
    're': 'hbar^(-1/4)',
    'im': 'hbar^(-1/4)',
    'abs2': 'hbar^(-1/2)',
    'x': '1',
    'probability': '1',
    'j': '1',
    'j_required': '1',
    'db': 'dB',
    'r': '1',
    'p_exact': '1',
    'p_closed': '1',
    'p_asymptotic': '1',
    'p_iterated': '1',
    'p_success': '1',
}


def header(column: str) -> str:
    return f"{column} [{UNITS[column]}]" if column in UNITS else column


def axis_name(quadrature: Quadrature) -> str:
    return 'q' if Quadrature(quadrature) is Quadrature.POSITION else 'p'


def samples_frame(points: np.ndarray, values: np.ndarray, quadrature: Quadrature) -> pd.DataFrame:
    """Grid samples of a wavefunction: u, re, im, |psi|^2."""
    axis = axis_name(quadrature)
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({
        axis: np.asarray(points, dtype=float),
        're': values.real,
        'im': values.imag,
        'abs2': np.abs(values) ** 2,
    })


def rows_frame(rows: Iterable[Dict[str, object]], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame([{c: row[c] for c in columns} for row in rows], columns=list(columns))


def write_frame(frame: pd.DataFrame, path: Path, fmt: str = 'csv') -> Path:
    """Write a table as CSV (units in headers) or as a JSON list of records; returns the written path."""
    path = Path(path)
    if path.suffix != '.' + fmt:
        path = path.with_name(path.name + '.' + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'csv':
        frame.rename(columns=header).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    else:
        records = [{k: _plain(v) for k, v in record.items()} for record in frame.to_dict(orient='records')]
        path.write_text(json.dumps({'units': {c: UNITS.get(c) for c in frame.columns}, 'rows': records},
                                   indent=2) + '\n')
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_json(data: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, default=_plain) + '\n')
    logger.info(f"Wrote {path}")
    return path


def _plain(value):
    """numpy scalars and arrays to plain Python for json."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def outcome_label(two_x: int) -> str:
    """File-name friendly outcome label: x+4, x-9_2, x0."""
    sign = '+' if two_x > 0 else '-' if two_x < 0 else ''
    magnitude = abs(two_x)
    text = str(magnitude // 2) if magnitude % 2 == 0 else f"{magnitude}_2"
    return f"x{sign}{text}"
