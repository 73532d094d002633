"""
Writes analysis results as CSV tables or JSON documents
"""
import json
import logging
import math
import os
import sys
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from src.config.settings import Settings

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')


def _plain(value):
    """numpy scalars and NaN to JSON-friendly values"""
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return value


class ReportWriter:
    def __init__(self, fmt: str = 'csv', output: Optional[str] = None,
                 output_dir: Optional[str] = Settings.OUTPUT_DIR, stream: TextIO = None):
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
        self.fmt = fmt
        self.output = output
        self.output_dir = output_dir
        self.stream = stream or sys.stdout

    def destination(self, name: str, ext: str) -> Optional[str]:
        """File path for an output name, or None for stdout"""
        if self.output:
            return self.output
        if self.output_dir:
            os.makedirs(self.output_dir, exist_ok=True)
            return os.path.join(self.output_dir, f"{name}.{ext}")
        return None

    def _emit(self, text: str, name: str, ext: str) -> Optional[str]:
        path = self.destination(name, ext)
        if path is None:
            self.stream.write(text)
            if not text.endswith('\n'):
                self.stream.write('\n')
            return None
        with open(path, 'w', newline='') as fh:
            fh.write(text)
        logger.info("wrote %s", path)
        return path

    def write_table(self, name: str, rows: List[Dict], columns: Sequence[str],
                    sort_by: Optional[Sequence[str]] = None) -> Optional[str]:
        """Rows as CSV with the given column order, or as a JSON array"""
        frame = pd.DataFrame([{c: row.get(c) for c in columns} for row in rows], columns=list(columns))
        if sort_by:
            frame = frame.sort_values(list(sort_by), kind='stable').reset_index(drop=True)
        if self.fmt == 'csv':
            return self._emit(frame.to_csv(index=False, float_format='%.15g'), name, 'csv')
        records = [_plain(r) for r in frame.to_dict(orient='records')]
        return self._emit(json.dumps(records, indent=2), name, 'json')

    def write_frame(self, name: str, frame: pd.DataFrame) -> Optional[str]:
        """Write a DataFrame as CSV or as a list of JSON records"""
        if self.fmt == 'csv':
            return self._emit(frame.to_csv(index=False, float_format='%.15g'), name, 'csv')
        return self._emit(frame.to_json(orient='records', double_precision=15), name, 'json')

    def write_summary(self, name: str, summary: Dict) -> Optional[str]:
        """Summaries are always JSON"""
        return self._emit(json.dumps(_plain(summary), indent=2, sort_keys=True), name, 'json')
