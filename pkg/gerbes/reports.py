"""
Check reports and deterministic report rendering.

A check never raises on a mathematical failure; it returns a ``CheckReport``.
Reports render to JSON with sorted keys so that identical inputs produce
byte-identical output.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import CircleValue

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    """Outcome of one mathematical check"""
    name: str
    passed: bool
    residual: object = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {'name': self.name, 'passed': self.passed, 'residual': plain(self.residual),
                'details': plain(self.details)}


def plain(value):
    """Convert report payloads to JSON-compatible values"""
    if isinstance(value, CircleValue):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return [round(value.real, 12), round(value.imag, 12)]
    if isinstance(value, (np.floating, float)):
        return float(f'{float(value):.12g}')
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if hasattr(value, 'as_dict'):
        return plain(value.as_dict())
    return value


def render_json(payload):
    return json.dumps(plain(payload), indent=2, sort_keys=True)


def render_csv(rows, columns):
    """Rows of dicts as CSV with a fixed column order"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: plain(row.get(k)) for k in columns})
    return buffer.getvalue()


def summarize(reports):
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning('%d of %d checks failed: %s', len(failed), len(reports), ', '.join(failed))
    else:
        logger.info('%d checks passed', len(reports))
    return {'total': len(reports), 'failed': failed, 'passed': not failed}
