# coding=utf-8

"""
Machine-readable result files.

CSV: UTF-8, ``,`` delimiter, one header row, an optional labelled footer
record. JSON: ``{"meta": ..., "columns": [...], "data": [...], "footer": ...}``
with one object per row.
"""

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidInput

FORMATS = ('csv', 'json')


@dataclass
class ResultTable:
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    footer: Optional[Tuple[str, List[Any]]] = None
    summary: str = ""
    failed: bool = False


def _plain(value: Any) -> Any:
    """Python scalars for numpy values; non-finite floats become ``None``."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(table: ResultTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter=',', lineterminator='\n')
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    if table.footer is not None:
        label, values = table.footer
        writer.writerow([label] + [format_cell(v) for v in values])
    return buffer.getvalue()


def render_json(table: ResultTable, meta: Dict[str, Any]) -> str:
    document: Dict[str, Any] = {
        "meta": meta,
        "columns": table.columns,
        "data": [{column: _plain(v) for column, v in zip(table.columns, row)} for row in table.rows],
    }
    if table.footer is not None:
        label, values = table.footer
        document["footer"] = {label: [_plain(v) for v in values]}
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def emit(table: ResultTable, fmt: str, path: Optional[str] = None, meta: Optional[Dict[str, Any]] = None):
    """
    Write ``table`` as ``fmt`` to ``path``, or to standard output when
    ``path`` is empty or ``-``.

    Raises:
        InvalidInput: unknown format.
        OSError: the file cannot be written.
    """
    if fmt not in FORMATS:
        raise InvalidInput("unknown output format %r, expected one of %s" % (fmt, FORMATS))
    text = render_csv(table) if fmt == 'csv' else render_json(table, meta or dict())
    if path in (None, '', '-'):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with Path(path).open('w', encoding='utf-8', newline='') as f:
        f.write(text)


def writes_to_stdout(path: Optional[str]) -> bool:
    return path in (None, '', '-')


def columns_for_bands(Q: int) -> List[str]:
    return ["theta"] + ["phase_%d" % j for j in range(1, Q + 1)]

