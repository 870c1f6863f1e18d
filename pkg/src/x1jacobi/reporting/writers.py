"""
Deterministic table and JSON writers.

Floats are written with 17 significant digits and rows in the order given, so two runs
on the same configuration produce byte-identical files.
"""

import csv
import math
import threading
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import orjson

from ..core.exceptions import OutputError
from ..utils.logging import get_logger

logger = get_logger(__name__)

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY

_write_lock = threading.Lock()


def format_value(value: Any) -> str:
    """Cell text: '%.17g' for floats, 'nan' for NaN, str for everything else."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return "%.17g" % float(value)
    if isinstance(value, Fraction):
        return "%.17g" % float(value)
    return str(value)


def _json_default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _jsonable(value: Any) -> Any:
    """NaN and infinities become None; orjson would write them as null anyway."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    return value


def ensure_output_dir(output_dir: Path) -> Path:
    """Create output_dir (and parents); OutputError when it cannot be created or written."""
    path = Path(output_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        marker = path / ".write-check"
        marker.write_bytes(b"")
        marker.unlink()
    except OSError as exc:
        raise OutputError(f"Output directory {path} is not writable: {exc}", path=str(path)) from exc
    return path


def dumps_json(payload: Any) -> bytes:
    return orjson.dumps(_jsonable(payload), default=_json_default, option=JSON_OPTIONS) + b"\n"


def write_json(path: Path, payload: Any) -> Path:
    """Sorted-key, 2-space indented JSON."""
    data = dumps_json(payload)
    try:
        with _write_lock:
            Path(path).write_bytes(data)
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc}", path=str(path)) from exc
    logger.debug(f"Wrote {path}")
    return Path(path)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Header plus one line per row, cells formatted by format_value, '\\n' line endings."""
    try:
        with _write_lock, Path(path).open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                if len(row) != len(columns):
                    raise OutputError(
                        f"Row of length {len(row)} does not match {len(columns)} columns in {path}",
                        path=str(path),
                    )
                writer.writerow([format_value(cell) for cell in row])
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc}", path=str(path)) from exc
    logger.debug(f"Wrote {path}")
    return Path(path)


def table_records(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> List[Dict[str, Any]]:
    return [dict(zip(columns, row)) for row in rows]


def write_table(
    output_dir: Path, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str = "csv"
) -> Path:
    """Write rows as name.csv or as name.json (a list of column-keyed records)."""
    if fmt == "csv":
        return write_csv(Path(output_dir) / f"{name}.csv", columns, rows)
    return write_json(Path(output_dir) / f"{name}.json", table_records(columns, rows))
