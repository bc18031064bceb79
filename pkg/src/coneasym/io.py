"""Matrix/vector files and deterministic JSON reports.

CSV: one row per line, comma-separated decimals.  JSON:
``{"dim": d, "data": [...]}`` with ``data`` row-major (flat or nested);
an optional ``"metzler": true`` marks a generator.
"""
import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["read_array", "write_array", "dumps_report", "format_float"]


def read_array(path):
    """Load a matrix or vector; returns ``(array, meta)``.

    Raises ``ValueError`` on malformed content and ``OSError`` if unreadable.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return _parse_json(text)
    return _parse_csv(text), {}


def _parse_csv(text):
    rows = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), 1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric entry in {row!r}") from None
    if not rows:
        raise ValueError("empty input")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValueError(f"ragged rows: lengths {sorted(width)}")
    arr = np.array(rows)
    if arr.shape[0] == 1:
        return arr[0]
    return arr


def _parse_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "data" not in obj:
        raise ValueError('JSON input must be an object with a "data" field')
    data = np.array(obj["data"], dtype=float)
    meta = {k: v for k, v in obj.items() if k not in ("data",)}
    dim = obj.get("dim")
    if dim is not None:
        dim = int(dim)
        if data.ndim == 1 and data.size == dim * dim and dim > 1:
            data = data.reshape(dim, dim)
        elif data.ndim == 1 and data.size != dim:
            raise ValueError(f"data has {data.size} entries, dim is {dim}")
        elif data.ndim == 2 and data.shape[0] != dim:
            raise ValueError(f"data has {data.shape[0]} rows, dim is {dim}")
    return data, meta


def write_array(path, arr, **meta):
    path = Path(path)
    arr = np.asarray(arr, dtype=float)
    if path.suffix.lower() == ".json":
        obj = {"dim": int(arr.shape[0]), **meta, "data": arr.ravel().tolist()}
        path.write_text(dumps_report(obj))
        return
    rows = arr[None, :] if arr.ndim == 1 else arr
    lines = [",".join(format_float(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def format_float(x):
    return format(float(x), ".17g")


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return format_float(obj)
    return json.dumps(str(obj))


def dumps_report(obj, indent=2):
    """JSON text with insertion-ordered keys and floats at 17 significant digits."""
    return _emit(obj, indent, 0) + "\n"
