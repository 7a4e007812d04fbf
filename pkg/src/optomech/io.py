"""Deterministic CSV and JSON writers."""
from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

from .scattering import CHANNELS, Spectrum

SPECTRUM_HEADER = ("omega",) + CHANNELS
LONG_HEADER = ("param1", "param2", "value")


def fmt(x) -> str:
    """17 significant digits, which round-trips any binary64 value."""
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def spectrum_csv(spec: Spectrum) -> str:
    return _csv(SPECTRUM_HEADER, spec.rows())


def long_csv(p1, p2, values) -> str:
    """Long-format heatmap table with ``param1`` varying slowest."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    values = np.asarray(values, dtype=float).reshape(p1.size, p2.size)
    rows = ((a, b, values[i, j]) for i, a in enumerate(p1) for j, b in enumerate(p2))
    return _csv(LONG_HEADER, rows)


def table_csv(header, rows) -> str:
    return _csv(tuple(header), rows)


def jsonable(obj):
    """Recursively convert numpy scalars/arrays; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if hasattr(obj, "as_dict"):
        return jsonable(obj.as_dict())
    if hasattr(obj, "value"):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path, text: str):
    """Single write after the computation is complete."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path
