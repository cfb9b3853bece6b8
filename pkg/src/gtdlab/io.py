"""CSV/JSON writers and readers for tables, density grids and moment files.

CSV: '#' metadata lines, then a header row, comma-separated values in
scientific notation with 17 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterable, TextIO

import numpy as np

from .densities import Density, from_grid
from .errors import ParameterError


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v) + 0.0  # drops the sign of -0.0
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.16e}"
    if isinstance(v, (list, tuple)):
        return " ".join(fmt(x) for x in v)
    return "" if v is None else str(v)


def write_csv(stream: TextIO, columns: list, rows: Iterable, meta: dict | None = None):
    for k, v in (meta or {}).items():
        stream.write(f"# {k}: {fmt(v)}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def csv_string(columns, rows, meta=None) -> str:
    buf = io.StringIO()
    write_csv(buf, columns, rows, meta)
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Density):
        return o.label
    return str(o)


def _finite_json(o):
    # JSON has no infinities; encode them as strings
    if isinstance(o, float) and not np.isfinite(o):
        return fmt(o)
    if isinstance(o, dict):
        return {k: _finite_json(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite_json(v) for v in o]
    return o


def json_string(obj) -> str:
    text = json.dumps(obj, default=_json_default, sort_keys=True)
    return json.dumps(_finite_json(json.loads(text)), indent=2, sort_keys=True) + "\n"


def read_table(path: str):
    """(meta, columns, array) from a CSV written by :func:`write_csv` (header optional)."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                k, _, v = s[1:].partition(":")
                meta[k.strip()] = v.strip()
            else:
                lines.append(s)
    if not lines:
        raise ParameterError(f"{path}: no data rows")
    columns = None
    try:
        float(lines[0].split(",")[0])
    except ValueError:
        columns = [c.strip() for c in lines[0].split(",")]
        lines = lines[1:]
    try:
        data = np.array([[float(c) for c in s.split(",")] for s in lines])
    except ValueError as exc:
        raise ParameterError(f"{path}: non-numeric data ({exc})") from exc
    return meta, columns, data


def read_density_csv(path: str) -> Density:
    """Grid density from a CSV with columns x, pdf (extra columns ignored)."""
    _, columns, data = read_table(path)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ParameterError(f"{path}: need at least two columns (x, pdf)")
    ix, ip = 0, 1
    if columns is not None and "x" in columns and "pdf" in columns:
        ix, ip = columns.index("x"), columns.index("pdf")
    return from_grid(data[:, ix], data[:, ip], label=os.path.basename(path))


def read_moments(path: str):
    from .momentlab import MomentSequence
    with open(path, encoding="utf-8") as fh:
        return MomentSequence.from_json(fh.read())
