"""CSV reading and writing.

Every file written here starts with ``#`` comment lines recording the tool
version, a hash of the content-determining configuration and any metric
conventions. Floats are written with ``repr`` so values round-trip exactly
and reruns produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .exceptions import DimensionError


def config_hash(config: Mapping) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def header_lines(config: Mapping, conventions: Mapping | None = None) -> list[str]:
    lines = [f"mofda {__version__}", f"config_hash={config_hash(config)}"]
    for key, value in (conventions or {}).items():
        lines.append(f"{key}={value}")
    return lines


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, comments=()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(header, rows, comments), encoding="utf-8")
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and data rows of a CSV file, skipping ``#`` comment lines."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError(f"{path}: no header row")
    return rows[0], rows[1:]


def archive_rows(archive):
    m = len(archive.weights[0])
    d = len(archive.results[0].best_point)
    header = (
        ["task_id"]
        + [f"w_{i + 1}" for i in range(m)]
        + [f"x_{i + 1}" for i in range(d)]
        + [f"f_{i + 1}" for i in range(m)]
        + ["scalar_value", "dominated"]
    )
    rows = [
        [r.task_id, *w.components, *r.best_point, *r.objectives, r.scalar_value, flag]
        for w, r, flag in zip(archive.weights, archive.results, archive.dominated_flags)
    ]
    return header, rows


def read_objectives(path, nondominated_only: bool = False) -> np.ndarray:
    """Objective columns ``f_1 .. f_m`` of an archive or plain front CSV."""
    header, rows = read_csv(path)
    cols = [i for i, name in enumerate(header) if name.startswith("f_")]
    if not cols:
        raise DimensionError(f"{path}: no f_<i> objective columns")
    if nondominated_only and "dominated" in header:
        k = header.index("dominated")
        rows = [r for r in rows if r[k].strip() not in ("1", "True", "true")]
    return np.array([[float(r[i]) for i in cols] for r in rows], dtype=float)


def read_matrix(path) -> tuple[list[str], list[str], np.ndarray]:
    """Row names, column names and values of a labelled numeric matrix."""
    header, rows = read_csv(path)
    row_names = [r[0] for r in rows]
    values = np.array(
        [[float(v) if v.strip() else np.nan for v in r[1:]] + [np.nan] * (len(header) - len(r)) for r in rows],
        dtype=float,
    )
    return row_names, header[1:], values
