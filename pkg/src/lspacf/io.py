"""
File plumbing: CSV ingestion, atomic writes, JSON config sidecars and
minimal standalone SVG line plots.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .simulate import TimeSeries


def ingest_csv(path, column: str | int | None = None) -> TimeSeries:
    """Read one numeric column from a CSV file.

    A non-numeric first row is treated as a header. Files with several
    columns need ``column`` (a header name or a 0-based index). Blank,
    unparseable or non-finite cells raise with the 1-based line number.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidArgumentError(f"{path}: no such file")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidArgumentError(f"{path}: file is empty")

    header = None
    first = [cell.strip() for cell in rows[0]]
    if first and not all(_is_number(cell) for cell in first):
        header = first
    width = len(header) if header is not None else len(first)
    idx = _column_index(column, header, width, path)

    values = []
    start = 1 if header is not None else 0
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not cell.strip() for cell in row):
            raise InvalidArgumentError(f"{path}:{lineno}: blank line")
        if idx >= len(row):
            raise InvalidArgumentError(f"{path}:{lineno}: missing column {idx}")
        cell = row[idx].strip()
        try:
            val = float(cell)
        except ValueError:
            raise InvalidArgumentError(f"{path}:{lineno}: cannot parse {cell!r}") from None
        if not math.isfinite(val):
            raise InvalidArgumentError(f"{path}:{lineno}: non-finite value {cell!r}")
        values.append(val)
    if not values:
        raise InvalidArgumentError(f"{path}: no data rows")
    return TimeSeries(np.array(values), meta={"source": str(path)})


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _column_index(column, header, width, path) -> int:
    if column is None:
        if width != 1:
            raise InvalidArgumentError(f"{path}: {width} columns found, pick one with --column")
        return 0
    if isinstance(column, str) and not column.isdigit():
        if header is None or column not in header:
            raise InvalidArgumentError(f"{path}: no column named {column!r}")
        return header.index(column)
    idx = int(column)
    if not 0 <= idx < width:
        raise InvalidArgumentError(f"{path}: column index {idx} out of range")
    return idx


def atomic_write_text(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip representation
    return str(v)


def write_series(path, x) -> Path:
    vals = np.asarray(getattr(x, "values", x), dtype=float)
    return atomic_write_text(path, format_csv(["x"], ([v] for v in vals)))


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialise {type(o).__name__}")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".config.json")


def write_sidecar(path, config: dict) -> Path:
    """Store the resolved run configuration next to an output file."""
    return write_json(sidecar_path(path), config)


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def svg_lines(
    series: dict[str, tuple[np.ndarray, np.ndarray]],
    title: str = "",
    hlines: Sequence[float] = (),
    width: int = 640,
    height: int = 400,
) -> str:
    """A standalone SVG with one polyline per named (x, y) pair."""
    if not series:
        raise InvalidArgumentError("nothing to plot")
    xs = np.concatenate([np.asarray(v[0], float) for v in series.values()])
    ys = np.concatenate([np.asarray(v[1], float) for v in series.values()] + [np.asarray(hlines, float)])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 40

    def px(x):
        return pad + (np.asarray(x, float) - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y):
        return height - pad - (np.asarray(y, float) - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{_escape(title)}</text>',
        f'<text x="{pad}" y="{height - 10}" font-size="10">{x0:.3g}</text>',
        f'<text x="{width - pad}" y="{height - 10}" font-size="10" text-anchor="end">{x1:.3g}</text>',
        f'<text x="4" y="{height - pad}" font-size="10">{y0:.3g}</text>',
        f'<text x="4" y="{pad}" font-size="10">{y1:.3g}</text>',
    ]
    for h in hlines:
        y = float(py(h))
        out.append(
            f'<line x1="{pad}" x2="{width - pad}" y1="{y:.2f}" y2="{y:.2f}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for k, (name, (x, y)) in enumerate(series.items()):
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(x), py(y)))
        colour = PALETTE[k % len(PALETTE)]
        out.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}">'
            f"<title>{_escape(name)}</title></polyline>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
