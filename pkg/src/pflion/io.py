"""CSV reading and writing shared by the command-line jobs.

Every written file starts with a comment line carrying the tool version and
the SHA-256 of the job configuration, then a header row. Numbers are written
with ``%.12g``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .fitting import DataSeries

__all__ = ["CsvTable", "config_hash", "format_value", "render_csv", "write_tables", "read_series"]


def config_hash(text: bytes | str) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.12g" % float(v)


@dataclass
class CsvTable:
    name: str
    header: Sequence[str]
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.header):
            raise ValueError(f"{self.name}: row has {len(values)} fields, header {len(self.header)}")
        self.rows.append(values)

    @classmethod
    def from_columns(cls, name: str, header: Sequence[str], columns: Iterable) -> "CsvTable":
        t = cls(name, header)
        for row in zip(*columns):
            t.add(*row)
        return t


def render_csv(table: CsvTable, digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# pflion {__version__} config_sha256={digest}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_tables(out_dir: Path, tables: Sequence[CsvTable], digest: str) -> list[Path]:
    """Render everything first, then move each file into place atomically."""
    rendered = [(t.name, render_csv(t, digest)) for t in tables]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in rendered:
        path = out_dir / name
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        paths.append(path)
    return paths


def read_series(path) -> DataSeries:
    """Two- or three-column CSV (x, y[, sigma]) with one header line; '#' lines are skipped."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 2:
        raise ValueError(f"{path}: expected a header and at least one data row")
    rows = list(csv.reader(lines[1:]))
    ncol = len(rows[0])
    if ncol not in (2, 3) or any(len(r) != ncol for r in rows):
        raise ValueError(f"{path}: every row must have 2 or 3 columns")
    try:
        a = np.array(rows, dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{path}: non-finite entry")
    return DataSeries(a[:, 0], a[:, 1], a[:, 2] if ncol == 3 else None)
