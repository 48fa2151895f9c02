"""Delimited and JSON table writers with locale-independent, round-trip number formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def write_table(path, columns: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv") -> Path:
    """Write ``rows`` under ``columns``; ``.csv`` or ``.json`` is appended to ``path``."""
    path = Path(path)
    if path.suffix != "." + fmt:
        path = path.with_name(path.name + "." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([fmt_number(v) for v in row])
    elif fmt == "json":
        records = [{c: _jsonable(v) for c, v in zip(columns, row)} for row in rows]
        path.write_text(json.dumps(records, indent=1) + "\n", encoding="ascii")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
