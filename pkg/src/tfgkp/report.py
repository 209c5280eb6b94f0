"""Result tables and their CSV serialization."""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(tuple(row))

    def non_finite(self) -> list[tuple[int, str]]:
        bad = []
        for i, row in enumerate(self.rows):
            for name, v in zip(self.columns, row):
                if isinstance(v, float) and not math.isfinite(v):
                    bad.append((i, name))
        return bad


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def render(table: ResultTable) -> str:
    out = io.StringIO()
    for key, value in table.metadata.items():
        out.write(f"# {key}: {format_cell(value)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    writer.writerows([format_cell(v) for v in row] for row in table.rows)
    return out.getvalue()


def emit_report(table: ResultTable, path: str | Path | None) -> None:
    """Write the CSV to ``path``, or to stdout when ``path`` is None or ``-``."""
    text = render(table)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e.strerror or e}") from e
