"""Tabular reports rendered as CSV, JSON or Markdown.

Numbers are stored at full precision. CSV and Markdown round each column to
its configured number of decimals; JSON keeps the raw values.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

FORMATS = ("csv", "json", "markdown")


@dataclass
class Report:
    title: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    footnotes: list[str] = field(default_factory=list)
    decimals: Mapping[str, int] = field(default_factory=dict)

    def add_row(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(self.columns)}")
        self.rows.append(list(row))

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return render_csv(self)
        if fmt == "json":
            return render_json(self)
        if fmt == "markdown":
            return render_markdown(self)
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def format_cell(value: Any, decimals: Optional[int] = None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if decimals is None:
            return repr(value)
        text = f"{value:.{decimals}f}"
        # Avoid "-0.000" for values that round to zero.
        if float(text) == 0.0:
            text = f"{0.0:.{decimals}f}"
        return text
    return str(value)


def _formatted_rows(report: Report) -> list[list[str]]:
    decs = [report.decimals.get(c) for c in report.columns]
    return [[format_cell(v, d) for v, d in zip(row, decs)] for row in report.rows]


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    writer.writerows(_formatted_rows(report))
    for note in report.footnotes:
        buf.write(f"# {note}\n")
    return buf.getvalue()


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def render_json(report: Report) -> str:
    data = {
        "title": report.title,
        "columns": report.columns,
        "rows": [{c: _json_value(v) for c, v in zip(report.columns, row)} for row in report.rows],
        "footnotes": report.footnotes,
    }
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def render_markdown(report: Report) -> str:
    rows = _formatted_rows(report)
    lines = [f"## {report.title}", ""]
    lines.append("| " + " | ".join(report.columns) + " |")
    lines.append("|" + "|".join("---" for _ in report.columns) + "|")
    for row in rows:
        lines.append("| " + " | ".join(cell if cell else "-" for cell in row) + " |")
    if report.footnotes:
        lines.append("")
        lines.extend(report.footnotes)
    return "\n".join(lines) + "\n"
