"""Geometry-free tabular results (joins, aggregates, distance tables)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from ..errors import FieldError
from ..model import check_attribute


@dataclass(frozen=True)
class TabularData:
    columns: tuple
    rows: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        if len(set(cols)) != len(cols):
            raise FieldError(f"duplicate column names in {cols}")
        rows = []
        for i, row in enumerate(self.rows):
            if set(row) != set(cols):
                raise FieldError(f"row {i} has columns {sorted(row)}, expected {list(cols)}")
            for k, v in row.items():
                check_attribute(k, v, f" in row {i}")
            rows.append({c: row[c] for c in cols})
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping], columns: Iterable[str] | None = None) -> TabularData:
        rows = [dict(r) for r in rows]
        if columns is None:
            seen: dict[str, None] = {}
            for r in rows:
                for k in r:
                    seen.setdefault(k, None)
            columns = list(seen)
        columns = tuple(columns)
        return cls(columns, tuple({c: r.get(c) for c in columns} for r in rows))

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise FieldError(f"no column {name!r}; columns are {list(self.columns)}")
        return [r[name] for r in self.rows]

    def to_json(self) -> dict:
        return {"columns": list(self.columns), "rows": [dict(r) for r in self.rows]}

    def to_csv(self) -> str:
        return rows_to_csv(self.columns, self.rows)


def format_cell(v: Any) -> str:
    if v is None:
        return ""
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, float):
        if v.is_integer() and abs(v) < 2**53:
            return str(int(v))
        return repr(v)
    return str(v)


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_cell(r[c]) for c in columns])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError:
        return text
    return v if v == v and v not in (float("inf"), float("-inf")) else text


def read_table(text: str, infer_types: bool = True) -> TabularData:
    """Read CSV (header row) or a ``{"columns", "rows"}`` JSON document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        return TabularData.from_rows(doc["rows"], doc.get("columns"))
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return TabularData((), ())
    rows = []
    for rec in reader:
        if not rec:
            continue
        rec = rec + [""] * (len(header) - len(rec))
        rows.append({h: (_parse_cell(v) if infer_types else v) for h, v in zip(header, rec)})
    return TabularData(tuple(header), tuple(rows))
