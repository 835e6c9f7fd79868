"""Accuracy and average-rounds metrics, computed exactly before formatting."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from ..errors import GeoError

UNDEFINED = "n/a"
WORKER_COLUMNS = {"FunctionCalling": "function_calling", "CodeGeneration": "code_generation"}
FAILED = "Failed"


class AttemptsTableError(GeoError):
    code = "parse_error"


@dataclass(frozen=True)
class Metrics:
    total: int
    successes: int
    rounds_sum: int

    @property
    def accuracy(self) -> Fraction | None:
        return Fraction(self.successes, self.total) if self.total else None

    @property
    def avg_rounds(self) -> Fraction | None:
        """Mean rounds over successful rows only."""
        return Fraction(self.rounds_sum, self.successes) if self.successes else None

    def accuracy_text(self, trim: bool = True) -> str:
        return UNDEFINED if self.accuracy is None else format_fixed(self.accuracy * 100, trim) + "%"

    def avg_rounds_text(self, trim: bool = False) -> str:
        return UNDEFINED if self.avg_rounds is None else format_fixed(self.avg_rounds, trim)

    def to_json(self) -> dict:
        return {"total": self.total, "successes": self.successes, "rounds_sum": self.rounds_sum,
                "accuracy": self.accuracy_text(), "avg_rounds": self.avg_rounds_text()}


def format_fixed(q: Fraction, trim: bool = False) -> str:
    """``q`` to 2 decimals, rounding half up on the exact value."""
    scaled = q * 100
    n, d = scaled.numerator, scaled.denominator
    hundredths = (2 * n + d) // (2 * d) if n >= 0 else -((-2 * n + d) // (2 * d))
    sign = "-" if hundredths < 0 else ""
    whole, frac = divmod(abs(hundredths), 100)
    text = f"{sign}{whole}.{frac:02d}"
    if trim:
        text = text.rstrip("0").rstrip(".")
    return text


def compute_metrics(rows: Iterable) -> Metrics:
    """``rows`` are ``(success, rounds)`` pairs; rounds of failed rows are ignored."""
    total = successes = rounds_sum = 0
    for success, rounds in rows:
        total += 1
        if success:
            if not isinstance(rounds, int) or rounds < 0:
                raise ValueError(f"a successful row needs a non-negative integer round count, got {rounds!r}")
            successes += 1
            rounds_sum += rounds
    return Metrics(total, successes, rounds_sum)


@dataclass(frozen=True)
class AttemptsRow:
    case_id: str
    function_calling: int | None  # None marks a failed case
    code_generation: int | None
    provenance: str


def _cell(text: str, where: str) -> int | None:
    text = text.strip()
    if text == FAILED:
        return None
    if not text.isdigit() or int(text) < 1:
        raise AttemptsTableError(f"{where}: expected a positive round count or {FAILED!r}, got {text!r}")
    return int(text)


def read_attempts_table(path: str | Path) -> list[AttemptsRow]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise AttemptsTableError(f"cannot read {path}: {exc}") from exc
    return parse_attempts_table(text)


def parse_attempts_table(text: str) -> list[AttemptsRow]:
    """Parse an attempts CSV (``id,function_calling,code_generation,provenance``)."""
    reader = csv.DictReader(io.StringIO(text))
    need = {"id", "function_calling", "code_generation"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise AttemptsTableError(f"attempts table needs columns {sorted(need)}")
    rows = []
    for k, rec in enumerate(reader, start=2):
        where = f"line {k}"
        if not rec["id"]:
            raise AttemptsTableError(f"{where}: empty id")
        rows.append(AttemptsRow(rec["id"], _cell(rec["function_calling"] or "", where),
                                _cell(rec["code_generation"] or "", where), rec.get("provenance") or "appendix"))
    return rows


def import_paper_attempts(path: str | Path, worker_kind: str = "FunctionCalling") -> list[tuple]:
    """``(success, rounds)`` rows for one worker column of an attempts table."""
    if worker_kind not in WORKER_COLUMNS:
        raise ValueError(f"worker_kind must be one of {sorted(WORKER_COLUMNS)}")
    col = WORKER_COLUMNS[worker_kind]
    out = []
    for r in read_attempts_table(path):
        v = getattr(r, col)
        out.append((v is not None, v))
    return out


__all__ = ["AttemptsRow", "AttemptsTableError", "Metrics", "UNDEFINED", "compute_metrics", "format_fixed",
           "import_paper_attempts", "parse_attempts_table", "read_attempts_table"]
