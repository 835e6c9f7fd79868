"""Benchmark report assembly and rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import LEVELS
from .metrics import Metrics, compute_metrics, read_attempts_table

REPORT_FORMATS = ("Json", "Markdown")
_LEVEL_LABEL = {"Basic": "Basic Tasks", "Intermediate": "Intermediate Tasks", "Advanced": "Advanced Tasks"}


@dataclass(frozen=True)
class CaseResult:
    id: str
    level: str
    success: bool
    rounds: int | None  # rounds of the reported run
    runs: int = 1
    failed_checks: tuple = ()
    note: str = ""

    def to_json(self) -> dict:
        return {"id": self.id, "level": self.level, "success": self.success, "rounds": self.rounds,
                "runs": self.runs, "failed_checks": list(self.failed_checks), "note": self.note}

    @classmethod
    def from_json(cls, d: dict) -> CaseResult:
        return cls(d["id"], d["level"], d["success"], d["rounds"], d.get("runs", 1),
                   tuple(d.get("failed_checks", ())), d.get("note", ""))


@dataclass(frozen=True)
class BenchmarkReport:
    label: str
    cases: tuple = ()
    levels: dict = field(default_factory=dict)  # level -> Metrics
    total: Metrics = Metrics(0, 0, 0)

    @classmethod
    def from_cases(cls, label: str, cases) -> BenchmarkReport:
        cases = tuple(cases)
        levels = {lvl: compute_metrics((c.success, c.rounds) for c in cases if c.level == lvl)
                  for lvl in LEVELS if any(c.level == lvl for c in cases)}
        return cls(label, cases, levels, compute_metrics((c.success, c.rounds) for c in cases))

    def to_json(self) -> dict:
        return {"label": self.label,
                "levels": [{"level": lvl, **m.to_json()} for lvl, m in self.levels.items()],
                "total": self.total.to_json(),
                "cases": [c.to_json() for c in self.cases]}

    @classmethod
    def from_json(cls, d: dict) -> BenchmarkReport:
        return cls.from_cases(d["label"], (CaseResult.from_json(c) for c in d["cases"]))


def report_from_attempts(tables: dict, worker_kind: str, label: str | None = None) -> BenchmarkReport:
    """Report built from attempts tables (level -> CSV path) instead of live runs."""
    col = {"FunctionCalling": "function_calling", "CodeGeneration": "code_generation"}[worker_kind]
    rows = []
    for lvl in LEVELS:
        if lvl not in tables:
            continue
        for r in read_attempts_table(Path(tables[lvl])):
            v = getattr(r, col)
            note = "" if r.provenance == "appendix" else r.provenance
            rows.append(CaseResult(r.case_id, lvl, v is not None, v, 1, (), note))
    return BenchmarkReport.from_cases(label or f"{worker_kind} (attempts tables)", rows)


def _markdown(r: BenchmarkReport) -> str:
    lines = [f"## {r.label}", "", "| Task Level | Accuracy | Average Number Of Execution Rounds |",
             "|---|---|---|"]
    for lvl, m in r.levels.items():
        lines.append(f"| {_LEVEL_LABEL[lvl]} | {m.accuracy_text()} | {m.avg_rounds_text()} |")
    lines.append(f"| Total | {r.total.accuracy_text()} | {r.total.avg_rounds_text()} |")
    lines += ["", "| Case | Level | Success | Rounds | Runs | Failed checks |", "|---|---|---|---|---|---|"]
    for c in r.cases:
        rounds = "" if c.rounds is None else str(c.rounds)
        failed = "; ".join(c.failed_checks).replace("|", "\\|")
        lines.append(f"| {c.id} | {c.level} | {'yes' if c.success else 'no'} | {rounds} | {c.runs} | {failed} |")
    return "\n".join(lines) + "\n"


def emit_report(r: BenchmarkReport, fmt: str = "Markdown") -> str:
    """Deterministic text rendering; ``Json`` parses back with ``BenchmarkReport.from_json``."""
    if fmt == "Json":
        return json.dumps(r.to_json(), indent=2, ensure_ascii=False) + "\n"
    if fmt == "Markdown":
        return _markdown(r)
    raise ValueError(f"report format must be one of {REPORT_FORMATS}")


__all__ = ["BenchmarkReport", "CaseResult", "REPORT_FORMATS", "emit_report", "report_from_attempts"]
