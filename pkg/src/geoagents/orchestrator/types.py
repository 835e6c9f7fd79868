"""Data types of the planner/worker loop."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol, Union

from ..registry.core import CallResult, FunctionCall, Violation

FUNCTION_CALLING = "FunctionCalling"
CODE_GENERATION = "CodeGeneration"
WORKER_KINDS = (FUNCTION_CALLING, CODE_GENERATION)
VERDICTS = ("Proceed", "Replan", "End", "Abort")
HARD_ROUND_CAP = 64


@dataclass(frozen=True)
class Subtask:
    index: int
    instruction: str
    worker_kind: str
    calls: tuple = ()  # FunctionCalling: proposed calls, run in order within the round
    script: str | None = None  # CodeGeneration: first script to execute

    def __post_init__(self):
        if not self.instruction:
            raise ValueError("subtask instruction must be nonempty")
        if self.worker_kind not in WORKER_KINDS:
            raise ValueError(f"worker_kind must be one of {WORKER_KINDS}")
        object.__setattr__(self, "calls", tuple(self.calls))

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "instruction": self.instruction, "worker_kind": self.worker_kind}
        if self.worker_kind == FUNCTION_CALLING:
            out["calls"] = [c.to_json() if isinstance(c, FunctionCall) else c for c in self.calls]
        else:
            out["script"] = self.script
        return out


@dataclass(frozen=True)
class End:
    note: str = ""


@dataclass(frozen=True)
class Abort:
    """Stop the task. ``fault`` marks harness or backend failures (as opposed
    to a planner deciding the task cannot be completed)."""

    reason: str
    fault: bool = False


Decision = Union[Subtask, End, Abort]


@dataclass(frozen=True)
class CallStep:
    call: Any  # as proposed; may be malformed
    violations: tuple = ()
    result: CallResult | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and self.result is not None and self.result.ok

    def to_json(self) -> dict:
        out: dict = {"call": self.call.to_json() if isinstance(self.call, FunctionCall) else self.call}
        if self.violations:
            out["violations"] = [v.to_json() for v in self.violations]
        if self.result is not None:
            out["result"] = self.result.to_json()
        return out


def call_name(call: Any) -> str:
    if isinstance(call, FunctionCall):
        return call.name
    if isinstance(call, dict) and isinstance(call.get("name"), str):
        return call["name"]
    return "?"


@dataclass(frozen=True)
class FunctionReport:
    steps: tuple

    @property
    def ok(self) -> bool:
        return bool(self.steps) and all(s.ok for s in self.steps)

    def observation(self) -> str:
        lines = []
        for s in self.steps:
            name = call_name(s.call)
            if s.violations:
                lines.append(f"{name}: rejected: " + "; ".join(str(v) for v in s.violations))
            elif s.result is not None and s.result.ok:
                msgs = [str(o.payload) for o in s.result.outputs if o.kind in ("message", "file")]
                lines.append(f"{name}: ok: " + "; ".join(msgs))
            elif s.result is not None:
                lines.append(f"{name}: error [{s.result.error['code']}]: {s.result.error['message']}")
        return "\n".join(lines) or "no call was proposed"

    def to_json(self) -> dict:
        return {"kind": "function", "ok": self.ok, "steps": [s.to_json() for s in self.steps]}


@dataclass(frozen=True)
class ScriptAttempt:
    script_text: str
    exit_status: int | None  # None when the run timed out
    stdout: str
    stderr: str
    wall_ms: int
    timed_out: bool = False

    @property
    def ok(self) -> bool:
        return self.exit_status == 0 and not self.timed_out

    def to_json(self, with_timing: bool = True) -> dict:
        out = {"script_text": self.script_text, "exit_status": self.exit_status, "stdout": self.stdout,
               "stderr": self.stderr, "timed_out": self.timed_out}
        if with_timing:
            out["wall_ms"] = self.wall_ms
        return out


@dataclass(frozen=True)
class ScriptOutcome:
    attempts: tuple
    final_status: str  # Ok | Failed

    @property
    def ok(self) -> bool:
        return self.final_status == "Ok"

    def observation(self) -> str:
        last = self.attempts[-1] if self.attempts else None
        if last is None:
            return "no script was produced"
        n = len(self.attempts)
        if self.ok:
            return f"script succeeded after {n} attempt(s)\n{last.stdout[-2000:]}"
        why = "timed out" if last.timed_out else f"exit {last.exit_status}"
        return f"script failed after {n} attempt(s) ({why})\n{last.stderr[-2000:]}"

    def to_json(self, with_timing: bool = True) -> dict:
        return {"kind": "script", "ok": self.ok, "final_status": self.final_status,
                "attempts": [a.to_json(with_timing) for a in self.attempts]}


Report = Union[FunctionReport, ScriptOutcome]


@dataclass
class ExecutionRound:
    round_id: int
    subtask: Subtask
    worker_report: Report
    planner_verdict: str | None = None  # filled in from the next decision

    @property
    def ok(self) -> bool:
        return self.worker_report.ok

    def to_json(self, with_timing: bool = True) -> dict:
        rep = self.worker_report
        rep_json = rep.to_json(with_timing) if isinstance(rep, ScriptOutcome) else rep.to_json()
        return {"type": "round", "round_id": self.round_id, "subtask": self.subtask.to_json(),
                "worker_report": rep_json, "planner_verdict": self.planner_verdict}


@dataclass
class Transcript:
    task_id: str
    goal: str
    rounds: list = field(default_factory=list)
    outcome: str = "Failure"  # Success | Failure
    produced_files: list = field(default_factory=list)
    token_usage: dict | None = None
    abort_reason: str | None = None
    vacuous: bool = False
    workspace: str | None = None
    note: str = ""

    def summary(self) -> dict:
        return {"type": "summary", "task_id": self.task_id, "goal": self.goal, "outcome": self.outcome,
                "rounds": len(self.rounds), "vacuous": self.vacuous, "abort_reason": self.abort_reason,
                "note": self.note, "produced_files": list(self.produced_files), "token_usage": self.token_usage}

    def to_jsonl(self, with_timing: bool = True) -> str:
        lines = [json.dumps(r.to_json(with_timing), ensure_ascii=False, sort_keys=True) for r in self.rounds]
        lines.append(json.dumps(self.summary(), ensure_ascii=False, sort_keys=True))
        return "\n".join(lines) + "\n"

    def comparison_form(self) -> str:
        """JSONL without wall-clock fields, for replay comparisons."""
        return self.to_jsonl(with_timing=False)


@dataclass
class OrchestratorConfig:
    max_task_runs: int = 5
    max_script_attempts: int = 5
    script_timeout_ms: int = 60_000
    interpreter_command: list = field(default_factory=lambda: [sys.executable])
    workspace_root: Path = field(default_factory=lambda: Path("workspaces"))
    max_rounds: int = HARD_ROUND_CAP

    def __post_init__(self):
        if self.max_task_runs < 1 or self.max_script_attempts < 1:
            raise ValueError("max_task_runs and max_script_attempts must be at least 1")
        if self.script_timeout_ms <= 0:
            raise ValueError("script_timeout_ms must be positive")
        if not 1 <= self.max_rounds <= HARD_ROUND_CAP:
            raise ValueError(f"max_rounds must be between 1 and {HARD_ROUND_CAP}")
        self.workspace_root = Path(self.workspace_root)
        self.interpreter_command = list(self.interpreter_command)


@dataclass(frozen=True)
class PlannerState:
    task_id: str
    goal: str
    files: dict  # workspace-relative path -> metadata dict (None for non-GeoJSON files)
    rounds: tuple  # ExecutionRound history


class PlannerBackend(Protocol):
    def decide(self, state: PlannerState) -> Decision: ...

    def revise_script(self, subtask: Subtask, failed: ScriptAttempt, attempt_no: int) -> str | None: ...


__all__ = [
    "Abort", "CallStep", "CODE_GENERATION", "Decision", "End", "ExecutionRound", "FUNCTION_CALLING",
    "FunctionReport", "HARD_ROUND_CAP", "OrchestratorConfig", "PlannerBackend", "PlannerState", "Report",
    "ScriptAttempt", "ScriptOutcome", "Subtask", "Transcript", "Violation", "WORKER_KINDS",
]
