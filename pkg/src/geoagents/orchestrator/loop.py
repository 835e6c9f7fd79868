"""The decide, execute, observe loop."""

from __future__ import annotations

import json
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import GeoError
from ..ops.io import FETCH_FIXTURES_ENV, fixture_transport
from ..registry import Registry, Workspace, builtin_registry, dispatch, validate_call
from .sandbox import SandboxUnavailable, run_script
from .types import (CODE_GENERATION, Abort, CallStep, End, ExecutionRound, FunctionReport, OrchestratorConfig,
                    PlannerBackend, PlannerState, ScriptOutcome, Subtask, Transcript)


class WorkspaceError(GeoError):
    code = "workspace_error"


def execute_function_round(subtask: Subtask, registry: Registry, ws: Workspace) -> FunctionReport:
    """Validate then dispatch each proposed call; stop at the first failure."""
    steps = []
    for call in subtask.calls:
        checked = validate_call(registry, call, ws.metadata)
        if not checked.ok:
            steps.append(CallStep(call, checked.violations))
            break
        result = dispatch(registry, checked, ws)
        steps.append(CallStep(checked.call, (), result))
        if not result.ok:
            break
    return FunctionReport(tuple(steps))


def execute_script_round(subtask: Subtask, backend: PlannerBackend, ws: Workspace, cfg: OrchestratorConfig,
                         round_id: int, extra_env: dict | None = None) -> ScriptOutcome:
    """Execute, and on failure ask the backend for a revision, up to the attempt cap."""
    attempts = []
    script = subtask.script
    for k in range(1, cfg.max_script_attempts + 1):
        if script is None:
            break
        attempt = run_script(script, ws.root, f"round{round_id:02d}_attempt{k}", cfg.interpreter_command,
                             cfg.script_timeout_ms, extra_env)
        attempts.append(attempt)
        if attempt.ok:
            return ScriptOutcome(tuple(attempts), "Ok")
        if k < cfg.max_script_attempts:
            script = backend.revise_script(subtask, attempt, k)
    return ScriptOutcome(tuple(attempts), "Failed")


def _snapshot(root: Path) -> set:
    return {p.relative_to(root).as_posix() for p in root.rglob("*")
            if p.is_file() and ".scripts" not in p.relative_to(root).parts}


def _file_state(ws: Workspace) -> dict:
    out = {}
    for rel in sorted(_snapshot(ws.root)):
        meta = ws.metadata(rel)
        out[rel] = None if meta is None else meta.to_json()
    return out


def prepare_workspace(task_id: str, inputs: Iterable, cfg: OrchestratorConfig) -> Path:
    try:
        cfg.workspace_root.mkdir(parents=True, exist_ok=True)
        root = Path(tempfile.mkdtemp(prefix=f"{task_id}-", dir=cfg.workspace_root))
        for src in inputs:
            src = Path(src)
            shutil.copy2(src, root / src.name)
    except OSError as exc:
        raise WorkspaceError(f"cannot prepare workspace for {task_id}: {exc}") from exc
    return root


def _verdict(prev: ExecutionRound, decision) -> str:
    if isinstance(decision, End):
        return "End"
    if isinstance(decision, Abort):
        return "Abort"
    return "Proceed" if prev.ok else "Replan"


def run_task(task_id: str, goal: str, inputs: Iterable, backend: PlannerBackend, cfg: OrchestratorConfig,
             registry: Registry | None = None, transport=None, fetch_fixtures: dict | None = None) -> Transcript:
    """Run one task to End, Abort or the round cap in a fresh workspace.

    ``fetch_fixtures`` (URL -> file) stands in for the network, both for
    dispatched calls and for generated scripts.
    """
    registry = registry or builtin_registry()
    script_env = None
    if fetch_fixtures:
        fixtures = {str(u): str(Path(p).resolve()) for u, p in fetch_fixtures.items()}
        transport = transport or fixture_transport(fixtures)
        script_env = {FETCH_FIXTURES_ENV: json.dumps(fixtures, sort_keys=True)}
    root = prepare_workspace(task_id, list(inputs), cfg)
    ws = Workspace(root, transport=transport)
    initial = _snapshot(root)
    t = Transcript(task_id, goal, workspace=str(root))
    next_index = 1
    decision = None
    while True:
        state = PlannerState(task_id, goal, _file_state(ws), tuple(t.rounds))
        try:
            decision = backend.decide(state)
        except GeoError as exc:
            decision = Abort(f"planner backend failed: {exc.message}", fault=True)
        except Exception as exc:  # backend transport or parse failure
            decision = Abort(f"planner backend failed: {type(exc).__name__}: {exc}", fault=True)
        if t.rounds:
            t.rounds[-1].planner_verdict = _verdict(t.rounds[-1], decision)
        if isinstance(decision, End):
            t.outcome = "Success"
            t.vacuous = not t.rounds
            t.note = decision.note
            break
        if isinstance(decision, Abort):
            t.outcome = "Failure"
            t.note = decision.reason
            if decision.fault:
                t.abort_reason = decision.reason
            break
        if not isinstance(decision, Subtask):
            t.outcome, t.abort_reason = "Failure", f"backend returned {type(decision).__name__}, not a decision"
            break
        if len(t.rounds) >= cfg.max_rounds:
            t.rounds[-1].planner_verdict = "Abort"
            t.outcome, t.note = "Failure", f"round limit of {cfg.max_rounds} reached"
            break
        subtask = decision
        if subtask.index != next_index:
            subtask = Subtask(next_index, subtask.instruction, subtask.worker_kind, subtask.calls, subtask.script)
        next_index += 1
        round_id = len(t.rounds) + 1
        try:
            if subtask.worker_kind == CODE_GENERATION:
                report = execute_script_round(subtask, backend, ws, cfg, round_id, script_env)
            else:
                report = execute_function_round(subtask, registry, ws)
        except SandboxUnavailable as exc:
            t.outcome, t.abort_reason = "Failure", exc.message
            break
        t.rounds.append(ExecutionRound(round_id, subtask, report))
    t.produced_files = sorted(_snapshot(root) - initial)
    usage = getattr(backend, "token_usage", None)
    t.token_usage = dict(usage) if usage else None
    return t


@dataclass(frozen=True)
class RoundStats:
    rounds: int
    success: bool


def compute_round_stats(t: Transcript) -> RoundStats:
    """Rounds are planner-to-worker cycles; script repairs inside a round do not count."""
    return RoundStats(len(t.rounds), t.outcome == "Success")


def write_transcript(t: Transcript, path: Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(t.to_jsonl(), encoding="utf-8")


__all__ = ["RoundStats", "WorkspaceError", "compute_round_stats", "execute_function_round",
           "execute_script_round", "prepare_workspace", "run_task", "write_transcript"]
