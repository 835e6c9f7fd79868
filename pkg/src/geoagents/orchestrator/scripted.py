"""Deterministic planner that replays a plan file.

Plan document::

    {"task_id": "B-11", "worker_kind": "FunctionCalling",
     "steps": [{"instruction": "...", "call": {...} | [{...}, ...]},
               {"instruction": "...", "script": "..." | "script_file": "fix.py",
                "fail_times": 1, "on_error": "retry" | "abort" | [step, ...]}]}

``fail_times`` makes the next ``n`` executions of a step faulty. A faulty
function-calling step drops one required argument from its first call; a
faulty script step gets a leading line that raises ``KeyError``. Failed
steps follow ``on_error``: ``retry`` reissues the step, ``abort`` ends the
task (the default) and a list of steps replaces the failed one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import GeoError
from ..registry import Registry, builtin_registry
from ..registry.core import FunctionCall
from .types import CODE_GENERATION, FUNCTION_CALLING, WORKER_KINDS, Abort, End, PlannerState, ScriptAttempt, Subtask

STEP_KEYS = {"instruction", "call", "script", "script_file", "fail_times", "on_error", "fault_field"}
DEFAULT_FAULT_FIELD = "missing_field"


class PlanError(GeoError):
    code = "plan_error"


@dataclass
class Step:
    instruction: str
    worker_kind: str
    calls: tuple = ()
    script: str | None = None
    fail_times: int = 0
    on_error: Any = "abort"  # "retry" | "abort" | list[Step]
    fault_field: str = DEFAULT_FAULT_FIELD


def _parse_step(raw: Any, where: str, default_kind: str, base_dir: Path) -> Step:
    if not isinstance(raw, dict):
        raise PlanError(f"{where}: step must be an object")
    unknown = set(raw) - STEP_KEYS
    if unknown:
        raise PlanError(f"{where}: unknown keys {sorted(unknown)}")
    instruction = raw.get("instruction")
    if not isinstance(instruction, str) or not instruction.strip():
        raise PlanError(f"{where}: instruction must be a nonempty string")
    bodies = [k for k in ("call", "script", "script_file") if k in raw]
    if len(bodies) != 1:
        raise PlanError(f"{where}: exactly one of call, script, script_file is required")
    fail_times = raw.get("fail_times", 0)
    if not isinstance(fail_times, int) or isinstance(fail_times, bool) or fail_times < 0:
        raise PlanError(f"{where}: fail_times must be a non-negative integer")
    fault_field = raw.get("fault_field", DEFAULT_FAULT_FIELD)
    if not isinstance(fault_field, str) or not fault_field:
        raise PlanError(f"{where}: fault_field must be a nonempty string")
    step = Step(instruction, default_kind, fail_times=fail_times, fault_field=fault_field)
    if "call" in raw:
        calls = raw["call"] if isinstance(raw["call"], list) else [raw["call"]]
        if not calls:
            raise PlanError(f"{where}: call list is empty")
        parsed = []
        for k, c in enumerate(calls):
            if not isinstance(c, dict) or not isinstance(c.get("name"), str):
                raise PlanError(f"{where}.call[{k}]: a call needs a string name")
            if not isinstance(c.get("arguments", {}), dict):
                raise PlanError(f"{where}.call[{k}]: arguments must be an object")
            parsed.append(FunctionCall.from_json(c))
        step.calls, step.worker_kind = tuple(parsed), FUNCTION_CALLING
    else:
        if "script" in raw:
            text = raw["script"]
        else:
            try:
                text = (base_dir / raw["script_file"]).read_text(encoding="utf-8")
            except (OSError, TypeError) as exc:
                raise PlanError(f"{where}: cannot read script_file: {exc}") from exc
        if not isinstance(text, str) or not text.strip():
            raise PlanError(f"{where}: script must be nonempty text")
        step.script, step.worker_kind = text, CODE_GENERATION
    on_error = raw.get("on_error", "abort")
    if isinstance(on_error, list):
        if not on_error:
            raise PlanError(f"{where}: on_error list is empty")
        step.on_error = [_parse_step(s, f"{where}.on_error[{k}]", default_kind, base_dir)
                         for k, s in enumerate(on_error)]
    elif on_error in ("retry", "abort"):
        step.on_error = on_error
    else:
        raise PlanError(f"{where}: on_error must be 'retry', 'abort' or a list of steps")
    return step


@dataclass
class Plan:
    task_id: str
    worker_kind: str
    steps: list = field(default_factory=list)


def parse_plan(doc: Any, base_dir: Path | str = ".") -> Plan:
    if not isinstance(doc, dict):
        raise PlanError("plan must be a JSON object")
    task_id = doc.get("task_id")
    kind = doc.get("worker_kind")
    if not isinstance(task_id, str) or not task_id:
        raise PlanError("plan.task_id must be a nonempty string")
    if kind not in WORKER_KINDS:
        raise PlanError(f"plan.worker_kind must be one of {WORKER_KINDS}")
    steps = doc.get("steps")
    if not isinstance(steps, list):
        raise PlanError("plan.steps must be a list")
    return Plan(task_id, kind, [_parse_step(s, f"steps[{k}]", kind, Path(base_dir)) for k, s in enumerate(steps)])


def load_plan(path: Path | str) -> Plan:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise PlanError(f"cannot load plan {path}: {exc}") from exc
    return parse_plan(doc, path.parent)


def _inject_call_fault(call: FunctionCall, registry: Registry) -> FunctionCall:
    spec = registry.get(call.name)
    if spec is None:
        return call
    for p in spec.params:
        if p.required and p.name in call.arguments:
            args = {k: v for k, v in call.arguments.items() if k != p.name}
            return FunctionCall(call.name, args)
    return call


def _inject_script_fault(script: str, fault_field: str) -> str:
    return f"row = {{}}; row[{fault_field!r}]\n" + script


class ScriptedPlanner:
    """Replays a :class:`Plan`. Create one instance per task run."""

    deterministic = True

    def __init__(self, plan: Plan, registry: Registry | None = None):
        self.plan = plan
        self.registry = registry or builtin_registry()
        self._queue = list(plan.steps)
        self._current: Step | None = None
        self._fails_left: dict = {}

    @classmethod
    def from_file(cls, path: Path | str, registry: Registry | None = None) -> ScriptedPlanner:
        return cls(load_plan(path), registry)

    def _faulty(self, step: Step) -> bool:
        left = self._fails_left.setdefault(id(step), step.fail_times)
        if left > 0:
            self._fails_left[id(step)] = left - 1
            return True
        return False

    def _issue(self, step: Step, index: int) -> Subtask:
        self._current = step
        faulty = self._faulty(step)
        if step.worker_kind == FUNCTION_CALLING:
            calls = list(step.calls)
            if faulty:
                calls[0] = _inject_call_fault(calls[0], self.registry)
            return Subtask(index, step.instruction, FUNCTION_CALLING, tuple(calls))
        script = _inject_script_fault(step.script, step.fault_field) if faulty else step.script
        return Subtask(index, step.instruction, CODE_GENERATION, script=script)

    def decide(self, state: PlannerState):
        index = len(state.rounds) + 1
        if state.rounds and self._current is not None:
            step = self._current
            if state.rounds[-1].ok:
                self._queue.pop(0)
            elif step.on_error == "retry":
                return self._issue(step, index)
            elif step.on_error == "abort":
                return Abort(f"step {step.instruction!r} failed")
            else:
                self._queue[0:1] = step.on_error
        if not self._queue:
            return End("all plan steps completed")
        return self._issue(self._queue[0], index)

    def revise_script(self, subtask: Subtask, failed: ScriptAttempt, attempt_no: int) -> str | None:
        step = self._current
        if step is None or step.script is None:
            return None
        return _inject_script_fault(step.script, step.fault_field) if self._faulty(step) else step.script


__all__ = ["Plan", "PlanError", "ScriptedPlanner", "Step", "load_plan", "parse_plan"]
