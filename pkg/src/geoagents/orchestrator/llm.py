"""Planner backend that talks to an OpenAI-compatible chat-completions endpoint."""

from __future__ import annotations

import json
import os
import re

import httpx

from ..errors import GeoError
from ..registry import Registry, builtin_registry, tool_schemas
from ..registry.core import FunctionCall
from .types import (CODE_GENERATION, FUNCTION_CALLING, WORKER_KINDS, Abort, End, PlannerState,
                    ScriptAttempt, Subtask)

_CODE_BLOCK = re.compile(r"```(?:python|py)?[ \t]*\n(.*?)```", re.DOTALL)
END_TOKEN = "END"

_SYSTEM = {
    FUNCTION_CALLING: (
        "You plan and execute geospatial tasks over GeoJSON files in a working directory. "
        "Each turn, either call one or more of the provided functions to carry out the next subtask, "
        "or reply with the single word END once the task is complete. Use workspace-relative paths."
    ),
    CODE_GENERATION: (
        "You plan and execute geospatial tasks over GeoJSON files in a working directory. "
        "Each turn, either reply with one Python script in a ```python block that carries out the next "
        "subtask, or reply with the single word END once the task is complete. Scripts run in the working "
        "directory without network access; the geoagents package is importable."
    ),
}


class BackendError(GeoError):
    code = "backend_error"


def extract_script(text: str) -> str | None:
    m = _CODE_BLOCK.search(text or "")
    return m.group(1) if m else None


def _observation(round_) -> str:
    rep = round_.worker_report
    status = "succeeded" if rep.ok else "failed"
    return f"Round {round_.round_id} ({round_.subtask.instruction}) {status}.\n{rep.observation()}"


class LLMPlanner:
    """Each reply becomes one decision: tool calls, a script, END, or an abort."""

    deterministic = False

    def __init__(self, base_url: str, model: str, credentials_env: str, registry: Registry | None = None,
                 worker_kind: str = FUNCTION_CALLING, transport: httpx.BaseTransport | None = None,
                 timeout_s: float = 120.0):
        if worker_kind not in WORKER_KINDS:
            raise ValueError(f"worker_kind must be one of {WORKER_KINDS}")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.credentials_env = credentials_env
        self.registry = registry or builtin_registry()
        self.worker_kind = worker_kind
        self.tools = tool_schemas(self.registry, implemented_only=True)
        self.token_usage = {"prompt_tokens": 0, "completion_tokens": 0, "total_tokens": 0}
        self._client = httpx.Client(transport=transport, timeout=timeout_s)

    def _post(self, messages: list) -> dict:
        key = os.environ.get(self.credentials_env)
        if not key:
            raise BackendError(f"environment variable {self.credentials_env} is not set")
        body = {"model": self.model, "messages": messages, "tools": self.tools, "tool_choice": "auto"}
        try:
            resp = self._client.post(f"{self.base_url}/chat/completions", json=body,
                                     headers={"Authorization": f"Bearer {key}"})
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise BackendError(f"HTTP failure: {exc}") from exc
        except ValueError as exc:
            raise BackendError(f"response is not JSON: {exc}") from exc
        usage = data.get("usage") if isinstance(data, dict) else None
        if isinstance(usage, dict):
            for k in self.token_usage:
                if isinstance(usage.get(k), int):
                    self.token_usage[k] += usage[k]
        try:
            msg = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError("response has no choices[0].message") from exc
        if not isinstance(msg, dict):
            raise BackendError("choices[0].message is not an object")
        return msg

    def messages(self, state: PlannerState) -> list:
        files = json.dumps(state.files, indent=2, sort_keys=True)
        msgs = [{"role": "system", "content": _SYSTEM[self.worker_kind]},
                {"role": "user", "content": f"Task: {state.goal}\n\nWorkspace files:\n{files}"}]
        for r in state.rounds:
            msgs.append({"role": "user", "content": _observation(r)})
        return msgs

    def decide(self, state: PlannerState):
        try:
            msg = self._post(self.messages(state))
        except BackendError as exc:
            return Abort(exc.message, fault=True)
        index = len(state.rounds) + 1
        content = msg.get("content") or ""
        tool_calls = msg.get("tool_calls") or []
        if tool_calls:
            calls = []
            for tc in tool_calls:
                fn = tc.get("function", {}) if isinstance(tc, dict) else {}
                try:
                    args = json.loads(fn.get("arguments") or "{}")
                except ValueError:
                    args = fn.get("arguments")  # left malformed; the validator reports it
                if isinstance(args, dict) and isinstance(fn.get("name"), str):
                    calls.append(FunctionCall(fn["name"], args))
                else:
                    calls.append({"name": fn.get("name"), "arguments": args})
            instruction = content.strip() or "call " + ", ".join(
                c.name if isinstance(c, FunctionCall) else str(c.get("name")) for c in calls)
            return Subtask(index, instruction, FUNCTION_CALLING, tuple(calls))
        if content.strip() == END_TOKEN:
            return End("planner replied END")
        script = extract_script(content)
        if script is not None:
            head = content[:content.find("```")].strip()
            return Subtask(index, head or "run generated script", CODE_GENERATION, script=script)
        return Abort(f"unparseable planner reply: {content[:200]!r}", fault=True)

    def revise_script(self, subtask: Subtask, failed: ScriptAttempt, attempt_no: int) -> str | None:
        why = "timed out" if failed.timed_out else f"exited with status {failed.exit_status}"
        msgs = [{"role": "system", "content": _SYSTEM[CODE_GENERATION]},
                {"role": "user", "content": (
                    f"Subtask: {subtask.instruction}\n\nThis script {why}:\n```python\n{failed.script_text}```\n\n"
                    f"Error output:\n{failed.stderr[-4000:]}\n\nReply with a corrected script in a ```python block.")}]
        try:
            msg = self._post(msgs)
        except BackendError:
            return None
        return extract_script(msg.get("content") or "")

    def close(self) -> None:
        self._client.close()


__all__ = ["BackendError", "END_TOKEN", "LLMPlanner", "extract_script"]
