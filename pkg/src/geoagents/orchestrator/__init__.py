"""Planner/worker loop with function-calling and script-generation workers."""

from __future__ import annotations

from .llm import BackendError, LLMPlanner, extract_script
from .loop import (RoundStats, WorkspaceError, compute_round_stats, execute_function_round, execute_script_round,
                   prepare_workspace, run_task, write_transcript)
from .sandbox import SandboxUnavailable, run_script
from .scripted import Plan, PlanError, ScriptedPlanner, load_plan, parse_plan
from .types import (CODE_GENERATION, FUNCTION_CALLING, HARD_ROUND_CAP, Abort, End, ExecutionRound, FunctionReport,
                    OrchestratorConfig, PlannerState, ScriptAttempt, ScriptOutcome, Subtask, Transcript)

__all__ = [
    "Abort", "BackendError", "CODE_GENERATION", "End", "ExecutionRound", "FUNCTION_CALLING", "FunctionReport",
    "HARD_ROUND_CAP", "LLMPlanner", "OrchestratorConfig", "Plan", "PlanError", "PlannerState", "RoundStats",
    "SandboxUnavailable", "ScriptAttempt", "ScriptOutcome", "ScriptedPlanner", "Subtask", "Transcript",
    "WorkspaceError", "compute_round_stats", "execute_function_round", "execute_script_round", "extract_script",
    "load_plan", "parse_plan", "prepare_workspace", "run_script", "run_task", "write_transcript",
]
