"""Run catalog cases through the orchestrator and judge their outputs."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

from ..errors import GeoError
from ..orchestrator import OrchestratorConfig, ScriptedPlanner, run_task, write_transcript
from ..registry import Registry, builtin_registry
from .catalog import BenchmarkCase
from .checks import evaluate_check
from .report import BenchmarkReport, CaseResult

BackendFactory = Callable[[BenchmarkCase], object]


def scripted_factory(worker_kind: str, registry: Registry | None = None) -> BackendFactory:
    """Backends replaying each case's plan for ``worker_kind``; ``None`` when absent."""
    reg = registry or builtin_registry()

    def make(case: BenchmarkCase):
        path = case.plans.get(worker_kind)
        return None if path is None else ScriptedPlanner.from_file(path, reg)

    return make


def run_case(case: BenchmarkCase, factory: BackendFactory, cfg: OrchestratorConfig,
             registry: Registry | None = None) -> CaseResult:
    """Up to ``cfg.max_task_runs`` full runs; success iff a run ends and passes every check."""
    registry = registry or builtin_registry()
    failed: tuple = ()
    rounds = None
    note = ""
    runs = 0
    for runs in range(1, cfg.max_task_runs + 1):
        try:
            backend = factory(case)
        except GeoError as exc:
            return CaseResult(case.id, case.level, False, None, runs, (), f"backend unavailable: {exc.message}")
        if backend is None:
            return CaseResult(case.id, case.level, False, None, 0, (), "no plan for this worker")
        t = run_task(case.id, case.prompt, case.inputs, backend, cfg, registry, fetch_fixtures=case.remote)
        write_transcript(t, Path(t.workspace) / "transcript.jsonl")
        rounds = len(t.rounds)
        if t.outcome == "Success":
            results = [evaluate_check(c, Path(t.workspace)) for c in case.checks]
            failed = tuple(f"{r.check.kind} {r.check.target}: {r.detail}" for r in results if not r.ok)
            if not failed:
                return CaseResult(case.id, case.level, True, rounds, runs)
            note = "checks failed"
        else:
            failed, note = (), t.abort_reason or t.note or "task failed"
        # replaying a deterministic plan cannot change the outcome
        if getattr(backend, "deterministic", False):
            break
    return CaseResult(case.id, case.level, False, rounds, runs, failed, note)


def run_suite(cases, factory: BackendFactory, cfg: OrchestratorConfig, label: str = "suite",
              parallel: int = 1, registry: Registry | None = None) -> BenchmarkReport:
    """Run cases (up to ``parallel`` at once); rows keep catalog order."""
    cases = list(cases)
    registry = registry or builtin_registry()
    if parallel < 1:
        raise ValueError("parallel must be at least 1")
    if parallel == 1 or len(cases) < 2:
        results = [run_case(c, factory, cfg, registry) for c in cases]
    else:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(lambda c: run_case(c, factory, cfg, registry), cases))
    return BenchmarkReport.from_cases(label, results)


__all__ = ["run_case", "run_suite", "scripted_factory"]
