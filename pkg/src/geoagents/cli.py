"""Command-line entry point: ``geoagents <command> ...``.

Commands write machine-readable JSON (op, run) or reports to stdout and
progress text to stderr. Configuration lives in an INI file::

    [profile.default]
    base_url = https://api.example.com/v1
    model = some-model
    credentials_env = GEOAGENTS_API_KEY
    worker_kind = FunctionCalling

    [orchestrator]
    max_task_runs = 5
    max_script_attempts = 5
    script_timeout_ms = 60000

    [tolerances]
    min_check_tol = 0
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import shutil
import sys
from pathlib import Path

from .benchmark import (CatalogError, attempts_tables, emit_report, load_catalog, report_from_attempts, run_suite,
                        scripted_factory)
from .errors import GeoError
from .orchestrator import (CODE_GENERATION, FUNCTION_CALLING, LLMPlanner, OrchestratorConfig, PlanError,
                           ScriptedPlanner, run_task, write_transcript)
from .registry import FunctionCall, Workspace, builtin_registry, dispatch, emit_docs, validate_call

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_ABORT = 0, 1, 2, 3
CONFIG_ENV = "GEOAGENTS_CONFIG"
DEFAULT_CONFIG = "geoagents.ini"
WORKER_ALIASES = {"fc": FUNCTION_CALLING, "functioncalling": FUNCTION_CALLING,
                  "cg": CODE_GENERATION, "codegeneration": CODE_GENERATION}


class CliError(GeoError):
    code = "cli_error"


def log(msg: str) -> None:
    print(msg, file=sys.stderr)


def emit_json(doc) -> None:
    print(json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    explicit = path or os.environ.get(CONFIG_ENV)
    if explicit:
        if not Path(explicit).is_file():
            raise CliError(f"config file {explicit} not found")
        cp.read(explicit, encoding="utf-8")
    elif Path(DEFAULT_CONFIG).is_file():
        cp.read(DEFAULT_CONFIG, encoding="utf-8")
    return cp


def orchestrator_config(cp: configparser.ConfigParser, workspace_root: str | None) -> OrchestratorConfig:
    sec = cp["orchestrator"] if cp.has_section("orchestrator") else {}
    kw = {}
    for key in ("max_task_runs", "max_script_attempts", "script_timeout_ms", "max_rounds"):
        if key in sec:
            kw[key] = int(sec[key])
    if workspace_root:
        kw["workspace_root"] = Path(workspace_root)
    elif "workspace_root" in sec:
        kw["workspace_root"] = Path(sec["workspace_root"])
    try:
        return OrchestratorConfig(**kw)
    except ValueError as exc:
        raise CliError(f"bad [orchestrator] settings: {exc}") from exc


def worker_kind(text: str) -> str:
    kind = WORKER_ALIASES.get(text.replace("_", "").lower())
    if kind is None:
        raise CliError(f"unknown worker kind {text!r}; use FunctionCalling or CodeGeneration")
    return kind


def llm_planner(cp: configparser.ConfigParser, profile: str, kind: str | None = None) -> LLMPlanner:
    section = f"profile.{profile}"
    if not cp.has_section(section):
        raise CliError(f"no [{section}] section in the config file")
    p = cp[section]
    missing = [k for k in ("base_url", "model", "credentials_env") if not p.get(k)]
    if missing:
        raise CliError(f"[{section}] is missing {missing}")
    return LLMPlanner(p["base_url"], p["model"], p["credentials_env"],
                      worker_kind=kind or worker_kind(p.get("worker_kind", FUNCTION_CALLING)),
                      timeout_s=p.getfloat("timeout_s", 120.0))


def _floor_tolerances(cases, floor: float):
    if floor <= 0:
        return cases
    return [dataclasses.replace(c, checks=tuple(dataclasses.replace(k, tol=max(k.tol, floor)) for k in c.checks))
            for c in cases]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_op(args, cp) -> int:
    try:
        arguments = json.loads(args.args)
    except ValueError as exc:
        emit_json({"status": "Invalid", "violations": [{"kind": "malformed", "param": None,
                                                        "message": f"--args is not JSON: {exc}"}]})
        return EXIT_INVALID
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for src in args.inputs:
        src = Path(src)
        if src.resolve() != (out / src.name).resolve():
            shutil.copy2(src, out / src.name)
    registry = builtin_registry()
    ws = Workspace(out)
    checked = validate_call(registry, {"name": args.name, "arguments": arguments}, ws.metadata)
    if not checked.ok:
        emit_json({"status": "Invalid", "violations": [v.to_json() for v in checked.violations]})
        return EXIT_INVALID
    result = dispatch(registry, checked, ws)
    emit_json(result.to_json())
    return EXIT_OK if result.ok else EXIT_FAIL


def _planner_for_run(spec: str, cp):
    kind, _, rest = spec.partition(":")
    if kind == "scripted" and rest:
        return ScriptedPlanner.from_file(rest)
    if kind == "llm":
        return llm_planner(cp, rest or "default")
    raise CliError(f"--planner must be scripted:PLAN.json or llm:PROFILE, got {spec!r}")


def _fixtures(items) -> dict:
    out = {}
    for item in items or ():
        url, sep, path = item.partition("=")
        if not sep or not url or not path:
            raise CliError(f"--fetch-fixture expects URL=PATH, got {item!r}")
        out[url] = Path(path)
    return out


def cmd_run(args, cp) -> int:
    cfg = orchestrator_config(cp, args.workspace_root)
    try:
        planner = _planner_for_run(args.planner, cp)
    except PlanError as exc:
        raise CliError(exc.message) from exc
    t = run_task(args.task_id, args.goal, args.inputs, planner, cfg, fetch_fixtures=_fixtures(args.fetch_fixture))
    path = Path(t.workspace) / "transcript.jsonl"
    write_transcript(t, path)
    log(f"{t.outcome} after {len(t.rounds)} round(s); transcript at {path}")
    emit_json({**t.summary(), "workspace": t.workspace, "transcript": str(path)})
    if t.outcome == "Success":
        return EXIT_OK
    return EXIT_ABORT if t.abort_reason else EXIT_FAIL


def _bench_factory(spec: str, cp):
    kind, _, rest = spec.partition(":")
    if kind == "scripted":
        return scripted_factory(worker_kind(rest or FUNCTION_CALLING))
    if kind == "llm":
        profile = rest or "default"
        llm_planner(cp, profile)  # fail early on a bad profile
        return lambda case: llm_planner(cp, profile)
    raise CliError(f"--planner must be scripted[:KIND], llm:PROFILE or attempts[:KIND], got {spec!r}")


def cmd_bench(args, cp) -> int:
    kind, _, rest = args.planner.partition(":")
    if kind == "attempts":
        tables = attempts_tables(args.manifest)
        if not tables:
            raise CliError("the manifest declares no attempts tables")
        report = report_from_attempts(tables, worker_kind(rest or FUNCTION_CALLING))
    else:
        cfg = orchestrator_config(cp, args.workspace_root)
        factory = _bench_factory(args.planner, cp)
        cases = load_catalog(args.manifest)
        if args.implementable_only:
            cases = [c for c in cases if c.implementable]
        if args.cases:
            wanted = set(args.cases)
            cases = [c for c in cases if c.id in wanted]
        floor = cp.getfloat("tolerances", "min_check_tol", fallback=0.0)
        cases = _floor_tolerances(cases, floor)
        log(f"running {len(cases)} case(s) with {args.planner}")
        report = run_suite(cases, factory, cfg, label=args.label or args.planner, parallel=args.parallel)
    text = emit_report(report, args.format)
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(text, encoding="utf-8")
        log(f"report written to {args.report}")
    else:
        sys.stdout.write(text)
    t = report.total
    log(f"total: {t.successes}/{t.total} succeeded, accuracy {t.accuracy_text()}, "
        f"average rounds {t.avg_rounds_text()}")
    return EXIT_OK


def cmd_registry(args, cp) -> int:
    sys.stdout.write(emit_docs(builtin_registry(), "Yaml" if args.emit == "yaml" else "Json"))
    return EXIT_OK


def cmd_convert(args, cp) -> int:
    from .ops import convert_format

    written = convert_format(args.input, args.output)
    emit_json({"status": "Ok", "files": [str(p) for p in written.paths]})
    return EXIT_OK


def cmd_metrics(args, cp) -> int:
    from .benchmark import compute_metrics, import_paper_attempts

    kind = worker_kind(args.worker)
    rows = []
    per_table = []
    for path in args.tables:
        part = import_paper_attempts(path, kind)
        rows.extend(part)
        m = compute_metrics(part)
        per_table.append({"table": str(path), **m.to_json()})
    total = compute_metrics(rows)
    emit_json({"worker_kind": kind, "tables": per_table, "total": total.to_json()})
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoagents", description="Planner/worker GeoJSON analysis toolkit.")
    ap.add_argument("--config", help=f"INI config file (default ${CONFIG_ENV} or ./{DEFAULT_CONFIG})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("op", help="validate and dispatch one library function")
    p.add_argument("name")
    p.add_argument("--args", default="{}", help="JSON object of arguments")
    p.add_argument("--in", dest="inputs", nargs="*", default=[], help="files copied into the output directory")
    p.add_argument("--out", default=".", help="workspace directory (default: current directory)")
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("run", help="run one task through the planner/worker loop")
    p.add_argument("--goal", required=True)
    p.add_argument("--inputs", nargs="*", default=[])
    p.add_argument("--planner", required=True, help="scripted:PLAN.json or llm:PROFILE")
    p.add_argument("--task-id", default="task")
    p.add_argument("--workspace-root")
    p.add_argument("--fetch-fixture", action="append", metavar="URL=PATH",
                   help="serve URL from a local file instead of the network")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="run the benchmark suite or rebuild metrics from attempts tables")
    p.add_argument("--manifest", help="manifest JSON (default: the shipped catalog)")
    p.add_argument("--planner", default="scripted:FunctionCalling",
                   help="scripted[:KIND], llm:PROFILE or attempts[:KIND]")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("Markdown", "Json"), default="Markdown")
    p.add_argument("--label")
    p.add_argument("--cases", nargs="*", help="restrict to these case ids")
    p.add_argument("--implementable-only", action="store_true")
    p.add_argument("--workspace-root")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("registry", help="print the function library documentation")
    p.add_argument("--emit", choices=("yaml", "json"), default="yaml")
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("convert", help="convert a GeoJSON file to another format by output suffix")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("metrics", help="accuracy and average rounds from attempts tables")
    p.add_argument("tables", nargs="+")
    p.add_argument("--worker", default=FUNCTION_CALLING)
    p.set_defaults(func=cmd_metrics)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cp = load_config(args.config)
        if args.command == "bench" and args.parallel < 1:
            raise CliError("--parallel must be at least 1")
        return args.func(args, cp)
    except (CliError, CatalogError) as exc:
        log(f"error: {exc.message}")
        return EXIT_ABORT if args.command in ("bench", "run") else EXIT_FAIL
    except GeoError as exc:
        log(f"error: {exc.message}")
        return EXIT_ABORT if args.command == "bench" else EXIT_FAIL
    except (OSError, configparser.Error) as exc:
        log(f"error: {exc}")
        return EXIT_ABORT if args.command == "bench" else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
