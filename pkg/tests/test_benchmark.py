from __future__ import annotations

import csv
import json
import time
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoagents.benchmark import (BenchmarkReport, CaseResult, CatalogError, attempts_tables, compute_metrics,
                                 emit_report, level_counts, load_catalog, report_from_attempts, run_case, run_suite,
                                 scripted_factory, stock_manifest_path)
from geoagents.benchmark.metrics import AttemptsTableError, format_fixed, parse_attempts_table
from geoagents.orchestrator import OrchestratorConfig

# published per-level results: level -> (accuracy %, average rounds)
PUBLISHED = {
    "FunctionCalling": {"Basic": (92.5, 1.19), "Intermediate": (85.0, 1.35), "Advanced": (60.0, 1.5),
                        "Total": (85.71, 1.27)},
    "CodeGeneration": {"Basic": (97.5, 1.28), "Intermediate": (100.0, 1.35), "Advanced": (90.0, 1.67),
                       "Total": (97.14, 1.35)},
}
NOT_IMPLEMENTABLE = {"B-8", "B-9", "I-5", "A-5", "A-6"}


def table_cells(kind: str) -> dict:
    r = report_from_attempts(attempts_tables(), kind)
    cells = {lvl: (float(m.accuracy_text().rstrip("%")), float(m.avg_rounds_text())) for lvl, m in r.levels.items()}
    cells["Total"] = (float(r.total.accuracy_text().rstrip("%")), float(r.total.avg_rounds_text()))
    return cells


def oracle_cells(kind: str) -> dict:
    """Plain-float recomputation straight from the CSV files."""
    col = {"FunctionCalling": "function_calling", "CodeGeneration": "code_generation"}[kind]
    out, all_rows = {}, []
    for lvl, path in attempts_tables().items():
        with open(path, newline="", encoding="utf-8") as fh:
            vals = [r[col] for r in csv.DictReader(fh)]
        all_rows += vals
        out[lvl] = vals
    out["Total"] = all_rows
    cells = {}
    for k, vals in out.items():
        ok = [int(v) for v in vals if v != "Failed"]
        cells[k] = (round(100 * len(ok) / len(vals), 2), round(sum(ok) / len(ok), 2))
    return cells


def check_tables_reproduced() -> tuple:
    """(all cells match, seconds) for both worker tables."""
    t0 = time.perf_counter()
    ok = all(table_cells(k) == PUBLISHED[k] for k in PUBLISHED)
    return ok, time.perf_counter() - t0


@pytest.mark.parametrize("kind", sorted(PUBLISHED))
def test_tables_match_published(kind):
    assert table_cells(kind) == PUBLISHED[kind]


@pytest.mark.parametrize("kind", sorted(PUBLISHED))
def test_tables_match_independent_recomputation(kind):
    assert table_cells(kind) == oracle_cells(kind)


def test_tables_fast():
    ok, secs = check_tables_reproduced()
    assert ok and secs < 1.0


def test_total_accuracy_identities():
    assert compute_metrics([(True, 1)] * 60 + [(False, None)] * 10).accuracy_text() == "85.71%"
    assert compute_metrics([(True, 1)] * 68 + [(False, None)] * 2).accuracy_text() == "97.14%"
    assert Fraction(60, 70) * 100 != Fraction(8571, 100)  # the percentage is rounded, not exact


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def test_format_fixed_rounds_half_up():
    assert format_fixed(Fraction(1, 8)) == "0.13"
    assert format_fixed(Fraction(5, 4), trim=True) == "1.25"
    assert format_fixed(Fraction(3, 2)) == "1.50"
    assert format_fixed(Fraction(3, 2), trim=True) == "1.5"
    assert format_fixed(Fraction(-1, 8)) == "-0.13"


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_format_fixed_vs_decimal(n, d):
    # Decimal keeps 28 digits, so a true .xx5 tie is never produced by rounding noise
    want = (Decimal(n) / Decimal(d)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    assert Decimal(format_fixed(Fraction(n, d))) == want


def test_empty_metrics_undefined():
    m = compute_metrics([])
    assert (m.accuracy_text(), m.avg_rounds_text()) == ("n/a", "n/a")
    assert compute_metrics([(False, None)]).avg_rounds_text() == "n/a"
    r = BenchmarkReport.from_cases("empty", [])
    assert "| Total | n/a | n/a |" in emit_report(r)


def test_avg_rounds_over_successes_only():
    m = compute_metrics([(True, 1), (True, 2), (False, 9)])
    assert m.avg_rounds == Fraction(3, 2) and m.accuracy == Fraction(2, 3)


def test_attempts_table_rejects_garbage():
    with pytest.raises(AttemptsTableError):
        parse_attempts_table("id,function_calling,code_generation\nB-1,zero,1\n")
    with pytest.raises(AttemptsTableError):
        parse_attempts_table("id,fc\nB-1,1\n")
    rows = parse_attempts_table("id,function_calling,code_generation\nB-1,Failed,2\n")
    assert (rows[0].function_calling, rows[0].code_generation, rows[0].provenance) == (None, 2, "appendix")


# ---------------------------------------------------------------------------
# catalog and reports
# ---------------------------------------------------------------------------

def test_catalog_shape():
    cases = load_catalog()
    assert len(cases) == 70
    assert level_counts(cases) == {"Basic": 40, "Intermediate": 20, "Advanced": 10}
    assert {c.id for c in cases if not c.implementable} == NOT_IMPLEMENTABLE
    assert all(c.provenance == "synthetic" for c in cases)
    for c in cases:
        assert c.implementable == bool(c.plans), c.id


def test_malformed_manifest(tmp_path):
    doc = json.loads(stock_manifest_path().read_text())
    doc["cases"][0].pop("prompt")
    (tmp_path / "m.json").write_text(json.dumps(doc))
    with pytest.raises(CatalogError, match="cases/0"):
        load_catalog(tmp_path / "m.json")
    doc = json.loads(stock_manifest_path().read_text())
    doc["dataset_dir"] = str(stock_manifest_path().parent / "datasets")
    for c in doc["cases"]:
        c.pop("remote", None)
    doc["cases"][2]["id"] = doc["cases"][1]["id"]
    (tmp_path / "m.json").write_text(json.dumps(doc))
    with pytest.raises(CatalogError, match="duplicate"):
        load_catalog(tmp_path / "m.json")
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "absent.json")


def test_report_json_round_trip():
    r = report_from_attempts(attempts_tables(), "CodeGeneration")
    back = BenchmarkReport.from_json(json.loads(emit_report(r, "Json")))
    assert back == r
    assert emit_report(back, "Markdown") == emit_report(r, "Markdown")


def test_markdown_rows():
    md = emit_report(report_from_attempts(attempts_tables(), "FunctionCalling"))
    assert "| Basic Tasks | 92.5% | 1.19 |" in md
    assert "| Advanced Tasks | 60% | 1.50 |" in md
    assert "| Total | 85.71% | 1.27 |" in md


# ---------------------------------------------------------------------------
# live scripted runs
# ---------------------------------------------------------------------------

def _cfg(tmp_path: Path) -> OrchestratorConfig:
    return OrchestratorConfig(workspace_root=tmp_path, script_timeout_ms=60_000)


def test_scripted_suite_reproduces_attempts(tmp_path):
    cases = load_catalog()
    for kind in PUBLISHED:
        report = run_suite(cases, scripted_factory(kind), _cfg(tmp_path / kind), kind, parallel=4)
        want = {c.id: c for c in report_from_attempts(attempts_tables(), kind).cases}
        for got in report.cases:
            if got.id in NOT_IMPLEMENTABLE:
                assert not got.success and got.note == "no plan for this worker"
                continue
            exp = want[got.id]
            assert (got.success, got.rounds if got.success else None) == (exp.success, exp.rounds), (kind, got)


def test_parallel_equals_serial(tmp_path):
    cases = [c for c in load_catalog() if c.level == "Advanced"]
    f = scripted_factory("FunctionCalling")
    a = run_suite(cases, f, _cfg(tmp_path / "a"), "x", parallel=1)
    b = run_suite(cases, f, _cfg(tmp_path / "b"), "x", parallel=4)
    assert a == b


def test_failing_case_reported_after_all_runs(tmp_path):
    case = load_catalog()[0]
    calls = []

    class Broken:
        deterministic = False

        def decide(self, state):
            raise RuntimeError("backend down")

        def revise_script(self, *a):
            return None

    def factory(c):
        calls.append(c.id)
        return Broken()

    res = run_case(case, factory, _cfg(tmp_path))
    assert len(calls) == 5 and res.runs == 5
    assert not res.success and "backend down" in res.note
    r = BenchmarkReport.from_cases("x", [res])
    assert r.total.accuracy_text() == "0%"


def test_case_result_json_round_trip():
    c = CaseResult("B-1", "Basic", False, 2, 5, ("FileExists a: missing",), "checks failed")
    assert CaseResult.from_json(json.loads(json.dumps(c.to_json()))) == c
