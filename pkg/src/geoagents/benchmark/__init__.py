"""Benchmark catalog, suite runner and metrics."""

from __future__ import annotations

from .catalog import (LEVELS, BenchmarkCase, CaseStudy, CatalogError, attempts_tables, level_counts,
                      load_case_studies, load_catalog, stock_manifest_path)
from .checks import Check, CheckResult, evaluate_check
from .metrics import Metrics, compute_metrics, import_paper_attempts, read_attempts_table
from .report import BenchmarkReport, CaseResult, emit_report, report_from_attempts
from .runner import run_case, run_suite, scripted_factory

__all__ = [
    "BenchmarkCase", "BenchmarkReport", "CaseResult", "CaseStudy", "CatalogError", "Check", "CheckResult", "LEVELS", "Metrics",
    "attempts_tables", "compute_metrics", "emit_report", "evaluate_check",
    "import_paper_attempts", "level_counts", "load_case_studies", "load_catalog", "read_attempts_table", "report_from_attempts",
    "run_case", "run_suite", "scripted_factory", "stock_manifest_path",
]
