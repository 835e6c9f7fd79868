"""One test per acceptance criterion, each reporting a PASS/FAIL line."""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from pathlib import Path

import pytest
from pyproj import Transformer

import test_benchmark as tb
import test_ops_geometry as tg
import test_ops_io as tio
import test_ops_proximity as tp
import test_orchestrator as to
import test_registry as tr
from conftest import ACCEPTANCE_LINES
from corpus import corpus
from geoagents.benchmark import (BenchmarkReport, attempts_tables, compute_metrics, import_paper_attempts,
                                 load_case_studies, load_catalog, run_case)
from geoagents.model import CrsRef, parse_geojson, serialize_geojson
from geoagents.orchestrator import OrchestratorConfig
from geoagents.projection import project_point, utm_central_meridian
from geoagents.registry import builtin_registry, emit_docs, parse_docs
from oracles import web_mercator


def record(number: int, title: str, fn, limit_s: float | None = None):
    t0 = time.perf_counter()
    err = None
    try:
        fn()
    except AssertionError as exc:
        err = exc
    secs = time.perf_counter() - t0
    if err is None and limit_s is not None and secs >= limit_s:
        err = AssertionError(f"took {secs:.2f} s, limit {limit_s} s")
    timing = f" ({secs:.2f} s)" if limit_s is not None else ""
    ACCEPTANCE_LINES.append(f"{'PASS' if err is None else 'FAIL'} criterion {number}: {title}{timing}"
                            + ("" if err is None else f": {str(err).splitlines()[0] if str(err) else 'assertion'}"))
    if err is not None:
        raise err


def test_criterion_1_tables():
    def run():
        for kind, cells in tb.PUBLISHED.items():
            rows_by_level = {lvl: import_paper_attempts(p, kind) for lvl, p in attempts_tables().items()}
            rows_by_level["Total"] = [r for rows in rows_by_level.values() for r in rows]
            for lvl, rows in rows_by_level.items():
                m = compute_metrics(rows)
                got = (float(m.accuracy_text().rstrip("%")), float(m.avg_rounds_text()))
                assert got == cells[lvl], (kind, lvl, got)
    record(1, "per-level tables reproduced from attempts", run, limit_s=1.0)


def test_criterion_2_identities():
    def run():
        assert compute_metrics([(True, 1)] * 60 + [(False, None)] * 10).accuracy_text() == "85.71%"
        assert compute_metrics([(True, 1)] * 68 + [(False, None)] * 2).accuracy_text() == "97.14%"
    record(2, "60/70 and 68/70 accuracy identities", run)


def test_criterion_3_geometry_oracles():
    def run():
        tg.check_voronoi(n_seeds=150, n_samples=10_000)
        tg.check_mbr_vs_sweep(n=60)
        tg.check_point_buffer_64gon()
        tg.check_overlay_inclusion_exclusion()
        tg.check_split_area_conservation()
        tp.check_spatial_join()
        tp.check_nearest_join()
        tp.check_count_in_regions()
        tp.check_clusters()
    record(3, "geometry oracle suite", run, limit_s=60.0)


def test_criterion_4_projection():
    def run():
        rng = random.Random(4)
        fwd = Transformer.from_crs(4326, 3857, always_xy=True)
        for _ in range(10_000):
            lon, lat = rng.uniform(-180, 180), rng.uniform(-85, 85)
            got = project_point(CrsRef(4326), CrsRef(3857), (lon, lat))
            assert math.dist(got, web_mercator(lon, lat)) <= 1e-3
            assert math.dist(got, fwd.transform(lon, lat)) <= 1e-3
            back = project_point(CrsRef(3857), CrsRef(4326), got)
            assert abs(back[0] - lon) <= 1e-9 and abs(back[1] - lat) <= 1e-9
        worst = 0.0
        for _ in range(10_000):
            zone, lat = rng.randint(1, 60), rng.uniform(-80, 84)
            lon = utm_central_meridian(zone) + rng.uniform(-3, 3)
            crs = CrsRef.utm(zone, south=lat < 0)
            lon2, lat2 = project_point(crs, CrsRef(4326), project_point(CrsRef(4326), crs, (lon, lat)))
            worst = max(worst, abs((lon2 - lon + 180) % 360 - 180), abs(lat2 - lat))
        assert worst <= 1e-8, worst
    record(4, "projection accuracy and UTM round trip", run)


def test_criterion_5_case_studies(tmp_path):
    def run():
        res = to.check_case_studies(tmp_path)
        rounds = {k: v[0] for k, v in res.items()}
        assert rounds["basic_buffer_fc"] == 1 and rounds["basic_buffer_cg"] == 1
        assert rounds["cafe_bus_fc"] == 4 and rounds["cafe_bus_cg"] == 3
        cg = res["cafe_bus_cg"][2]
        assert [len(r.worker_report.attempts) for r in cg.rounds] == [1, 2, 1]
        assert all(res[k][1] == "Success" for k in ("basic_buffer_fc", "basic_buffer_cg", "cafe_bus_fc",
                                                    "cafe_bus_cg", "population_density_cg"))
        dens = res["population_density_cg"][2]
        src = next(cs for cs in load_case_studies() if cs.name == "population_density_cg").inputs[0]
        assert to.density_mismatch(Path(dens.workspace), src) <= 1e-9
        svg = (Path(dens.workspace) / "pa_density.svg").read_text(encoding="utf-8")
        assert svg.count("<path") == len(json.loads(src.read_text())["features"])
    record(5, "case-study replay", run)


def test_criterion_6_attempt_cap(tmp_path):
    def run():
        assert to.check_attempt_cap(tmp_path / "cap") == (5, "Failed", "Failure")

        class Broken:
            deterministic = False

            def decide(self, state):
                raise RuntimeError("down")

            def revise_script(self, *a):
                return None

        res = run_case(load_catalog()[1], lambda c: Broken(), OrchestratorConfig(workspace_root=tmp_path / "r"))
        assert res.runs == 5 and not res.success
        assert BenchmarkReport.from_cases("x", [res]).total.successes == 0
    record(6, "five-attempt script cap and five task runs", run)


def test_criterion_7_registry(tmp_path):
    def run():
        r = builtin_registry()
        assert r.names() == tr.PUBLISHED_NAMES
        digest = hashlib.sha256("\n".join(tr.PUBLISHED_NAMES).encode("utf-8")).hexdigest()[:16]
        assert digest == "628dd07b5b80bcd8"
        assert parse_docs(emit_docs(r, "Yaml"), "Yaml") == parse_docs(emit_docs(r, "Json"), "Json")
        assert tr.check_dispatch_parity(tmp_path) == 38
    record(7, "function registry", run)


def test_criterion_8_formats(tmp_path):
    def run():
        for doc in corpus(1000):
            text = serialize_geojson(parse_geojson(json.dumps(doc)))
            assert serialize_geojson(parse_geojson(text)) == text
        tio.check_shapefile_round_trip(tmp_path)
        tio.check_export_counts(tmp_path)
    record(8, "format round trips", run)


@pytest.fixture(autouse=True, scope="module")
def _reset_lines():
    ACCEPTANCE_LINES.clear()
    yield
