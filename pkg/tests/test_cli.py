from __future__ import annotations

import json
import subprocess
import sys

import yaml

from conftest import DATASETS, points, write_geojson
from geoagents.cli import EXIT_ABORT, EXIT_FAIL, EXIT_INVALID, EXIT_OK, main
from geoagents.ops import buffer, read_collection, save_result
from geoagents.registry import builtin_registry, parse_docs


def cli(*argv):
    return subprocess.run([sys.executable, "-m", "geoagents.cli", *argv], capture_output=True, text=True, timeout=300)


def test_subprocess_help_and_bad_command():
    assert cli("--help").returncode == 0
    assert cli("nope").returncode == 2


def test_op_matches_direct_call(tmp_path, capsys):
    src = tmp_path / "pts.geojson"
    write_geojson(src, points([(0, 0), (5, 5)], id=[1, 2]))
    args = json.dumps({"input_path": "pts.geojson", "distances": [2, 4], "output_path": "buf.geojson"})
    rc = main(["op", "CreateMultiRingBufferFromGeoDataFrame", "--args", args, "--in", str(src),
               "--out", str(tmp_path / "ws")])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "Ok"
    save_result(buffer(read_collection(src), [2, 4]), tmp_path / "direct.geojson")
    assert (tmp_path / "ws" / "buf.geojson").read_bytes() == (tmp_path / "direct.geojson").read_bytes()


def test_op_invalid_and_failed(tmp_path, capsys):
    assert main(["op", "CreateMultiRingBufferFromGeoDataFrame", "--args", "{}", "--out", str(tmp_path)]) == EXIT_INVALID
    assert json.loads(capsys.readouterr().out)["status"] == "Invalid"
    assert main(["op", "Sort", "--args", "not json", "--out", str(tmp_path)]) == EXIT_INVALID
    capsys.readouterr()
    rc = main(["op", "ReadingDataFromGeoJSON", "--args", json.dumps({"input_path": "missing.geojson"}),
               "--out", str(tmp_path)])
    assert rc == EXIT_FAIL
    assert json.loads(capsys.readouterr().out)["status"] == "Error"


def _plan(tmp_path, steps, kind="CodeGeneration"):
    p = tmp_path / "plan.json"
    p.write_text(json.dumps({"task_id": "t", "worker_kind": kind, "steps": steps}))
    return str(p)


def test_run_writes_transcript(tmp_path):
    plan = _plan(tmp_path, [{"instruction": "a", "script": "print(1)\n"},
                            {"instruction": "b", "script": "open('x.txt','w').write('1')\n", "fail_times": 1}])
    r = cli("run", "--goal", "demo", "--planner", f"scripted:{plan}", "--workspace-root", str(tmp_path / "ws"))
    assert r.returncode == EXIT_OK, r.stderr
    summary = json.loads(r.stdout)
    lines = [json.loads(x) for x in open(summary["transcript"], encoding="utf-8")]
    assert [x["type"] for x in lines] == ["round", "round", "summary"]
    assert [len(x["worker_report"]["attempts"]) for x in lines[:2]] == [1, 2]
    assert summary["produced_files"] == ["x.txt"]


def test_run_five_injected_failures_exits_1(tmp_path, capsys):
    plan = _plan(tmp_path, [{"instruction": "a", "script": "print(1)\n", "fail_times": 5}])
    rc = main(["run", "--goal", "demo", "--planner", f"scripted:{plan}", "--workspace-root", str(tmp_path / "ws")])
    assert rc == EXIT_FAIL
    summary = json.loads(capsys.readouterr().out)
    assert summary["outcome"] == "Failure"
    rounds = [json.loads(x) for x in open(summary["transcript"], encoding="utf-8")][0]
    assert len(rounds["worker_report"]["attempts"]) == 5


def test_run_bad_planner_spec(tmp_path):
    assert main(["run", "--goal", "g", "--planner", "magic", "--workspace-root", str(tmp_path)]) == EXIT_ABORT
    assert main(["run", "--goal", "g", "--planner", f"scripted:{tmp_path / 'none.json'}",
                 "--workspace-root", str(tmp_path)]) == EXIT_ABORT


def test_run_llm_without_credentials_aborts(tmp_path, monkeypatch):
    cfg = tmp_path / "g.ini"
    cfg.write_text("[profile.default]\nbase_url = http://127.0.0.1:9/v1\nmodel = m\n"
                   "credentials_env = GEOAGENTS_TEST_UNSET_KEY\n")
    monkeypatch.delenv("GEOAGENTS_TEST_UNSET_KEY", raising=False)
    rc = main(["--config", str(cfg), "run", "--goal", "g", "--planner", "llm:default",
               "--workspace-root", str(tmp_path / "ws")])
    assert rc == EXIT_ABORT


def test_bench_attempts(capsys):
    assert main(["bench", "--planner", "attempts:FunctionCalling"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "| Total | 85.71% | 1.27 |" in out
    assert main(["bench", "--planner", "attempts:cg", "--format", "Json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["total"]["accuracy"] == "97.14%" and doc["total"]["avg_rounds"] == "1.35"


def test_bench_empty_manifest(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"cases": []}))
    assert main(["bench", "--manifest", str(m), "--workspace-root", str(tmp_path / "ws")]) == EXIT_OK
    assert "| Total | n/a | n/a |" in capsys.readouterr().out


def test_bench_selected_cases(tmp_path, capsys):
    rc = main(["bench", "--planner", "scripted:cg", "--cases", "B-2", "B-3", "--format", "Json",
               "--workspace-root", str(tmp_path)])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [(c["id"], c["success"]) for c in doc["cases"]] == [("B-2", True), ("B-3", True)]


def test_bench_bad_manifest_aborts(tmp_path):
    (tmp_path / "m.json").write_text("{")
    assert main(["bench", "--manifest", str(tmp_path / "m.json")]) == EXIT_ABORT


def test_registry_yaml_and_json(capsys):
    assert main(["registry", "--emit", "yaml"]) == EXIT_OK
    y = yaml.safe_load(capsys.readouterr().out)
    assert main(["registry", "--emit", "json"]) == EXIT_OK
    j = json.loads(capsys.readouterr().out)
    assert y == j
    assert [f["name"] for f in parse_docs(json.dumps(j), "Json")["functions"]] == builtin_registry().names()


def test_convert_and_metrics(tmp_path, capsys):
    out = tmp_path / "roads.shp"
    assert main(["convert", str(DATASETS / "Nigeria_Major_Roads.geojson"), str(out)]) == EXIT_OK
    assert out.exists() and out.with_suffix(".dbf").exists()
    capsys.readouterr()
    from geoagents.benchmark import attempts_tables
    tables = [str(p) for p in attempts_tables().values()]
    assert main(["metrics", *tables, "--worker", "fc"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [t["accuracy"] for t in doc["tables"]] == ["92.5%", "85%", "60%"]
    assert doc["total"]["accuracy"] == "85.71%"
