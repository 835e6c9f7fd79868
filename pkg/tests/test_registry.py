from __future__ import annotations

import json
import random
import shutil
from pathlib import Path

import jsonschema
import pytest

from conftest import lines, points, polygons, rect, write_geojson
from corpus import convex_ring
from geoagents import ops
from geoagents.model import CrsRef, collection_metadata
from geoagents.ops.io import fixture_transport
from geoagents.ops.table import TabularData
from geoagents.registry import (FunctionCall, Workspace, builtin_registry, dispatch, emit_docs, from_tool_schema,
                                parse_docs, registry_from_docs, registry_schema, to_tool_schema, tool_schemas,
                                validate_call)

PUBLISHED_NAMES = [
    "DownloadGeoJSONData", "ReadingDataFromGeoJSON", "AddFieldToGeoDataFrame", "RenameColumnOfGeoDataFrame",
    "SaveAsFinalResult", "TransformProjectionOfGeoDataFrame", "ConvertFileFormat", "VisualizeGeoJSONData",
    "InteractiveEdit", "GroupByOneGeoDataFrames", "MergeDataFrameToGeoDataFrame", "CalculateGeometryLength",
    "ClipGeoDataFrame", "FeatureToLine", "FeatureVerticesToPoints", "FeatureToPolygon", "OverlayAnalysis",
    "CreateMultiRingBufferFromGeoDataFrame", "SpatialAnalysisOfAggregationPoints", "CreateThiessenPolygon",
    "CreateMinPointgroupBorder", "CalculateMainDirectionOfPolygon", "SortPointsbyField",
    "CreateLineConnectingNearestPoints", "CalculateDistanceBetweenPoints", "SummarizeNearestDistances",
    "JoinNearestPoints", "CalculateGeometricCenter", "CountTheQuantityOfSpatialFeatures", "nearest_point_on_line",
    "XYCoordinatesToLine", "SplitPolygonByLine", "CalculatePerpendicularDistanceFromPointToLine",
    "AddXYCoordinates", "SelectRowsFromGeoDataFrame", "FilterRowsByExpression", "SpatialJoinTwoGeoDataFrames",
    "InteractiveQuery", "ExportCoordinateofGeometry", "PlotGeoDataFrameByMatplotlib",
]
REMOTE_URL = "https://data.example.test/points.geojson"


@pytest.fixture(scope="module")
def registry():
    return builtin_registry()


def test_catalog_names_exact(registry):
    assert len(registry) == 40
    assert registry.names() == PUBLISHED_NAMES
    assert [s.name for s in registry if not s.implemented] == ["InteractiveEdit", "InteractiveQuery"]


def test_docs_yaml_equals_json(registry):
    y = parse_docs(emit_docs(registry, "Yaml"), "Yaml")
    j = parse_docs(emit_docs(registry, "Json"), "Json")
    assert y == j
    jsonschema.validate(j, registry_schema())
    assert registry_from_docs(y).to_json() == registry.to_json()


def test_examples_validate(registry):
    for s in registry:
        ex = json.loads(s.example)
        assert ex["name"] == s.name
        assert validate_call(registry, ex).ok, s.name


def test_tool_schema_round_trip(registry):
    for s in registry:
        assert from_tool_schema(to_tool_schema(s)) == s
    assert len(tool_schemas(registry, implemented_only=True)) == 38


def _messages(vc):
    return [str(v) for v in vc.violations]


def test_validation_violations(registry):
    assert _messages(validate_call(registry, {"name": "Nope", "arguments": {}})) == ["unknown function: Nope"]
    vc = validate_call(registry, {"name": "CreateMultiRingBufferFromGeoDataFrame",
                                  "arguments": {"input_path": "a.geojson", "distances": ["5"], "bogus": 1}})
    msgs = _messages(vc)
    assert "missing: output_path" in msgs
    assert "unknown argument: bogus" in msgs
    assert any(m.startswith("type:") for m in msgs)


def test_validation_is_strict_about_numbers(registry):
    vc = validate_call(registry, {"name": "SpatialAnalysisOfAggregationPoints",
                                  "arguments": {"input_path": "a.geojson", "threshold": "5", "output_path": "b.geojson"}})
    assert not vc.ok


def test_validation_checks_fields_against_metadata(registry, tmp_path):
    ws = Workspace(tmp_path)
    write_geojson(tmp_path / "rain.geojson", points([(0, 0)], p=[1.0]))
    call = {"name": "SortPointsbyField", "arguments": {"input_path": "rain.geojson", "field": "precip",
                                                       "output_path": "s.geojson"}}
    assert any(m.startswith("field:") for m in _messages(validate_call(registry, call, ws.metadata)))
    call["arguments"]["field"] = "p"
    assert validate_call(registry, call, ws.metadata).ok


def test_path_escape_rejected(registry, tmp_path):
    ws = Workspace(tmp_path / "ws")
    (tmp_path / "ws").mkdir()
    res = dispatch(registry, {"name": "ReadingDataFromGeoJSON", "arguments": {"input_path": "../../etc/passwd"}}, ws)
    assert res.status == "Error" and res.error["code"] == "path_escape"


def test_not_implemented(registry, tmp_path):
    res = dispatch(registry, {"name": "InteractiveQuery", "arguments": {"input_path": "a.geojson"}}, Workspace(tmp_path))
    assert res.error["code"] == "not_implemented"


def test_library_error_becomes_error_result(registry, tmp_path):
    write_geojson(tmp_path / "pts.geojson", points([(0, 0)], crs=CrsRef.wgs84()))
    res = dispatch(registry, {"name": "CreateMultiRingBufferFromGeoDataFrame",
                              "arguments": {"input_path": "pts.geojson", "distances": [5], "output_path": "b.geojson"}},
                   Workspace(tmp_path))
    assert res.status == "Error" and res.error["code"] == "geographic_crs"


# ---------------------------------------------------------------------------
# dispatch vs direct call
# ---------------------------------------------------------------------------

def build_fixture_workspace(root: Path) -> None:
    rng = random.Random(79)
    root.mkdir(parents=True, exist_ok=True)
    n = 14
    pts = points([(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)],
                 id=list(range(n)), g=[rng.choice("ab") for _ in range(n)], p=[rng.uniform(0, 100) for _ in range(n)])
    write_geojson(root / "pts.geojson", pts)
    rings = [convex_ring(rng, rng.uniform(20, 80), rng.uniform(20, 80), rng.uniform(15, 30)) for _ in range(4)]
    write_geojson(root / "polys.geojson", polygons(rings, name=["n0", "n1", "n2", "n3"], key=["k0", "k1", "k2", "k9"]))
    write_geojson(root / "polys2.geojson", polygons([rect(0, 0, 50, 50), rect(40, 40, 100, 90)]))
    write_geojson(root / "lines.geojson", lines([((0, 10), (100, 30)), ((50, 0), (60, 100), (90, 95)),
                                                 ((10, 90), (95, 60))], road=["r0", "r1", "r2"]))
    write_geojson(root / "boundary.geojson", lines([((0, 0), (10, 0), (10, 10), (0, 10), (0, 0)),
                                                    ((20, 0), (21, 1), (22, 0)), ((20, 0), (21, -1), (22, 0))]))
    (root / "table.csv").write_text("key,v,label\nk0,1,x\nk1,2.5,y\nk0,7,dup\n", encoding="utf-8")
    near = ops.nearest_join(ops.add_xy_fields(pts), pts, exclude_self=True)
    write_geojson(root / "near.geojson", near)
    write_geojson(root / "counties.geojson", polygons([rect(0, 0, 10, 10), rect(10, 0, 20, 10), rect(0, 10, 10, 20),
                                                       rect(10, 10, 20, 20)],
                                                      Population=[1000, 5000, 250, 12000], ALAND=[1e8, 1e8, 1e8, 1e8]))


def _rd(ws, name):
    return ops.read_collection(ws / name)


def _save(data, path):
    return ops.save_result(data, path)


def _direct_cases():
    """name -> (arguments, direct implementation writing into the workspace root)."""
    P = "pts.geojson"
    return {
        "DownloadGeoJSONData": (
            {"url": REMOTE_URL, "output_path": "out/dl.geojson"},
            lambda w, t: _save(ops.fetch_remote_collection(REMOTE_URL, t), w / "out/dl.geojson")),
        "AddFieldToGeoDataFrame": (
            {"input_path": "counties.geojson", "field_name": "population_density",
             "expression": "Population / (ALAND / 1000000)", "output_path": "out/dens.geojson"},
            lambda w, t: _save(ops.add_field(_rd(w, "counties.geojson"), "population_density",
                                             expression="Population / (ALAND / 1000000)"), w / "out/dens.geojson")),
        "RenameColumnOfGeoDataFrame": (
            {"input_path": P, "old_names": ["p", "g"], "new_names": ["g", "precip"], "output_path": "out/ren.geojson"},
            lambda w, t: _save(ops.rename_fields(_rd(w, P), {"p": "g", "g": "precip"}), w / "out/ren.geojson")),
        "SaveAsFinalResult": (
            {"input_path": P, "output_path": "out/final.shp"},
            lambda w, t: _save(_rd(w, P), w / "out/final.shp")),
        "TransformProjectionOfGeoDataFrame": (
            {"input_path": P, "target_crs": "EPSG:4326", "output_path": "out/wgs.geojson"},
            lambda w, t: _save(ops.reproject(_rd(w, P), "EPSG:4326"), w / "out/wgs.geojson")),
        "ConvertFileFormat": (
            {"input_path": "lines.geojson", "output_path": "out/lines.csv"},
            lambda w, t: ops.convert_format(w / "lines.geojson", w / "out/lines.csv")),
        "VisualizeGeoJSONData": (
            {"input_path": "polys.geojson", "output_path": "out/map.svg", "title": "Polys"},
            lambda w, t: ops.render_map_svg([(_rd(w, "polys.geojson"), None)], w / "out/map.svg", "Polys")),
        "GroupByOneGeoDataFrames": (
            {"input_path": P, "by": "g", "aggregations": ["p:sum", "p:mean", "id:count"], "output_path": "out/g.csv"},
            lambda w, t: _save(ops.group_aggregate(_rd(w, P), "g", [("p", "sum"), ("p", "mean"), ("id", "count")]),
                               w / "out/g.csv")),
        "MergeDataFrameToGeoDataFrame": (
            {"input_path": "polys.geojson", "table_path": "table.csv", "geo_key": "key", "table_key": "key",
             "output_path": "out/merge.geojson"},
            lambda w, t: _save(ops.attribute_join(_rd(w, "polys.geojson"), ops.read_tabular(w / "table.csv"), "key",
                                                  "key").collection, w / "out/merge.geojson")),
        "CalculateGeometryLength": (
            {"input_path": "lines.geojson", "output_path": "out/len.geojson", "field_name": "len_m"},
            lambda w, t: _save(ops.geometry_length(_rd(w, "lines.geojson"), "len_m"), w / "out/len.geojson")),
        "ClipGeoDataFrame": (
            {"input_path": "lines.geojson", "mask_path": "polys.geojson", "output_path": "out/clip.geojson"},
            lambda w, t: _save(ops.clip(_rd(w, "lines.geojson"), _rd(w, "polys.geojson")), w / "out/clip.geojson")),
        "FeatureToLine": (
            {"input_path": "polys.geojson", "output_path": "out/ftl.geojson"},
            lambda w, t: _save(ops.features_to_lines(_rd(w, "polys.geojson")), w / "out/ftl.geojson")),
        "FeatureVerticesToPoints": (
            {"input_path": "lines.geojson", "output_path": "out/v.geojson"},
            lambda w, t: _save(ops.vertices_to_points(_rd(w, "lines.geojson")), w / "out/v.geojson")),
        "FeatureToPolygon": (
            {"input_path": "boundary.geojson", "output_path": "out/faces.geojson"},
            lambda w, t: _save(ops.lines_to_polygons(_rd(w, "boundary.geojson")), w / "out/faces.geojson")),
        "OverlayAnalysis": (
            {"input_path": "polys.geojson", "overlay_path": "polys2.geojson", "mode": "Union",
             "output_path": "out/ov.geojson"},
            lambda w, t: _save(ops.overlay(_rd(w, "polys.geojson"), _rd(w, "polys2.geojson"), "Union"),
                               w / "out/ov.geojson")),
        "CreateMultiRingBufferFromGeoDataFrame": (
            {"input_path": P, "distances": [5, 12.5], "output_path": "out/buf.geojson"},
            lambda w, t: _save(ops.buffer(_rd(w, P), [5, 12.5]), w / "out/buf.geojson")),
        "SpatialAnalysisOfAggregationPoints": (
            {"input_path": P, "threshold": 20, "output_path": "out/cl.geojson"},
            lambda w, t: _save(ops.cluster_points(_rd(w, P), 20), w / "out/cl.geojson")),
        "CreateThiessenPolygon": (
            {"input_path": P, "output_path": "out/vor.geojson"},
            lambda w, t: _save(ops.voronoi(_rd(w, P)), w / "out/vor.geojson")),
        "CreateMinPointgroupBorder": (
            {"input_path": P, "output_path": "out/mbg.geojson", "kind": "ConvexHull", "group_field": "g"},
            lambda w, t: _save(ops.min_bounding_geometry(_rd(w, P), "ConvexHull", "g"), w / "out/mbg.geojson")),
        "CalculateMainDirectionOfPolygon": (
            {"input_path": "polys.geojson", "output_path": "out/dir.geojson"},
            lambda w, t: _save(ops.main_direction(_rd(w, "polys.geojson")), w / "out/dir.geojson")),
        "SortPointsbyField": (
            {"input_path": "near.geojson", "field": "NEAR_DIST", "order": "Desc", "output_path": "out/sort.geojson"},
            lambda w, t: _save(ops.sort_by_field(_rd(w, "near.geojson"), "NEAR_DIST", "desc"), w / "out/sort.geojson")),
        "CreateLineConnectingNearestPoints": (
            {"input_path": P, "output_path": "out/pair.geojson"},
            lambda w, t: _save(ops.connect_nearest_pair(_rd(w, P)), w / "out/pair.geojson")),
        "CalculateDistanceBetweenPoints": (
            {"input_path": P, "output_path": "out/pd.csv"},
            lambda w, t: _save(ops.pairwise_distances(_rd(w, P)), w / "out/pd.csv")),
        "SummarizeNearestDistances": (
            {"input_path": "near.geojson", "output_path": "out/sum.json", "group_field": "g"},
            lambda w, t: _save(ops.summarize_nearest(_rd(w, "near.geojson"), "NEAR_DIST", "g"), w / "out/sum.json")),
        "JoinNearestPoints": (
            {"input_path": P, "near_path": "lines.geojson", "output_path": "out/nj.geojson"},
            lambda w, t: _save(ops.nearest_join(_rd(w, P), _rd(w, "lines.geojson")), w / "out/nj.geojson")),
        "CalculateGeometricCenter": (
            {"input_path": "polys.geojson", "output_path": "out/ctr.geojson", "mode": "RepresentativePoint"},
            lambda w, t: _save(ops.centroid_points(_rd(w, "polys.geojson"), "RepresentativePoint"),
                               w / "out/ctr.geojson")),
        "CountTheQuantityOfSpatialFeatures": (
            {"points_path": P, "regions_path": "polys.geojson", "output_path": "out/cnt.geojson", "count_field": "n"},
            lambda w, t: _save(ops.count_in_regions(_rd(w, P), _rd(w, "polys.geojson"), "n"), w / "out/cnt.geojson")),
        "nearest_point_on_line": (
            {"input_path": P, "line_path": "lines.geojson", "output_path": "out/snap.geojson"},
            lambda w, t: _save(ops.nearest_point_on_line(_rd(w, P), _rd(w, "lines.geojson")), w / "out/snap.geojson")),
        "XYCoordinatesToLine": (
            {"input_path": "near.geojson", "output_path": "out/xy.geojson"},
            lambda w, t: _save(ops.coord_pairs_to_lines(_rd(w, "near.geojson")), w / "out/xy.geojson")),
        "SplitPolygonByLine": (
            {"input_path": "polys.geojson", "line_path": "lines.geojson", "output_path": "out/split.geojson"},
            lambda w, t: _save(ops.split_polygon_by_line(_rd(w, "polys.geojson"), _rd(w, "lines.geojson")),
                               w / "out/split.geojson")),
        "CalculatePerpendicularDistanceFromPointToLine": (
            {"input_path": P, "line_path": "lines.geojson", "output_path": "out/pld.csv"},
            lambda w, t: _save(ops.point_line_distance(_rd(w, P), _rd(w, "lines.geojson")), w / "out/pld.csv")),
        "AddXYCoordinates": (
            {"input_path": P, "output_path": "out/axy.geojson"},
            lambda w, t: _save(ops.add_xy_fields(_rd(w, P)), w / "out/axy.geojson")),
        "SelectRowsFromGeoDataFrame": (
            {"input_path": P, "output_path": "out/sel.geojson", "indices": [5, 0, 3]},
            lambda w, t: _save(ops.select_rows(_rd(w, P), [5, 0, 3]), w / "out/sel.geojson")),
        "FilterRowsByExpression": (
            {"input_path": P, "expression": "p > 50 and g == 'a'", "output_path": "out/flt.geojson"},
            lambda w, t: _save(ops.filter_rows(_rd(w, P), "p > 50 and g == 'a'"), w / "out/flt.geojson")),
        "SpatialJoinTwoGeoDataFrames": (
            {"input_path": P, "join_path": "polys.geojson", "output_path": "out/sj.geojson", "predicate": "Within"},
            lambda w, t: _save(ops.spatial_join(_rd(w, P), _rd(w, "polys.geojson"), "Within"), w / "out/sj.geojson")),
        "ExportCoordinateofGeometry": (
            {"input_path": "polys.geojson", "output_path": "out/coords.csv"},
            lambda w, t: ops.export_coordinates(_rd(w, "polys.geojson"), w / "out/coords.csv")),
        "PlotGeoDataFrameByMatplotlib": (
            {"input_path": "counties.geojson", "output_path": "out/plot.svg", "column": "Population", "classes": 4,
             "extra_layers": ["lines.geojson"], "title": "Counties"},
            lambda w, t: ops.render_map_svg(
                [(_rd(w, "counties.geojson"), {"choropleth": "Population", "classes": 4}),
                 (_rd(w, "lines.geojson"), {"fill": "none", "stroke": "#636363"})], w / "out/plot.svg", "Counties")),
    }


def _tree_bytes(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def check_dispatch_parity(tmp_path: Path) -> int:
    """Returns the number of implemented functions checked."""
    r = builtin_registry()
    base = tmp_path / "base"
    build_fixture_workspace(base)
    cases = _direct_cases()
    checked = 0
    for spec in r:
        if not spec.implemented:
            continue
        a_root, b_root = tmp_path / spec.name / "dispatch", tmp_path / spec.name / "direct"
        shutil.copytree(base, a_root)
        shutil.copytree(base, b_root)
        transport = fixture_transport({REMOTE_URL: base / "pts.geojson"})
        if spec.name == "ReadingDataFromGeoJSON":
            res = dispatch(r, {"name": spec.name, "arguments": {"input_path": "pts.geojson"}}, Workspace(a_root))
            assert res.ok
            table = next(o.payload for o in res.outputs if o.kind == "table")
            want = collection_metadata(ops.read_collection(b_root / "pts.geojson"), "pts.geojson").to_json()
            assert json.dumps(table, sort_keys=True) == json.dumps(want, sort_keys=True)
            checked += 1
            continue
        args, direct = cases[spec.name]
        (b_root / "out").mkdir()
        res = dispatch(r, FunctionCall(spec.name, args), Workspace(a_root, transport))
        assert res.ok, (spec.name, res.error)
        direct(b_root, transport)
        a_files, b_files = _tree_bytes(a_root / "out"), _tree_bytes(b_root / "out")
        assert a_files and a_files.keys() == b_files.keys(), spec.name
        for k in a_files:
            assert a_files[k] == b_files[k], (spec.name, k)
        checked += 1
    return checked


def test_dispatch_matches_direct_calls(tmp_path):
    assert check_dispatch_parity(tmp_path) == 38


def test_dispatch_outputs_list_files(registry, tmp_path):
    build_fixture_workspace(tmp_path)
    res = dispatch(registry, {"name": "SaveAsFinalResult",
                              "arguments": {"input_path": "pts.geojson", "output_path": "final/r.shp"}},
                   Workspace(tmp_path))
    assert sorted(res.files()) == ["final/r.dbf", "final/r.shp", "final/r.shx"]


def test_table_save_in_workspace(registry, tmp_path):
    build_fixture_workspace(tmp_path)
    res = dispatch(registry, {"name": "SaveAsFinalResult",
                              "arguments": {"input_path": "table.csv", "output_path": "t.json"}}, Workspace(tmp_path))
    assert res.ok
    t = TabularData(**{k: tuple(v) for k, v in json.loads((tmp_path / "t.json").read_text()).items()})
    assert t.column("key") == ["k0", "k1", "k0"]
