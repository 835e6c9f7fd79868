from __future__ import annotations

import csv
import json
import math
import random
import re
from pathlib import Path

import httpx
import pytest
import shapefile as pyshp

from conftest import DATA, DATASETS, lines, points, polygons, write_geojson
from corpus import convex_ring
from geoagents.errors import FileFormatError, GeoWarning, HTTPStatusError
from geoagents.model import CrsRef, Feature, FeatureCollection, Geometry, parse_geojson, ring_signed_area
from geoagents.ops import (LayerStyle, add_field, convert_format, export_coordinates, fetch_remote_collection,
                           read_collection, read_tabular, render_chart_svg, render_map_svg, save_result)
from geoagents.ops.io import fixture_transport
from geoagents.ops.render import quantile_breaks
from geoagents.ops.shapefile import read_shapefile, write_shapefile
from geoagents.ops.table import TabularData

GOLDEN = Path(__file__).parent / "golden"


# ---------------------------------------------------------------------------
# read / save / convert
# ---------------------------------------------------------------------------

def test_read_examples(tmp_path, US):
    assert len(read_collection(write_geojson(tmp_path / "us.geojson", US))) == 1
    with pytest.raises(Exception):
        read_collection(tmp_path / "missing.geojson")


def test_save_geojson_golden(tmp_path, US):
    rep = save_result(US, tmp_path / "us.geojson")
    assert (tmp_path / "us.geojson").read_bytes() == (GOLDEN / "us.geojson").read_bytes()
    assert (rep.format, rep.records) == ("geojson", 1)
    assert read_collection(tmp_path / "us.geojson") == US


def test_save_csv_with_wkt(tmp_path, TRI):
    c = TRI.with_features([f.with_properties({"p": i}) for i, f in enumerate(TRI)])
    save_result(c, tmp_path / "tri.csv")
    rows = list(csv.DictReader((tmp_path / "tri.csv").open()))
    assert [r["p"] for r in rows] == ["0", "1", "2"]
    assert rows[1]["geometry"] == "POINT (1 0)"


def test_save_table_csv_round_trip(tmp_path):
    t = TabularData.from_rows([{"a": 1, "b": "x"}, {"a": 2.5, "b": None}])
    save_result(t, tmp_path / "t.csv")
    assert read_tabular(tmp_path / "t.csv") == t


def test_convert_examples(tmp_path, US):
    src = write_geojson(tmp_path / "us.geojson", US)
    rep = convert_format(src, tmp_path / "us.shp")
    assert all(Path(p).exists() for p in rep.paths) and rep.records == 1
    assert len(rep.paths) == 3
    convert_format(src, tmp_path / "copy.geojson")
    assert read_collection(tmp_path / "copy.geojson") == US
    with pytest.raises(FileFormatError):
        convert_format(tmp_path / "us.shp", tmp_path / "x.csv")


def test_convert_benchmark_roads(tmp_path):
    src = DATASETS / "Nigeria_Major_Roads.geojson"
    convert_format(src, tmp_path / "roads.shp")
    assert len(pyshp.Reader(str(tmp_path / "roads.shp")).shapes()) == len(read_collection(src))


# ---------------------------------------------------------------------------
# shapefile vs an independent reader
# ---------------------------------------------------------------------------

def pyshp_geometry(shape) -> Geometry | None:
    """Convert a pyshp shape to a Geometry: clockwise rings start new polygons."""
    st = shape.shapeType
    if st == pyshp.NULL:
        return None
    pts = [tuple(map(float, p)) for p in shape.points]
    if st == pyshp.POINT:
        return Geometry("Point", pts[0])
    if st == pyshp.MULTIPOINT:
        return Geometry("MultiPoint", tuple(pts))
    bounds = list(shape.parts) + [len(pts)]
    parts = [pts[a:b] for a, b in zip(bounds, bounds[1:])]
    if st == pyshp.POLYLINE:
        return Geometry("LineString", parts[0]) if len(parts) == 1 else Geometry("MultiLineString", parts)
    polys: list = []
    for ring in parts:
        if ring_signed_area(ring) < 0 or not polys:
            polys.append([ring])
        else:
            polys[-1].append(ring)
    return Geometry("Polygon", polys[0]) if len(polys) == 1 else Geometry("MultiPolygon", polys)


def positions_close(a: Geometry | None, b: Geometry | None, tol=1e-9) -> bool:
    if a is None or b is None:
        return a is b
    if a.kind != b.kind:
        return False
    pa, pb = list(a.positions()), list(b.positions())
    return len(pa) == len(pb) and all(math.dist(p, q) <= tol * max(1.0, abs(p[0]), abs(p[1])) for p, q in zip(pa, pb))


def _values_close(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a is not None and b is not None and math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
    return a == b


def random_family(rng, family: str, n: int) -> FeatureCollection:
    feats = []
    for i in range(n):
        cx, cy = rng.uniform(-1e5, 1e5), rng.uniform(-1e5, 1e5)
        if family == "point":
            g = Geometry.point(cx, cy)
        elif family == "multipoint":
            g = Geometry("MultiPoint", tuple((cx + rng.random(), cy + rng.random()) for _ in range(rng.randint(1, 4))))
        elif family == "line":
            g = Geometry.line([(cx + rng.uniform(-9, 9), cy + rng.uniform(-9, 9)) for _ in range(rng.randint(2, 6))])
        else:
            outer = convex_ring(rng, cx, cy, rng.uniform(5, 50))
            hole = convex_ring(rng, cx, cy, 1.0)
            g = Geometry.polygon(outer, hole) if rng.random() < 0.5 else Geometry.polygon(outer)
        props = {"i": i, "x": round(rng.uniform(-1e3, 1e3), 6), "s": rng.choice(["a", "Ωmega", "", "long text"]),
                 "maybe": rng.choice([None, 1.5, -2.25])}
        feats.append(Feature(props, g))
    return FeatureCollection(tuple(feats), CrsRef.utm(17))


def check_shapefile_round_trip(tmp_path, seed=67):
    rng = random.Random(seed)
    for family in ("point", "multipoint", "line", "polygon"):
        c = random_family(rng, family, 25)
        base = tmp_path / f"{family}.shp"
        rep = write_shapefile(c, base)
        assert rep.record_count == 25
        reader = pyshp.Reader(str(base), encoding="utf-8")
        for f, shape, rec in zip(c, reader.shapes(), reader.records()):
            assert positions_close(f.geometry, pyshp_geometry(shape))
            for k, v in f.properties.items():
                assert _values_close(v, rec[k])
        ours = read_shapefile(base)
        for a, b in zip(c, ours):
            assert positions_close(a.geometry, b.geometry)
            assert a.properties.keys() == b.properties.keys()
            assert all(_values_close(a.properties[k], b.properties[k]) for k in a.properties)


def test_shapefile_round_trip(tmp_path):
    check_shapefile_round_trip(tmp_path)


def test_shapefile_us_and_determinism(tmp_path, US):
    write_shapefile(US, tmp_path / "a.shp")
    write_shapefile(US, tmp_path / "b.shp")
    for ext in (".shp", ".shx", ".dbf"):
        assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()
    back = read_shapefile(tmp_path / "a.shp", crs=US.crs)
    assert back == US


def test_shapefile_long_names_renamed(tmp_path):
    c = points([(0, 0)], population_density=[1.0], population_total=[2])
    with pytest.warns(GeoWarning):
        rep = write_shapefile(c, tmp_path / "p.shp")
    assert set(rep.renamed_fields) == {"population_density", "population_total"}
    names = [f[0] for f in pyshp.Reader(str(tmp_path / "p.shp")).fields[1:]]
    assert len(set(names)) == 2 and all(len(n) <= 10 for n in names)


def test_shapefile_mixed_families_rejected(tmp_path):
    c = FeatureCollection((Feature({}, Geometry.point(0, 0)), Feature({}, Geometry.line([(0, 0), (1, 1)]))))
    with pytest.raises(FileFormatError):
        write_shapefile(c, tmp_path / "m.shp")


# ---------------------------------------------------------------------------
# coordinate export
# ---------------------------------------------------------------------------

def _export_rows(tmp_path, c):
    export_coordinates(c, tmp_path / "xy.csv")
    return list(csv.DictReader((tmp_path / "xy.csv").open()))


def test_export_examples(tmp_path, US):
    assert len(_export_rows(tmp_path, US)) == 5
    assert len(_export_rows(tmp_path, points([(3, 4)]))) == 1


def check_export_counts(tmp_path, seed=71):
    rng = random.Random(seed)
    for family in ("point", "multipoint", "line", "polygon"):
        c = random_family(rng, family, 15)
        raw = sum(len(list(f.geometry.positions())) for f in c)
        rows = _export_rows(tmp_path, c)
        assert len(rows) == raw
        assert {int(r["feature_id"]) for r in rows} == set(range(15))


def test_export_row_count_oracle(tmp_path):
    check_export_counts(tmp_path)


# ---------------------------------------------------------------------------
# fetch
# ---------------------------------------------------------------------------

def test_fetch_examples(tmp_path, US):
    empty = tmp_path / "empty.geojson"
    empty.write_text('{"type":"FeatureCollection","features":[]}')
    fixture = write_geojson(tmp_path / "us.geojson", US)
    t = fixture_transport({"https://x.test/empty": empty, "https://x.test/us": fixture})
    assert len(fetch_remote_collection("https://x.test/empty", t)) == 0
    assert fetch_remote_collection("https://x.test/us", t) == US
    with pytest.raises(HTTPStatusError) as ei:
        fetch_remote_collection("https://x.test/missing", t)
    assert ei.value.status == 404


def test_fetch_with_plain_mock_transport():
    body = json.dumps({"type": "Point", "coordinates": [1, 2]})
    t = httpx.MockTransport(lambda req: httpx.Response(200, text=body))
    assert fetch_remote_collection("http://h.test/p", t)[0].geometry.coordinates == (1.0, 2.0)


def test_remote_building_fixture():
    c = parse_geojson((DATA / "remote" / "pennsylvania_buildings.geojson").read_bytes())
    assert len(c) > 0


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def test_map_golden(tmp_path, US):
    render_map_svg([(US, None)], tmp_path / "us.svg")
    assert (tmp_path / "us.svg").read_bytes() == (GOLDEN / "us_default.svg").read_bytes()


def test_map_path_count_equals_features(tmp_path):
    rng = random.Random(73)
    polys = polygons([convex_ring(rng, rng.uniform(0, 50), rng.uniform(0, 50), 3) for _ in range(17)])
    pts = points([(rng.uniform(0, 50), rng.uniform(0, 50)) for _ in range(9)])
    ln = lines([((0, 0), (50, 50))])
    render_map_svg([(polys, None), (pts, LayerStyle(marker_radius=1)), (ln, {"stroke": "#000"})], tmp_path / "m.svg")
    text = (tmp_path / "m.svg").read_text()
    assert text.count("<path") == 17 + 9 + 1


def test_choropleth_quantile_classes(tmp_path):
    counties = read_collection(DATASETS / "PennsylvaniaCounties.geojson")
    dens = add_field(counties, "population_density", expression="Population / (ALAND / 1000000)")
    render_map_svg([(dens, {"choropleth": "population_density", "classes": 4})], tmp_path / "c.svg")
    text = (tmp_path / "c.svg").read_text()
    fills = re.findall(r'<path d="[^"]*" fill="(#[0-9a-f]{6})"', text)
    vals = [f.properties["population_density"] for f in dens]
    breaks = quantile_breaks(vals, 4)
    cls = [next(k for k, b in enumerate(breaks) if v <= b) for v in vals]
    # same class <=> same colour
    assert all((cls[i] == cls[j]) == (fills[i] == fills[j]) for i in range(len(vals)) for j in range(len(vals)))
    assert len(set(fills)) == len(set(cls))


def test_quantile_breaks_nearest_rank():
    assert quantile_breaks(list(range(8)), 4) == [1, 3, 5, 7]
    assert quantile_breaks([5, 5, 5], 3) == [5]


def test_style_classes_bounds():
    with pytest.raises(Exception):
        LayerStyle.from_mapping({"choropleth": "v", "classes": 10})


def test_bar_chart_heights(tmp_path):
    t = TabularData.from_rows([{"x": "a", "y": 1}, {"x": "b", "y": 3}, {"x": "c", "y": 2}])
    render_chart_svg(t, "Bar", "x", "y", tmp_path / "b.svg")
    heights = [float(h) for h in re.findall(r'<rect class="bar"[^>]* height="([0-9.]+)"', (tmp_path / "b.svg").read_text())]
    assert len(heights) == 3
    assert heights.index(max(heights)) == 1
    assert heights[0] < heights[2] < heights[1]


def test_scatter_obesity_covid(tmp_path):
    c = read_collection(DATASETS / "US_Counties_Obesity_Covid.geojson")
    names = c.field_names()
    num = [n for n in names if all(isinstance(f.properties.get(n), (int, float)) for f in c)]
    t = TabularData.from_rows([f.properties for f in c], columns=num[:2])
    render_chart_svg(t, "Scatter", num[0], num[1], tmp_path / "s.svg")
    assert (tmp_path / "s.svg").read_text().count('<circle class="marker"') == len(c)

