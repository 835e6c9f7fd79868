from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATASETS, points
from geoagents.errors import FieldError, ParameterError
from geoagents.expr import ExprEvalError, evaluate, parse_expression
from geoagents.model import CrsRef, FeatureCollection
from geoagents.ops import (add_field, add_xy_fields, attribute_join, filter_rows, group_aggregate, read_collection,
                           rename_fields, reproject, select_rows, sort_by_field)
from geoagents.ops.table import TabularData


@pytest.fixture
def rainfall():
    return read_collection(DATASETS / "rainfall.geojson")


def test_add_constant_and_empty():
    c = add_field(points([(0, 0), (1, 1)]), "z", 0)
    assert [f.properties["z"] for f in c] == [0, 0]
    assert len(add_field(points([]), "z", 0)) == 0
    with pytest.raises(FieldError):
        add_field(c, "z", 1)
    assert add_field(c, "z", 1, overwrite=True)[0].properties["z"] == 1


def test_population_density_per_row():
    counties = read_collection(DATASETS / "PennsylvaniaCounties.geojson")
    out = add_field(counties, "population_density", expression="Population / (ALAND / 1000000)")
    for f in out:
        p = f.properties
        assert p["population_density"] == pytest.approx(p["Population"] / (p["ALAND"] / 1e6), rel=1e-12)


def test_add_field_reports_row():
    c = points([(0, 0), (1, 1)], a=[1, 0])
    with pytest.raises(ExprEvalError) as ei:
        add_field(c, "r", expression="1 / a")
    assert ei.value.details["row"] == 1


def test_rename_examples():
    c = points([(0, 0)], p=[3], q=[4])
    assert rename_fields(c, {"p": "precip"})[0].properties == {"precip": 3, "q": 4}
    assert rename_fields(c, {}) == c
    swapped = rename_fields(c, {"p": "q", "q": "p"})[0].properties
    assert swapped == {"q": 3, "p": 4}
    with pytest.raises(FieldError):
        rename_fields(c, {"p": "q"})


def test_add_xy():
    out = add_xy_fields(points([(3, 4)]))
    assert out[0].properties == {"POINT_X": 3.0, "POINT_Y": 4.0}
    assert len(add_xy_fields(points([]))) == 0


def test_reproject_examples():
    c = points([(0, 0)], crs=CrsRef.wgs84())
    m = reproject(c, 3857)
    assert m[0].geometry.coordinates == (0.0, 0.0) and m.crs == CrsRef(3857)
    cleared = reproject(c, None)
    assert cleared.crs.is_none and cleared[0].geometry == c[0].geometry


def test_reproject_round_trip():
    rng = random.Random(59)
    c = points([(rng.uniform(-83, -79), rng.uniform(0, 80)) for _ in range(200)], crs=CrsRef.wgs84())
    back = reproject(reproject(c, CrsRef.utm(17)), 4326)
    for a, b in zip(c, back):
        (x0, y0), (x1, y1) = a.geometry.coordinates, b.geometry.coordinates
        assert abs(x0 - x1) <= 1e-8 and abs(y0 - y1) <= 1e-8


def test_select_rows():
    c = points([(0, 0), (1, 1), (2, 2)], k=["a", "b", "c"])
    assert [f.properties["k"] for f in select_rows(c, [0])] == ["a"]
    assert len(select_rows(c, [])) == 0
    assert [f.properties["k"] for f in select_rows(c, [2, 0])] == ["c", "a"]
    for bad in ({"indices": [3]}, {}, {"indices": [0], "ids": [0]}):
        with pytest.raises(ParameterError):
            select_rows(c, **bad)


def test_filter_rainfall_matches_row_oracle(rainfall):
    e = parse_expression("p > 1000")
    out = filter_rows(rainfall, "p > 1000")
    assert list(out) == [f for f in rainfall if evaluate(e, f.properties) is True]
    assert 0 < len(out) < len(rainfall)


def test_filter_tautology_identity(rainfall):
    assert filter_rows(rainfall, "p == p") == rainfall


def test_filter_poverty():
    pov = read_collection(DATASETS / "Poverty.geojson")
    out = filter_rows(pov, "ratio_pove < 0.05")
    assert all(f.properties["ratio_pove"] < 0.05 for f in out)
    assert len(out) == sum(1 for f in pov if f.properties["ratio_pove"] is not None and f.properties["ratio_pove"] < 0.05)


def test_filter_rejects_non_boolean():
    with pytest.raises(ExprEvalError):
        filter_rows(points([(0, 0)], a=[1]), "a + 1")


def test_sort_examples():
    c = points([(0, 0)] * 4, NEAR_DIST=[3.0, 1.0, None, 1.0], k=["a", "b", "c", "d"])
    assert [f.properties["k"] for f in sort_by_field(c, "NEAR_DIST")] == ["b", "d", "a", "c"]
    assert [f.properties["k"] for f in sort_by_field(c, "NEAR_DIST", "desc")] == ["a", "b", "d", "c"]
    s = sort_by_field(c, "NEAR_DIST")
    assert sort_by_field(s, "NEAR_DIST") == s


@given(st.lists(st.one_of(st.none(), st.integers(-3, 3)), max_size=30))
def test_sort_is_stable(vals):
    c = points([(0, 0)] * len(vals), v=vals, pos=list(range(len(vals))))
    out = [f.properties for f in sort_by_field(c, "v")] if vals else []
    want = sorted((p for p in (f.properties for f in c) if p["v"] is not None), key=lambda p: p["v"])
    want += [p for p in (f.properties for f in c) if p["v"] is None]
    assert out == want


def test_group_rainfall_brute_force(rainfall):
    t = group_aggregate(rainfall, "index", [("p", "sum")])
    sums: dict = {}
    for f in rainfall:
        sums[f.properties["index"]] = sums.get(f.properties["index"], 0) + f.properties["p"]
    assert {r["index"]: r["p_sum"] for r in t.rows} == pytest.approx(sums)
    assert t.columns == ("index", "p_sum", "p_nulls")


def test_group_single_and_empty():
    c = points([(0, 0)] * 3, g=[1, 1, 1], v=[1.0, 2.0, None])
    t = group_aggregate(c, "g", [("v", "sum"), ("v", "count"), ("v", "mean")])
    assert t.rows == ({"g": 1, "v_sum": 3.0, "v_count": 2, "v_mean": 1.5, "v_nulls": 1},)
    assert group_aggregate(FeatureCollection(), "g", [("v", "sum")]).rows == ()


def test_attribute_join_examples():
    geo = points([(0, 0), (1, 1), (2, 2)], key=["a", "b", "z"])
    table = TabularData.from_rows([{"k": "a", "v": 1}, {"k": "b", "v": 2}, {"k": "a", "v": 3}])
    r = attribute_join(geo, table, "key", "k")
    assert [f.properties["v"] for f in r.collection] == [1, 2, None]
    assert (r.matched, r.duplicate_keys) == (2, 1)


def test_attribute_join_nested_loop_oracle():
    rng = random.Random(61)
    keys = [rng.randint(0, 15) for _ in range(40)]
    rows = [{"k": rng.randint(0, 20), "v": rng.random()} for _ in range(30)]
    r = attribute_join(points([(0, 0)] * 40, key=keys), TabularData.from_rows(rows), "key", "k")
    for f, key in zip(r.collection, keys):
        first = next((row for row in rows if row["k"] == key), None)
        assert f.properties["v"] == (None if first is None else first["v"])
    assert r.duplicate_keys == len(rows) - len({row["k"] for row in rows})
    assert r.matched == sum(any(row["k"] == k for row in rows) for k in keys)
