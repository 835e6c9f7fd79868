from __future__ import annotations

import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import corpus, random_collection_doc
from geoagents.errors import CRSError, GeoJSONSchemaError, GeoJSONSyntaxError
from geoagents.model import (CrsRef, Feature, FeatureCollection, Geometry, collection_metadata, infer_schema,
                             parse_geojson, ring_signed_area, serialize_geojson)
from oracles import shoelace


def test_empty_collection_parses_and_serializes():
    c = parse_geojson('{"type":"FeatureCollection","features":[]}')
    assert len(c) == 0
    # absent crs member means the GeoJSON default, WGS84
    assert c.crs == CrsRef.wgs84()
    assert serialize_geojson(FeatureCollection()) == '{"type":"FeatureCollection","features":[]}'


def test_null_crs_member_clears_crs():
    c = parse_geojson('{"type":"FeatureCollection","crs":null,"features":[]}')
    assert c.crs.is_none
    assert json.loads(serialize_geojson(c))["crs"] is None


def test_clockwise_ring_reoriented():
    cw = [[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]]
    doc = {"type": "Feature", "properties": {}, "geometry": {"type": "Polygon", "coordinates": [cw]}}
    g = parse_geojson(json.dumps(doc))[0].geometry
    ring = g.coordinates[0]
    assert ring_signed_area(ring) > 0
    assert set(ring) == {tuple(map(float, p)) for p in cw}


def test_hole_oriented_clockwise():
    outer = [[0, 0], [4, 0], [4, 4], [0, 4], [0, 0]]
    hole = [[1, 1], [2, 1], [2, 2], [1, 2], [1, 1]]
    g = Geometry("Polygon", (outer, hole))
    assert ring_signed_area(g.coordinates[0]) > 0
    assert ring_signed_area(g.coordinates[1]) < 0


def test_unclosed_ring_closed():
    g = Geometry("Polygon", ([[0, 0], [1, 0], [1, 1], [0, 1]],))
    assert g.coordinates[0][0] == g.coordinates[0][-1]


def test_crs_marker_written_for_3857():
    c = FeatureCollection((Feature({}, Geometry.point(1, 2)),), CrsRef(3857))
    doc = json.loads(serialize_geojson(c))
    assert doc["crs"] == {"type": "name", "properties": {"name": "EPSG:3857"}}
    assert parse_geojson(serialize_geojson(c)).crs == CrsRef(3857)


@pytest.mark.parametrize("text,epsg", [
    ("EPSG:4326", 4326), ("epsg:3857", 3857), ("urn:ogc:def:crs:EPSG::32617", 32617),
    ("urn:ogc:def:crs:OGC:1.3:CRS84", 4326), ("32717", 32717), (32650, 32650),
])
def test_crs_parse_forms(text, epsg):
    assert CrsRef.parse(text).epsg == epsg


def test_crs_rejects_unsupported():
    with pytest.raises(CRSError):
        CrsRef.parse("EPSG:2263")
    with pytest.raises(CRSError):
        parse_geojson('{"type":"FeatureCollection","crs":{"type":"name","properties":{"name":"EPSG:6535"}},'
                      '"features":[]}')


def test_syntax_error_has_position():
    with pytest.raises(GeoJSONSyntaxError) as ei:
        parse_geojson('{"type":"FeatureCollection",\n "features": [}')
    assert ei.value.details["line"] == 2


@pytest.mark.parametrize("text", [
    '[]',
    '{"type":"Topology"}',
    '{"type":"FeatureCollection"}',
    '{"type":"Feature","properties":{},"geometry":{"type":"LineString","coordinates":[[0,0]]}}',
    '{"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[0,0]]]}}',
    '{"type":"Feature","properties":{"a":[1]},"geometry":null}',
    '{"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":["x",1]}}',
    '{"type":"Feature","properties":{"a":NaN},"geometry":null}',
])
def test_schema_errors(text):
    with pytest.raises(GeoJSONSchemaError):
        parse_geojson(text)


def test_bare_geometry_and_feature_wrapped():
    c = parse_geojson('{"type":"Point","coordinates":[1,2]}')
    assert len(c) == 1 and c[0].geometry.coordinates == (1.0, 2.0)
    c = parse_geojson('{"type":"Feature","id":7,"properties":{"a":1},"geometry":null}')
    assert c[0].id == 7 and c[0].geometry is None


def test_z_dropped_and_flagged():
    c = parse_geojson('{"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[1,2,3]}}')
    assert c[0].geometry.coordinates == (1.0, 2.0)
    assert collection_metadata(c).dropped_z


def test_unknown_members_survive():
    text = '{"type":"FeatureCollection","name":"roads","features":[{"type":"Feature","properties":{},' \
           '"geometry":null,"title":"t"}]}'
    out = json.loads(serialize_geojson(parse_geojson(text)))
    assert out["name"] == "roads"
    assert out["features"][0]["title"] == "t"


def test_metadata_examples():
    c = FeatureCollection(tuple(Feature({"p": float(i)}, Geometry.point(i, 2 * i)) for i in range(3)))
    m = collection_metadata(c, "pts.geojson")
    assert m.feature_count == 3
    assert m.property_schema == {"p": "number"}
    assert m.geometry_kinds == {"Point"}
    assert m.bbox == (0.0, 0.0, 2.0, 4.0)
    e = collection_metadata(FeatureCollection())
    assert e.feature_count == 0 and e.bbox_label == "empty"


def test_mixed_schema():
    assert infer_schema([{"a": 1}, {"a": "x"}]) == {"a": "mixed"}
    assert infer_schema([{"a": None}, {"a": True}]) == {"a": "boolean"}
    assert infer_schema([{"a": 1}, {"a": None}]) == {"a": "number"}


@given(st.integers(min_value=0, max_value=10**9))
def test_roundtrip_fixed_point(seed):
    doc = random_collection_doc(random.Random(seed))
    c1 = parse_geojson(json.dumps(doc))
    text = serialize_geojson(c1)
    c2 = parse_geojson(text)
    assert c2 == c1
    assert serialize_geojson(c2) == text


def test_corpus_roundtrip_1000():
    for doc in corpus(1000):
        c1 = parse_geojson(json.dumps(doc))
        c2 = parse_geojson(serialize_geojson(c1))
        assert c1 == c2


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=12))
def test_signed_area_matches_shoelace(pts):
    ring = list(pts) + [pts[0]]
    assert abs(abs(ring_signed_area(ring)) - shoelace(pts)) <= 1e-9 * max(1.0, shoelace(pts))


def test_serialization_deterministic_member_order():
    f = Feature({"b": 1, "a": 2}, Geometry.point(0.1, 0.2), "x")
    text = serialize_geojson(FeatureCollection((f,)))
    assert text == ('{"type":"FeatureCollection","features":[{"type":"Feature","id":"x",'
                    '"properties":{"b":1,"a":2},"geometry":{"type":"Point","coordinates":[0.1,0.2]}}]}')
