from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import settings

import geoagents.benchmark
from geoagents.model import CrsRef, Feature, FeatureCollection, Geometry, serialize_geojson

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA = Path(geoagents.benchmark.__file__).parent / "data"
DATASETS = DATA / "datasets"

UNIT_SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0))


def points(coords, crs=None, **fields) -> FeatureCollection:
    feats = []
    for i, (x, y) in enumerate(coords):
        props = {k: v[i] for k, v in fields.items()}
        feats.append(Feature(props, Geometry.point(x, y)))
    return FeatureCollection(tuple(feats), crs or CrsRef.utm(17))


def polygons(rings, crs=None, **fields) -> FeatureCollection:
    feats = []
    for i, ring in enumerate(rings):
        props = {k: v[i] for k, v in fields.items()}
        feats.append(Feature(props, Geometry.polygon(ring)))
    return FeatureCollection(tuple(feats), crs or CrsRef.utm(17))


def lines(coord_lists, crs=None, **fields) -> FeatureCollection:
    feats = []
    for i, coords in enumerate(coord_lists):
        props = {k: v[i] for k, v in fields.items()}
        feats.append(Feature(props, Geometry.line(coords)))
    return FeatureCollection(tuple(feats), crs or CrsRef.utm(17))


def rect(x0, y0, x1, y1):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0))


@pytest.fixture
def US():
    return polygons([UNIT_SQUARE], name=["square"])


@pytest.fixture
def L1():
    return lines([((0.0, 0.0), (1.0, 0.0))])


@pytest.fixture
def PTS4():
    return points([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def TRI():
    return points([(0, 0), (1, 0), (0, 1)])


def write_geojson(path: Path, c: FeatureCollection) -> Path:
    path.write_text(serialize_geojson(c), encoding="utf-8")
    return path


def read_json(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
