"""GeoJSON data model: geometries, features, collections and CRS tags.

Values are immutable once built. Geometries are normalized on
construction: polygon rings are closed and oriented (exterior
counterclockwise, holes clockwise), positions are reduced to 2-D float
pairs, and non-finite coordinates are rejected.

The CRS of a collection travels with the file as the legacy ``crs``
member (``{"type": "name", "properties": {"name": "EPSG:3857"}}``). A
file without that member is WGS84 (EPSG:4326); a cleared CRS is written
as ``"crs": null``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import CRSError, GeoJSONSchemaError, GeoJSONSyntaxError

GEOMETRY_KINDS = (
    "Point",
    "MultiPoint",
    "LineString",
    "MultiLineString",
    "Polygon",
    "MultiPolygon",
)

POINT_KINDS = frozenset({"Point", "MultiPoint"})
LINE_KINDS = frozenset({"LineString", "MultiLineString"})
POLYGON_KINDS = frozenset({"Polygon", "MultiPolygon"})

# Coordinate equality tolerances, per unit family.
TOLERANCE_DEGREES = 1e-9
TOLERANCE_METERS = 1e-6

Position = tuple  # (x, y) pair of floats


# ---------------------------------------------------------------------------
# CRS
# ---------------------------------------------------------------------------

_CRS_NAME = re.compile(
    r"^(?:EPSG:|urn:ogc:def:crs:EPSG:[0-9.]*:|http://www\.opengis\.net/def/crs/EPSG/0/)(\d+)$",
    re.IGNORECASE,
)
_CRS84 = {"urn:ogc:def:crs:OGC:1.3:CRS84", "urn:ogc:def:crs:OGC::CRS84", "OGC:CRS84", "CRS84"}


def is_supported_epsg(code: int) -> bool:
    return code in (4326, 3857) or 32601 <= code <= 32660 or 32701 <= code <= 32760


@dataclass(frozen=True)
class CrsRef:
    """Either a supported EPSG code or ``None`` (coordinate system cleared)."""

    epsg: int | None = None

    def __post_init__(self):
        if self.epsg is not None:
            if isinstance(self.epsg, bool) or not isinstance(self.epsg, int):
                raise CRSError(f"EPSG code must be an integer, got {self.epsg!r}")
            if not is_supported_epsg(self.epsg):
                raise CRSError(f"unsupported CRS EPSG:{self.epsg}; supported: 4326, 3857, 326zz, 327zz")

    @classmethod
    def none(cls) -> CrsRef:
        return cls(None)

    @classmethod
    def wgs84(cls) -> CrsRef:
        return cls(4326)

    @classmethod
    def utm(cls, zone: int, south: bool = False) -> CrsRef:
        if not 1 <= zone <= 60:
            raise CRSError(f"UTM zone out of range: {zone}")
        return cls((32700 if south else 32600) + zone)

    @classmethod
    def parse(cls, value: Any) -> CrsRef:
        """Accept ``"EPSG:3857"``, ``3857``, URN forms, ``"none"`` or ``None``."""
        if value is None:
            return cls(None)
        if isinstance(value, CrsRef):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value)
        if isinstance(value, str):
            text = value.strip()
            if text.lower() in ("none", "null", ""):
                return cls(None)
            if text in _CRS84:
                return cls(4326)
            m = _CRS_NAME.match(text)
            if m:
                return cls(int(m.group(1)))
            if text.isdigit():
                return cls(int(text))
        raise CRSError(f"unrecognized CRS reference {value!r}")

    @property
    def is_none(self) -> bool:
        return self.epsg is None

    @property
    def is_geographic(self) -> bool:
        return self.epsg == 4326

    @property
    def is_projected(self) -> bool:
        return self.epsg is not None and self.epsg != 4326

    @property
    def utm_zone(self) -> tuple[int, bool] | None:
        """``(zone, south)`` for UTM codes, else ``None``."""
        if self.epsg is None:
            return None
        if 32601 <= self.epsg <= 32660:
            return self.epsg - 32600, False
        if 32701 <= self.epsg <= 32760:
            return self.epsg - 32700, True
        return None

    @property
    def name(self) -> str:
        return "none" if self.epsg is None else f"EPSG:{self.epsg}"

    def __str__(self) -> str:
        return self.name


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def ring_signed_area(ring: Sequence[Position]) -> float:
    """Shoelace area; positive for counterclockwise rings."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        total += x0 * y1 - x1 * y0
    return total / 2.0


def _position(raw: Any, path: str, flags: dict | None = None) -> Position:
    if isinstance(raw, (list, tuple)) and len(raw) >= 2:
        xy = raw[:2]
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in xy):
            x, y = float(xy[0]), float(xy[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise GeoJSONSchemaError(f"non-finite coordinate at {path}")
            if len(raw) > 2 and flags is not None:
                flags["dropped_z"] = True
            return (x, y)
    raise GeoJSONSchemaError(f"invalid position at {path}: {raw!r}")


def _positions(raw: Any, path: str, flags: dict | None) -> tuple:
    if not isinstance(raw, (list, tuple)):
        raise GeoJSONSchemaError(f"expected an array of positions at {path}")
    return tuple(_position(p, f"{path}[{i}]", flags) for i, p in enumerate(raw))


def _line(raw: Any, path: str, flags: dict | None) -> tuple:
    pts = _positions(raw, path, flags)
    if len(pts) < 2:
        raise GeoJSONSchemaError(f"LineString at {path} needs at least 2 positions, got {len(pts)}")
    return pts


def _ring(raw: Any, path: str, flags: dict | None, exterior: bool) -> tuple:
    pts = _positions(raw, path, flags)
    if len(pts) < 4:
        raise GeoJSONSchemaError(f"polygon ring at {path} needs at least 4 positions, got {len(pts)}")
    if pts[0] != pts[-1]:
        pts = pts + (pts[0],)
    area = ring_signed_area(pts)
    if (exterior and area < 0) or (not exterior and area > 0):
        pts = tuple(reversed(pts))
    return pts


def _polygon(raw: Any, path: str, flags: dict | None) -> tuple:
    if not isinstance(raw, (list, tuple)):
        raise GeoJSONSchemaError(f"expected an array of rings at {path}")
    return tuple(_ring(r, f"{path}[{i}]", flags, exterior=(i == 0)) for i, r in enumerate(raw))


def _normalize_coordinates(kind: str, raw: Any, path: str = "coordinates", flags: dict | None = None):
    if kind == "Point":
        return _position(raw, path, flags)
    if kind == "MultiPoint":
        return _positions(raw, path, flags)
    if kind == "LineString":
        return _line(raw, path, flags)
    if not isinstance(raw, (list, tuple)):
        raise GeoJSONSchemaError(f"expected an array at {path}")
    if kind == "MultiLineString":
        return tuple(_line(part, f"{path}[{i}]", flags) for i, part in enumerate(raw))
    if kind == "Polygon":
        return _polygon(raw, path, flags)
    if kind == "MultiPolygon":
        return tuple(_polygon(part, f"{path}[{i}]", flags) for i, part in enumerate(raw))
    raise GeoJSONSchemaError(f"unsupported geometry type {kind!r}")


@dataclass(frozen=True)
class Geometry:
    """A 2-D geometry. ``coordinates`` are nested tuples of ``(x, y)`` floats."""

    kind: str
    coordinates: Any
    extra: dict = field(default_factory=dict, compare=True, repr=False)

    def __post_init__(self):
        if self.kind not in GEOMETRY_KINDS:
            raise GeoJSONSchemaError(f"unsupported geometry type {self.kind!r}")
        object.__setattr__(self, "coordinates", _normalize_coordinates(self.kind, self.coordinates))

    # shorthand constructors -------------------------------------------------
    @classmethod
    def point(cls, x: float, y: float) -> Geometry:
        return cls("Point", (x, y))

    @classmethod
    def line(cls, coords: Iterable) -> Geometry:
        return cls("LineString", tuple(coords))

    @classmethod
    def polygon(cls, exterior: Iterable, *holes: Iterable) -> Geometry:
        return cls("Polygon", (tuple(exterior),) + tuple(tuple(h) for h in holes))

    # structure -------------------------------------------------------------
    @property
    def is_point(self) -> bool:
        return self.kind in POINT_KINDS

    @property
    def is_line(self) -> bool:
        return self.kind in LINE_KINDS

    @property
    def is_polygon(self) -> bool:
        return self.kind in POLYGON_KINDS

    @property
    def is_empty(self) -> bool:
        return self.kind != "Point" and len(self.coordinates) == 0

    def parts(self) -> tuple:
        """Single-part components: positions, lines or polygons."""
        if self.kind in ("Point", "LineString", "Polygon"):
            return (self.coordinates,)
        return self.coordinates

    def positions(self) -> Iterator[Position]:
        """Every stored position, ring closures included."""
        if self.kind == "Point":
            yield self.coordinates
        elif self.kind in ("MultiPoint", "LineString"):
            yield from self.coordinates
        elif self.kind in ("MultiLineString", "Polygon"):
            for part in self.coordinates:
                yield from part
        else:
            for poly in self.coordinates:
                for ring in poly:
                    yield from ring

    @property
    def bounds(self) -> tuple[float, float, float, float] | None:
        xs, ys = [], []
        for x, y in self.positions():
            xs.append(x)
            ys.append(y)
        if not xs:
            return None
        return (min(xs), min(ys), max(xs), max(ys))

    def map_positions(self, fn) -> Geometry:
        """New geometry with ``fn(x, y) -> (x, y)`` applied to every position."""

        def walk(node, depth):
            if depth == 0:
                return tuple(fn(*node))
            return tuple(walk(n, depth - 1) for n in node)

        depth = {"Point": 0, "MultiPoint": 1, "LineString": 1, "MultiLineString": 2,
                 "Polygon": 2, "MultiPolygon": 3}[self.kind]
        return Geometry(self.kind, walk(self.coordinates, depth), dict(self.extra))

    def to_json(self) -> dict:
        out = {"type": self.kind, "coordinates": _coords_json(self.coordinates)}
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out


def _coords_json(node):
    if isinstance(node, tuple) and node and isinstance(node[0], float):
        return [_number(node[0]), _number(node[1])]
    return [_coords_json(n) for n in node]


def _number(v):
    """Shortest round-trip JSON form; integral floats print without ``.0``."""
    if isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
        return int(v)
    return v


# ---------------------------------------------------------------------------
# Features and collections
# ---------------------------------------------------------------------------

AttributeValue = Any  # str | int | float | bool | None


def check_attribute(name: str, value: Any, where: str = "") -> None:
    if value is None or isinstance(value, (str, bool, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GeoJSONSchemaError(f"non-finite value for property {name!r}{where}")
        return
    raise GeoJSONSchemaError(
        f"property {name!r}{where} must be a string, number, boolean or null, got {type(value).__name__}"
    )


@dataclass(frozen=True)
class Feature:
    properties: dict = field(default_factory=dict)
    geometry: Geometry | None = None
    id: str | int | float | None = None
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for k, v in self.properties.items():
            check_attribute(k, v)

    def with_properties(self, properties: Mapping) -> Feature:
        return replace(self, properties=dict(properties))

    def with_geometry(self, geometry: Geometry | None) -> Feature:
        return replace(self, geometry=geometry)

    def to_json(self) -> dict:
        out: dict = {"type": "Feature"}
        if self.id is not None:
            out["id"] = _number(self.id) if isinstance(self.id, float) else self.id
        out["properties"] = {k: _number(v) for k, v in self.properties.items()}
        out["geometry"] = None if self.geometry is None else self.geometry.to_json()
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out


@dataclass(frozen=True)
class FeatureCollection:
    features: tuple = ()
    crs: CrsRef = field(default_factory=CrsRef.wgs84)
    extra: dict = field(default_factory=dict, repr=False)
    # set when parsing dropped altitude values; not part of equality
    dropped_z: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.features, tuple):
            object.__setattr__(self, "features", tuple(self.features))

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self) -> Iterator[Feature]:
        return iter(self.features)

    def __getitem__(self, i) -> Feature:
        return self.features[i]

    def with_features(self, features: Iterable[Feature], crs: CrsRef | None = None) -> FeatureCollection:
        """Same collection metadata around a new feature list.

        A stored ``bbox`` member is dropped because it may no longer hold.
        """
        extra = {k: v for k, v in self.extra.items() if k != "bbox"}
        return FeatureCollection(tuple(features), self.crs if crs is None else crs, extra)

    @property
    def bounds(self) -> tuple[float, float, float, float] | None:
        boxes = [f.geometry.bounds for f in self.features if f.geometry is not None]
        boxes = [b for b in boxes if b is not None]
        if not boxes:
            return None
        return (min(b[0] for b in boxes), min(b[1] for b in boxes),
                max(b[2] for b in boxes), max(b[3] for b in boxes))

    def field_names(self) -> list[str]:
        names: dict[str, None] = {}
        for f in self.features:
            for k in f.properties:
                names.setdefault(k, None)
        return list(names)

    def to_json(self) -> dict:
        out: dict = {"type": "FeatureCollection"}
        if self.crs.epsg is None:
            out["crs"] = None
        elif self.crs.epsg != 4326:
            out["crs"] = {"type": "name", "properties": {"name": self.crs.name}}
        out["features"] = [f.to_json() for f in self.features]
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not valid JSON")


def _loads(text: str | bytes) -> Any:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GeoJSONSyntaxError(f"input is not UTF-8: {exc.reason}", exc.start, 1, exc.start + 1) from None
    if text.startswith("﻿"):
        text = text[1:]
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GeoJSONSyntaxError(exc.msg, exc.pos, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise GeoJSONSchemaError(str(exc)) from None


def _parse_geometry(obj: Any, path: str, flags: dict) -> Geometry | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise GeoJSONSchemaError(f"geometry at {path} must be an object or null")
    kind = obj.get("type")
    if kind not in GEOMETRY_KINDS:
        raise GeoJSONSchemaError(f"unsupported geometry type {kind!r} at {path}")
    if "coordinates" not in obj:
        raise GeoJSONSchemaError(f"geometry at {path} has no coordinates")
    coords = _normalize_coordinates(kind, obj["coordinates"], f"{path}.coordinates", flags)
    extra = {k: v for k, v in obj.items() if k not in ("type", "coordinates")}
    return Geometry(kind, coords, extra)


def _parse_feature(obj: Any, path: str, flags: dict) -> Feature:
    if not isinstance(obj, dict) or obj.get("type") != "Feature":
        raise GeoJSONSchemaError(f"{path} is not a Feature object")
    props = obj.get("properties")
    if props is None:
        props = {}
    if not isinstance(props, dict):
        raise GeoJSONSchemaError(f"{path}.properties must be an object or null")
    for k, v in props.items():
        check_attribute(k, v, f" at {path}")
    fid = obj.get("id")
    if fid is not None and (isinstance(fid, bool) or not isinstance(fid, (str, int, float))):
        raise GeoJSONSchemaError(f"{path}.id must be a string or number")
    if "geometry" not in obj:
        raise GeoJSONSchemaError(f"{path} has no geometry member")
    geom = _parse_geometry(obj["geometry"], f"{path}.geometry", flags)
    extra = {k: v for k, v in obj.items() if k not in ("type", "id", "properties", "geometry")}
    return Feature(dict(props), geom, fid, extra)


def _parse_crs(member: Any) -> CrsRef:
    if member is None:
        return CrsRef.none()
    if isinstance(member, dict):
        props = member.get("properties")
        if isinstance(props, dict) and isinstance(props.get("name"), str):
            return CrsRef.parse(props["name"])
        if isinstance(props, dict) and "code" in props:
            return CrsRef.parse(props["code"])
    raise GeoJSONSchemaError(f"unrecognized crs member {member!r}")


def parse_geojson(text: str | bytes) -> FeatureCollection:
    """Parse GeoJSON text into a normalized :class:`FeatureCollection`.

    A bare Feature or Geometry is wrapped into a one-element collection.
    Unknown members are kept verbatim so they survive re-serialization.

    Raises :class:`GeoJSONSyntaxError` for malformed JSON (with position),
    :class:`GeoJSONSchemaError` for structural problems and
    :class:`CRSError` for an unsupported ``crs`` member.
    """
    obj = _loads(text)
    if not isinstance(obj, dict):
        raise GeoJSONSchemaError("top-level GeoJSON value must be an object")
    flags: dict = {"dropped_z": False}
    kind = obj.get("type")
    crs = _parse_crs(obj["crs"]) if "crs" in obj else CrsRef.wgs84()
    if kind == "FeatureCollection":
        feats = obj.get("features")
        if not isinstance(feats, list):
            raise GeoJSONSchemaError("FeatureCollection.features must be an array")
        features = tuple(_parse_feature(f, f"features[{i}]", flags) for i, f in enumerate(feats))
        extra = {k: v for k, v in obj.items() if k not in ("type", "crs", "features")}
    elif kind == "Feature":
        body = {k: v for k, v in obj.items() if k != "crs"}
        features = (_parse_feature(body, "feature", flags),)
        extra = {}
    elif kind in GEOMETRY_KINDS:
        body = {k: v for k, v in obj.items() if k != "crs"}
        features = (Feature({}, _parse_geometry(body, "geometry", flags)),)
        extra = {}
    else:
        raise GeoJSONSchemaError(f"unsupported GeoJSON type {kind!r}")
    return FeatureCollection(features, crs, extra, dropped_z=flags["dropped_z"])


def serialize_geojson(c: FeatureCollection, indent: int | None = None) -> str:
    """Deterministic GeoJSON text for ``c``.

    Members are written ``type`` first, then in insertion order; numbers use
    the shortest decimal form that reads back to the same float.
    """
    separators = (",", ":") if indent is None else (",", ": ")
    return json.dumps(c.to_json(), ensure_ascii=False, allow_nan=False,
                      separators=separators, indent=indent)


# ---------------------------------------------------------------------------
# Metadata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FileMetadata:
    path: str
    feature_count: int
    geometry_kinds: frozenset
    property_schema: dict
    crs: CrsRef
    bbox: tuple | None  # None is the "empty" marker
    dropped_z: bool = False

    @property
    def bbox_label(self):
        return "empty" if self.bbox is None else list(self.bbox)

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "feature_count": self.feature_count,
            "geometry_kinds": sorted(self.geometry_kinds),
            "property_schema": dict(self.property_schema),
            "crs": self.crs.name,
            "bbox": self.bbox_label,
            "dropped_z": self.dropped_z,
        }


def value_type(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, (int, float)):
        return "number"
    return "string"


def infer_schema(rows: Iterable[Mapping]) -> dict:
    """Union of per-row value types; disagreeing columns become ``"mixed"``."""
    schema: dict[str, str] = {}
    for row in rows:
        for k, v in row.items():
            t = value_type(v)
            prev = schema.get(k)
            if prev is None or prev == "null":
                schema[k] = t
            elif t != "null" and t != prev:
                schema[k] = "mixed"
    return schema


def collection_metadata(c: FeatureCollection, path: str = "") -> FileMetadata:
    kinds = frozenset(f.geometry.kind for f in c.features if f.geometry is not None)
    return FileMetadata(
        path=path,
        feature_count=len(c.features),
        geometry_kinds=kinds,
        property_schema=infer_schema(f.properties for f in c.features),
        crs=c.crs,
        bbox=c.bounds,
        dropped_z=c.dropped_z,
    )
