"""ESRI shapefile writer (.shp/.shx/.dbf) and a minimal reader.

Shape types written: 0 (null), 1 (Point), 3 (PolyLine), 5 (Polygon) and
8 (MultiPoint). Attribute tables are dBase III with ``C`` and ``N``
fields. Output is byte-deterministic: the DBF "last update" date is fixed.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FileFormatError, GeoWarning
from ..model import CrsRef, Feature, FeatureCollection, Geometry, ring_signed_area

SHAPE_NULL = 0
SHAPE_POINT = 1
SHAPE_POLYLINE = 3
SHAPE_POLYGON = 5
SHAPE_MULTIPOINT = 8

_KIND_TO_SHAPE = {
    "Point": SHAPE_POINT,
    "MultiPoint": SHAPE_MULTIPOINT,
    "LineString": SHAPE_POLYLINE,
    "MultiLineString": SHAPE_POLYLINE,
    "Polygon": SHAPE_POLYGON,
    "MultiPolygon": SHAPE_POLYGON,
}

DBF_DATE = (100, 1, 1)  # 2000-01-01, fixed for reproducible output
MAX_FIELD_NAME = 10
MAX_CHAR_WIDTH = 254
MAX_NUMERIC_DECIMALS = 15


@dataclass
class ShapefileReport:
    paths: list
    shape_type: int
    record_count: int
    renamed_fields: dict = field(default_factory=dict)
    truncated_values: int = 0


# ---------------------------------------------------------------------------
# geometry records
# ---------------------------------------------------------------------------


def _shape_type(c: FeatureCollection) -> int:
    types = {_KIND_TO_SHAPE[f.geometry.kind] for f in c.features if f.geometry is not None}
    if len(types) > 1:
        raise FileFormatError(
            "a shapefile holds one geometry family; collection mixes "
            + ", ".join(sorted({f.geometry.kind for f in c.features if f.geometry is not None}))
        )
    return types.pop() if types else SHAPE_NULL


def _box(points) -> tuple:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def _record_content(g: Geometry | None) -> bytes:
    if g is None or g.is_empty:
        return struct.pack("<i", SHAPE_NULL)
    if g.kind == "Point":
        return struct.pack("<i2d", SHAPE_POINT, *g.coordinates)
    if g.kind == "MultiPoint":
        pts = g.coordinates
        out = struct.pack("<i4di", SHAPE_MULTIPOINT, *_box(pts), len(pts))
        return out + b"".join(struct.pack("<2d", *p) for p in pts)
    if g.is_line:
        parts = list(g.parts())
        stype = SHAPE_POLYLINE
    else:
        # shapefile polygons: outer rings clockwise, holes counterclockwise
        parts = [tuple(reversed(r)) for poly in g.parts() for r in poly]
        stype = SHAPE_POLYGON
    pts = [p for part in parts for p in part]
    out = struct.pack("<i4dii", stype, *_box(pts), len(parts), len(pts))
    offs, n = [], 0
    for part in parts:
        offs.append(n)
        n += len(part)
    out += struct.pack(f"<{len(offs)}i", *offs)
    return out + b"".join(struct.pack("<2d", *p) for p in pts)


def _main_header(file_words: int, stype: int, bbox) -> bytes:
    head = struct.pack(">7i", 9994, 0, 0, 0, 0, 0, file_words)
    return head + struct.pack("<2i4d4d", 1000, stype, *bbox, 0.0, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# dBase table
# ---------------------------------------------------------------------------


def dbf_field_names(names: list[str]) -> dict:
    """Map each property name to a unique DBF name of at most 10 bytes."""
    out: dict[str, str] = {}
    used: set[str] = set()
    for name in names:
        cand = _truncate_bytes(name, MAX_FIELD_NAME) or "FIELD"
        k = 1
        while cand.upper() in used:
            suffix = f"_{k}"
            cand = _truncate_bytes(name, MAX_FIELD_NAME - len(suffix)) + suffix
            k += 1
        used.add(cand.upper())
        out[name] = cand
    return out


def _truncate_bytes(text: str, limit: int) -> str:
    raw = text.encode("utf-8")
    if len(raw) <= limit:
        return text
    return raw[:limit].decode("utf-8", errors="ignore")


def _decimals(v: float) -> int:
    if v.is_integer():
        return 0
    text = repr(abs(v))
    if "e" in text or "E" in text:
        mant, exp = text.lower().split("e")
        frac = len(mant.split(".")[1]) if "." in mant else 0
        return max(0, min(MAX_NUMERIC_DECIMALS, frac - int(exp)))
    return min(MAX_NUMERIC_DECIMALS, len(text.split(".")[1]))


def _field_defs(c: FeatureCollection, names: dict):
    """List of (prop name, dbf name, type, width, decimals)."""
    defs = []
    for prop, dbf_name in names.items():
        values = [f.properties.get(prop) for f in c.features]
        present = [v for v in values if v is not None]
        numeric = bool(present) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in present
        )
        if numeric:
            dec = max(_decimals(float(v)) for v in present)
            width = max(len(_format_number(v, dec)) for v in present)
            defs.append((prop, dbf_name, "N", max(width, 1), dec))
        else:
            width = max([len(_char_value(v).encode("utf-8")) for v in present] + [1])
            defs.append((prop, dbf_name, "C", min(width, MAX_CHAR_WIDTH), 0))
    return defs


def _format_number(v, dec: int) -> str:
    if dec == 0:
        return str(int(round(v))) if isinstance(v, float) else str(v)
    return f"{float(v):.{dec}f}"


def _char_value(v) -> str:
    if v is None:
        return ""
    if v is True:
        return "T"
    if v is False:
        return "F"
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def _dbf_bytes(c: FeatureCollection, defs, report: ShapefileReport) -> bytes:
    n = len(c.features)
    header_len = 32 + 32 * len(defs) + 1
    record_len = 1 + sum(d[3] for d in defs)
    out = bytearray(struct.pack("<B3BIHH20x", 0x03, *DBF_DATE, n, header_len, record_len))
    for _, name, ftype, width, dec in defs:
        raw = name.encode("utf-8")
        out += struct.pack("<11sc4xBB14x", raw, ftype.encode("ascii"), width, dec)
    out += b"\r"
    for f in c.features:
        rec = bytearray(b" ")
        for prop, _, ftype, width, dec in defs:
            v = f.properties.get(prop)
            if ftype == "N":
                text = "" if v is None else _format_number(v, dec)
                rec += text.rjust(width).encode("ascii")
            else:
                raw = _char_value(v).encode("utf-8")
                if len(raw) > width:
                    raw = _truncate_bytes(_char_value(v), width).encode("utf-8")
                    report.truncated_values += 1
                rec += raw.ljust(width, b" ")
        out += rec
    out += b"\x1a"
    return bytes(out)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def write_shapefile(c: FeatureCollection, path: str | os.PathLike) -> ShapefileReport:
    """Write ``c`` as ``<stem>.shp``, ``<stem>.shx`` and ``<stem>.dbf``."""
    import warnings

    base = Path(path).with_suffix("")
    stype = _shape_type(c)
    contents = [_record_content(f.geometry) for f in c.features]
    bbox = c.bounds or (0.0, 0.0, 0.0, 0.0)

    shp_words = 50 + sum(4 + len(b) // 2 for b in contents)
    shp = bytearray(_main_header(shp_words, stype, bbox))
    shx = bytearray(_main_header(50 + 4 * len(contents), stype, bbox))
    offset = 50
    for i, body in enumerate(contents, start=1):
        shx += struct.pack(">2i", offset, len(body) // 2)
        shp += struct.pack(">2i", i, len(body) // 2) + body
        offset += 4 + len(body) // 2

    names = dbf_field_names(c.field_names())
    report = ShapefileReport(
        paths=[], shape_type=stype, record_count=len(contents),
        renamed_fields={k: v for k, v in names.items() if k != v},
    )
    dbf = _dbf_bytes(c, _field_defs(c, names), report)
    for suffix, data in ((".shp", shp), (".shx", shx), (".dbf", dbf)):
        p = base.with_name(base.name + suffix)
        p.write_bytes(bytes(data))
        report.paths.append(str(p))
    if report.renamed_fields:
        warnings.warn(
            "shapefile field names truncated to 10 bytes: "
            + ", ".join(f"{k}->{v}" for k, v in report.renamed_fields.items()),
            GeoWarning, stacklevel=2,
        )
    return report


def _read_dbf(data: bytes) -> list[dict]:
    n, header_len, _ = struct.unpack("<IHH", data[4:12])
    defs = []
    pos = 32
    while data[pos] != 0x0D:
        raw_name, ftype, width, dec = struct.unpack("<11sc4xBB14x", data[pos:pos + 32])
        defs.append((raw_name.split(b"\0")[0].decode("utf-8"), ftype.decode("ascii"), width, dec))
        pos += 32
    rows = []
    pos = header_len
    for _ in range(n):
        pos += 1  # deletion flag
        row = {}
        for name, ftype, width, dec in defs:
            raw = data[pos:pos + width]
            pos += width
            text = raw.decode("utf-8", errors="replace").strip()
            if ftype == "N":
                if not text or set(text) == {"*"}:
                    row[name] = None
                elif dec == 0:
                    row[name] = int(text)
                else:
                    row[name] = float(text)
            else:
                row[name] = text
        rows.append(row)
    return rows


def _ring_contains(ring, pt) -> bool:
    x, y = pt
    inside = False
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        if (y0 > y) != (y1 > y) and x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
            inside = not inside
    return inside


def _read_geometry(body: bytes) -> Geometry | None:
    (stype,) = struct.unpack("<i", body[:4])
    if stype == SHAPE_NULL:
        return None
    if stype == SHAPE_POINT:
        return Geometry("Point", struct.unpack("<2d", body[4:20]))
    if stype == SHAPE_MULTIPOINT:
        (n,) = struct.unpack("<i", body[36:40])
        vals = struct.unpack(f"<{2 * n}d", body[40:40 + 16 * n])
        return Geometry("MultiPoint", tuple(zip(vals[::2], vals[1::2])))
    if stype not in (SHAPE_POLYLINE, SHAPE_POLYGON):
        raise FileFormatError(f"unsupported shape type {stype}")
    nparts, npts = struct.unpack("<ii", body[36:44])
    offs = list(struct.unpack(f"<{nparts}i", body[44:44 + 4 * nparts])) + [npts]
    base = 44 + 4 * nparts
    vals = struct.unpack(f"<{2 * npts}d", body[base:base + 16 * npts])
    pts = list(zip(vals[::2], vals[1::2]))
    parts = [tuple(pts[offs[i]:offs[i + 1]]) for i in range(nparts)]
    if stype == SHAPE_POLYLINE:
        return Geometry("LineString", parts[0]) if len(parts) == 1 else Geometry("MultiLineString", tuple(parts))
    polys: list[list] = []
    holes = []
    for ring in parts:
        if ring_signed_area(ring) <= 0:  # clockwise: outer ring
            polys.append([ring])
        else:
            holes.append(ring)
    for h in holes:
        owner = next((p for p in polys if _ring_contains(p[0], h[0])), polys[-1] if polys else None)
        if owner is None:
            polys.append([h])
        else:
            owner.append(h)
    coords = tuple(tuple(p) for p in polys)
    return Geometry("Polygon", coords[0]) if len(coords) == 1 else Geometry("MultiPolygon", coords)


def read_shapefile(path: str | os.PathLike, crs: CrsRef | None = None) -> FeatureCollection:
    """Minimal reader for files produced by :func:`write_shapefile`."""
    base = Path(path).with_suffix("")
    shp = base.with_name(base.name + ".shp").read_bytes()
    dbf_path = base.with_name(base.name + ".dbf")
    rows = _read_dbf(dbf_path.read_bytes()) if dbf_path.exists() else []
    (code,) = struct.unpack(">i", shp[:4])
    if code != 9994:
        raise FileFormatError(f"{path}: not a shapefile (file code {code})")
    (words,) = struct.unpack(">i", shp[24:28])
    end = words * 2
    pos = 100
    geoms = []
    while pos < end:
        _, length = struct.unpack(">2i", shp[pos:pos + 8])
        body = shp[pos + 8:pos + 8 + 2 * length]
        geoms.append(_read_geometry(body))
        pos += 8 + 2 * length
    feats = []
    for i, g in enumerate(geoms):
        props = rows[i] if i < len(rows) else {}
        feats.append(Feature(dict(props), g))
    return FeatureCollection(tuple(feats), crs if crs is not None else CrsRef.none())
