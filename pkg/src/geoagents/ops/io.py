"""Reading, fetching and writing collections and tables."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

import httpx

from ..errors import FetchError, FileFormatError, GeoError, HTTPStatusError, ResponseTooLarge
from ..model import FeatureCollection, Geometry, parse_geojson, serialize_geojson
from .shapefile import write_shapefile
from .table import TabularData, format_cell, read_table, rows_to_csv

DEFAULT_TIMEOUT_S = 30.0
DEFAULT_MAX_BYTES = 256 * 1024 * 1024

GEOJSON_SUFFIXES = (".geojson", ".json")
# JSON object mapping URL -> local file; lets sandboxed scripts fetch fixtures without sockets
FETCH_FIXTURES_ENV = "GEOAGENTS_FETCH_FIXTURES"


@dataclass
class WrittenFiles:
    """What a save-type operation put on disk."""

    paths: list
    format: str
    records: int
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"paths": list(self.paths), "format": self.format, "records": self.records,
                "notes": list(self.notes)}


class IOFailure(GeoError):
    code = "io_error"


def fixture_transport(fixtures: dict) -> httpx.MockTransport:
    """Serve local files for the given URLs; any other URL gets a 404."""
    table = {str(url): Path(p) for url, p in fixtures.items()}

    def handler(request: httpx.Request) -> httpx.Response:
        path = table.get(str(request.url))
        if path is None:
            return httpx.Response(404, text="not found")
        return httpx.Response(200, content=path.read_bytes(), headers={"content-type": "application/geo+json"})

    return httpx.MockTransport(handler)


def default_transport() -> httpx.BaseTransport | None:
    raw = os.environ.get(FETCH_FIXTURES_ENV)
    if not raw:
        return None
    try:
        fixtures = json.loads(raw)
    except ValueError as exc:
        raise FetchError(f"{FETCH_FIXTURES_ENV} is not valid JSON: {exc}") from exc
    if not isinstance(fixtures, dict):
        raise FetchError(f"{FETCH_FIXTURES_ENV} must map URLs to files")
    return fixture_transport(fixtures)


def fetch_remote_collection(url: str, transport: httpx.BaseTransport | None = None,
                            timeout: float = DEFAULT_TIMEOUT_S,
                            max_bytes: int = DEFAULT_MAX_BYTES) -> FeatureCollection:
    """GET ``url`` and parse the body as GeoJSON.

    ``transport`` is any httpx transport; tests pass ``httpx.MockTransport``.
    Without one, fixtures named in ``GEOAGENTS_FETCH_FIXTURES`` are served
    and everything else goes to the network.
    """
    if transport is None:
        transport = default_transport()
    scheme = urlparse(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise FetchError(f"only http/https URLs are supported, got {url!r}")
    try:
        with httpx.Client(transport=transport, timeout=timeout, follow_redirects=True) as client:
            with client.stream("GET", url) as resp:
                if not 200 <= resp.status_code < 300:
                    raise HTTPStatusError(resp.status_code, url)
                declared = resp.headers.get("content-length")
                if declared and declared.isdigit() and int(declared) > max_bytes:
                    raise ResponseTooLarge(f"{url}: body of {declared} bytes exceeds {max_bytes}")
                chunks, total = [], 0
                for chunk in resp.iter_bytes():
                    total += len(chunk)
                    if total > max_bytes:
                        raise ResponseTooLarge(f"{url}: body exceeds {max_bytes} bytes")
                    chunks.append(chunk)
    except httpx.HTTPError as exc:
        raise FetchError(f"network error fetching {url}: {exc}") from exc
    return parse_geojson(b"".join(chunks))


def read_collection(path: str | os.PathLike) -> FeatureCollection:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_geojson(data)


def read_tabular(path: str | os.PathLike) -> TabularData:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    return read_table(text)


# ---------------------------------------------------------------------------
# WKT
# ---------------------------------------------------------------------------


def _wkt_num(v: float) -> str:
    return format_cell(float(v))


def _wkt_seq(coords) -> str:
    return "(" + ", ".join(f"{_wkt_num(x)} {_wkt_num(y)}" for x, y in coords) + ")"


def to_wkt(g: Geometry | None) -> str:
    if g is None:
        return ""
    c = g.coordinates
    if g.kind == "Point":
        return f"POINT ({_wkt_num(c[0])} {_wkt_num(c[1])})"
    if g.is_empty:
        return f"{g.kind.upper()} EMPTY"
    if g.kind == "MultiPoint":
        return "MULTIPOINT (" + ", ".join(_wkt_seq([p]) for p in c) + ")"
    if g.kind == "LineString":
        return "LINESTRING " + _wkt_seq(c)
    if g.kind == "MultiLineString":
        return "MULTILINESTRING (" + ", ".join(_wkt_seq(l) for l in c) + ")"
    if g.kind == "Polygon":
        return "POLYGON (" + ", ".join(_wkt_seq(r) for r in c) + ")"
    return "MULTIPOLYGON (" + ", ".join("(" + ", ".join(_wkt_seq(r) for r in p) + ")" for p in c) + ")"


def collection_to_csv(c: FeatureCollection) -> str:
    cols = c.field_names()
    geom_col = "geometry"
    while geom_col in cols:
        geom_col = "_" + geom_col
    rows = []
    for f in c.features:
        row = {k: f.properties.get(k) for k in cols}
        row[geom_col] = to_wkt(f.geometry)
        rows.append(row)
    return rows_to_csv(cols + [geom_col], rows)


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _prepare(path) -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOFailure(f"cannot create directory {p.parent}: {exc.strerror or exc}") from exc
    return p


def _write_text(p: Path, text: str) -> None:
    try:
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {p}: {exc.strerror or exc}") from exc


def save_result(data: FeatureCollection | TabularData, path: str | os.PathLike) -> WrittenFiles:
    """Write ``data`` in the format implied by the extension of ``path``.

    ``.geojson``/``.json`` GeoJSON, ``.shp`` shapefile triplet, ``.csv``
    attribute table with a WKT ``geometry`` column. Tables go to ``.csv``
    or ``.json`` only.
    """
    p = _prepare(path)
    suffix = p.suffix.lower()
    if isinstance(data, TabularData):
        if suffix == ".csv":
            _write_text(p, data.to_csv())
        elif suffix == ".json":
            import json

            _write_text(p, json.dumps(data.to_json(), ensure_ascii=False, allow_nan=False))
        else:
            raise FileFormatError(f"cannot save a table as {suffix or 'extensionless file'}; use .csv or .json")
        return WrittenFiles([str(p)], suffix[1:], len(data))
    if suffix in GEOJSON_SUFFIXES:
        _write_text(p, serialize_geojson(data))
        return WrittenFiles([str(p)], "geojson", len(data))
    if suffix == ".csv":
        _write_text(p, collection_to_csv(data))
        return WrittenFiles([str(p)], "csv", len(data))
    if suffix == ".shp":
        try:
            rep = write_shapefile(data, p)
        except OSError as exc:
            raise IOFailure(f"cannot write {p}: {exc.strerror or exc}") from exc
        notes = [f"field {k!r} written as {v!r}" for k, v in rep.renamed_fields.items()]
        if rep.truncated_values:
            notes.append(f"{rep.truncated_values} text values truncated to 254 bytes")
        return WrittenFiles(rep.paths, "shapefile", rep.record_count, notes)
    raise FileFormatError(f"unsupported output extension {suffix or '(none)'}; use .geojson, .json, .shp or .csv")


def convert_format(in_path: str | os.PathLike, out_path: str | os.PathLike) -> WrittenFiles:
    if Path(in_path).suffix.lower() not in GEOJSON_SUFFIXES:
        raise FileFormatError(f"conversion reads GeoJSON input only, got {in_path}")
    return save_result(read_collection(in_path), out_path)


def export_coordinates(c: FeatureCollection, out_path: str | os.PathLike) -> WrittenFiles:
    """One CSV row per stored vertex (ring closures included)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature_id", "part_index", "ring_index", "vertex_index", "x", "y"])
    n = 0
    for fid, f in enumerate(c.features):
        g = f.geometry
        if g is None:
            continue
        for part_index, part in enumerate(g.parts()):
            if g.is_point:
                rings = [[part]]
            elif g.is_line:
                rings = [part]
            else:
                rings = part
            for ring_index, ring in enumerate(rings):
                for vi, (x, y) in enumerate(ring):
                    w.writerow([fid, part_index, ring_index, vi, format_cell(x), format_cell(y)])
                    n += 1
    p = _prepare(out_path)
    if p.suffix.lower() != ".csv":
        raise FileFormatError(f"coordinates export writes .csv, got {p.suffix or '(none)'}")
    _write_text(p, buf.getvalue())
    return WrittenFiles([str(p)], "csv", n)
