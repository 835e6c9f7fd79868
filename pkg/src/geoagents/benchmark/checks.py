"""Declarative output checks evaluated against a task workspace."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import shapely

from ..errors import GeoError
from ..model import CrsRef, FeatureCollection, value_type
from ..ops import TabularData, read_collection, read_tabular
from ..ops._geom import to_shapely
from ..ops.shapefile import read_shapefile

CHECK_KINDS = ("FileExists", "FeatureCount", "FieldPresent", "NumericFieldNear", "GeometryPredicate", "TableCell")
PREDICATES = ("kind", "crs", "valid", "nonempty", "area", "length")
STATS = ("sum", "min", "max", "mean", "all")


class CheckError(GeoError):
    code = "check_error"


@dataclass(frozen=True)
class Check:
    """One assertion about an output file.

    ``row`` picks a feature or table row, either by position or with
    ``{"field": name, "value": v}``. ``stat`` aggregates a numeric field
    over all rows instead (``all`` requires every value to be near).
    The ``area`` and ``length`` geometry predicates measure the selected
    feature, or the sum over all features when no row is given.
    """

    kind: str
    target: str
    field: str | None = None
    expected: Any = None
    tol: float = 0.0
    row: Any = None
    stat: str | None = None
    predicate: str | None = None

    def __post_init__(self):
        if self.kind not in CHECK_KINDS:
            raise CheckError(f"unknown check kind {self.kind!r}")
        if not isinstance(self.target, str) or not self.target:
            raise CheckError("check target must be a nonempty path")
        if not isinstance(self.tol, (int, float)) or isinstance(self.tol, bool) or not self.tol >= 0:
            raise CheckError(f"check tolerance must be a number >= 0, got {self.tol!r}")
        need_field = self.kind in ("FieldPresent", "NumericFieldNear", "TableCell")
        if need_field and not self.field:
            raise CheckError(f"{self.kind} needs a field")
        if self.kind == "FeatureCount" and (not isinstance(self.expected, int) or self.expected < 0):
            raise CheckError("FeatureCount needs a non-negative integer expected value")
        if self.kind == "NumericFieldNear":
            if value_type(self.expected) != "number":
                raise CheckError("NumericFieldNear needs a numeric expected value")
            if (self.row is None) == (self.stat is None):
                raise CheckError("NumericFieldNear needs exactly one of row or stat")
            if self.stat is not None and self.stat not in STATS:
                raise CheckError(f"stat must be one of {STATS}")
        if self.kind == "TableCell" and self.row is None:
            raise CheckError("TableCell needs a row")
        if self.kind == "GeometryPredicate":
            if self.predicate not in PREDICATES:
                raise CheckError(f"GeometryPredicate needs predicate in {PREDICATES}")
            if self.predicate in ("area", "length") and value_type(self.expected) != "number":
                raise CheckError(f"the {self.predicate} predicate needs a numeric expected value")
        if self.row is not None and not _valid_row(self.row):
            raise CheckError("row must be an index or {'field': name, 'value': v}")

    @classmethod
    def from_json(cls, d: dict) -> Check:
        if not isinstance(d, dict):
            raise CheckError("a check must be an object")
        known = {"kind", "target", "field", "expected", "tol", "row", "stat", "predicate"}
        unknown = set(d) - known
        if unknown:
            raise CheckError(f"unknown check keys {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "target": self.target}
        for k in ("field", "expected", "row", "stat", "predicate"):
            v = getattr(self, k)
            if v is not None or (k == "expected" and self.predicate == "crs"):
                out[k] = v
        if self.tol:
            out["tol"] = self.tol
        return out


def _valid_row(row) -> bool:
    if isinstance(row, int) and not isinstance(row, bool):
        return row >= 0
    return isinstance(row, dict) and set(row) == {"field", "value"} and isinstance(row["field"], str)


@dataclass(frozen=True)
class CheckResult:
    check: Check
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.check.to_json(), "ok": self.ok, "detail": self.detail}


def load_output(path: Path) -> FeatureCollection | TabularData:
    suffix = path.suffix.lower()
    if suffix == ".shp":
        return read_shapefile(path)
    if suffix == ".csv":
        return read_tabular(path)
    if suffix == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(doc, dict) and set(doc) == {"columns", "rows"}:
            return TabularData(tuple(doc["columns"]), tuple(doc["rows"]))
    if suffix in (".geojson", ".json"):
        return read_collection(path)
    raise CheckError(f"no reader for {path.name}")


def _records(data) -> list[dict]:
    if isinstance(data, TabularData):
        return [dict(r) for r in data.rows]
    return [dict(f.properties) for f in data.features]


def _columns(data) -> list[str]:
    return list(data.columns) if isinstance(data, TabularData) else data.field_names()


def _select(records: list[dict], row) -> dict:
    if isinstance(row, int):
        if row >= len(records):
            raise CheckError(f"row {row} out of range ({len(records)} rows)")
        return records[row]
    hits = [r for r in records if r.get(row["field"]) == row["value"]]
    if len(hits) != 1:
        raise CheckError(f"{len(hits)} rows have {row['field']} == {row['value']!r}, expected exactly 1")
    return hits[0]


def _near(actual, expected, tol: float) -> bool:
    if value_type(actual) != "number" or not math.isfinite(actual):
        return False
    return abs(actual - expected) <= tol


def _numeric(values: list, field: str) -> list[float]:
    if any(value_type(v) != "number" for v in values):
        raise CheckError(f"field {field!r} has non-numeric values")
    return [float(v) for v in values]


def _geometry_predicate(c: Check, data) -> tuple[bool, str]:
    if not isinstance(data, FeatureCollection):
        raise CheckError("geometry predicates need a feature collection")
    if c.predicate == "crs":
        want = CrsRef.parse(c.expected)
        return data.crs == want, f"crs {data.crs.name}, expected {want.name}"
    geoms = [f.geometry for f in data.features]
    if c.predicate == "kind":
        allowed = set(c.expected if isinstance(c.expected, list) else [c.expected])
        kinds = {g.kind for g in geoms if g is not None}
        return bool(kinds) and kinds <= allowed, f"kinds {sorted(kinds)}, allowed {sorted(allowed)}"
    if c.predicate == "nonempty":
        n = sum(1 for g in geoms if g is not None and not g.is_empty)
        return n == len(geoms) and n > 0, f"{n} of {len(geoms)} geometries nonempty"
    if c.predicate in ("area", "length"):
        shapes = [to_shapely(f.geometry) for f in data.features if f.geometry is not None]
        if c.row is not None:
            recs = [dict(f.properties) for f in data.features]
            picked = _select(recs, c.row)
            k = next(i for i, r in enumerate(recs) if r is picked)
            g = data.features[k].geometry
            shapes = [] if g is None else [to_shapely(g)]
        measure = shapely.area if c.predicate == "area" else shapely.length
        total = math.fsum(float(measure(s)) for s in shapes)
        return _near(total, c.expected, c.tol), f"{c.predicate} = {total!r}, expected {c.expected}"
    bad = [i for i, g in enumerate(geoms) if g is not None and not shapely.is_valid(to_shapely(g))]
    return not bad, f"invalid geometries at {bad[:10]}" if bad else "all valid"


def evaluate_check(c: Check, workspace: Path) -> CheckResult:
    """Pure over the workspace contents: re-evaluation gives the same result."""
    path = Path(workspace) / c.target
    if c.kind == "FileExists":
        ok = path.is_file()
        if ok and path.suffix.lower() == ".shp":
            missing = [s for s in (".shx", ".dbf") if not path.with_suffix(s).is_file()]
            if missing:
                return CheckResult(c, False, f"shapefile parts missing: {missing}")
        return CheckResult(c, ok, "" if ok else f"{c.target} not found")
    if not path.is_file():
        return CheckResult(c, False, f"{c.target} not found")
    try:
        data = load_output(path)
        if c.kind == "FeatureCount":
            n = len(data)
            return CheckResult(c, n == c.expected, f"{n} records, expected {c.expected}")
        if c.kind == "FieldPresent":
            cols = _columns(data)
            return CheckResult(c, c.field in cols, f"fields {cols}")
        if c.kind == "GeometryPredicate":
            ok, detail = _geometry_predicate(c, data)
            return CheckResult(c, ok, detail)
        records = _records(data)
        if c.kind == "TableCell":
            actual = _select(records, c.row).get(c.field)
            if value_type(c.expected) == "number":
                ok = _near(actual, c.expected, c.tol)
            else:
                ok = actual == c.expected
            return CheckResult(c, ok, f"{c.field} = {actual!r}, expected {c.expected!r}")
        # NumericFieldNear
        if c.row is not None:
            actual = _select(records, c.row).get(c.field)
            return CheckResult(c, _near(actual, c.expected, c.tol), f"{c.field} = {actual!r}, expected {c.expected}")
        if c.field not in _columns(data):
            return CheckResult(c, False, f"no field {c.field!r}")
        vals = _numeric([r.get(c.field) for r in records], c.field)
        if not vals:
            return CheckResult(c, False, "no rows")
        if c.stat == "all":
            far = [v for v in vals if not _near(v, c.expected, c.tol)]
            return CheckResult(c, not far, f"{len(far)} values off by more than {c.tol}")
        agg = {"sum": math.fsum, "min": min, "max": max, "mean": lambda v: math.fsum(v) / len(v)}[c.stat](vals)
        return CheckResult(c, _near(agg, c.expected, c.tol), f"{c.stat}({c.field}) = {agg!r}, expected {c.expected}")
    except (GeoError, OSError, ValueError, KeyError, TypeError) as exc:
        return CheckResult(c, False, f"{type(exc).__name__}: {exc}")


__all__ = ["CHECK_KINDS", "Check", "CheckError", "CheckResult", "evaluate_check", "load_output"]
