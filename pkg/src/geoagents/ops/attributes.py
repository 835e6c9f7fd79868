"""Attribute-table operations and reprojection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from ..errors import CRSError, FieldError, GeometryTypeError, ParameterError
from ..expr import Binary, Expr, ExprEvalError, Field, Lit, Unary, compile_expression, evaluate
from ..model import CrsRef, Feature, FeatureCollection, value_type
from ..projection import project_point
from .table import TabularData

AGG_FUNCTIONS = ("sum", "mean", "min", "max", "count")


def reproject(c: FeatureCollection, to: CrsRef | str | int | None) -> FeatureCollection:
    """Transform every coordinate to ``to``; ``None`` clears the CRS tag only."""
    target = CrsRef.parse(to)
    if target.is_none:
        return c.with_features(c.features, crs=target)
    if c.crs.is_none:
        raise CRSError("collection has no CRS; set one before transforming")
    if target == c.crs:
        return c
    src = c.crs

    def fn(x, y):
        return project_point(src, target, (x, y))

    feats = [f if f.geometry is None else f.with_geometry(f.geometry.map_positions(fn)) for f in c.features]
    return c.with_features(feats, crs=target)


def _is_expr(value) -> bool:
    return isinstance(value, (Lit, Field, Unary, Binary))


def add_field(c: FeatureCollection, name: str, value: Any = None, *, expression: str | Expr | None = None,
              overwrite: bool = False) -> FeatureCollection:
    """Add ``name`` to every feature, as a constant or a per-row expression."""
    if not isinstance(name, str) or not name:
        raise ParameterError("field name must be a non-empty string")
    if not overwrite and name in c.field_names():
        raise FieldError(f"field {name!r} already exists; pass overwrite=True to replace it")
    expr = compile_expression(expression) if expression is not None else (value if _is_expr(value) else None)
    out = []
    for i, f in enumerate(c.features):
        props = dict(f.properties)
        if expr is None:
            props[name] = value
        else:
            try:
                props[name] = evaluate(expr, f.properties)
            except ExprEvalError as exc:
                raise ExprEvalError(f"row {i}: {exc.message}", row=i) from None
        out.append(f.with_properties(props))
    return c.with_features(out)


def rename_fields(c: FeatureCollection, mapping: Mapping[str, str]) -> FeatureCollection:
    """Rename fields simultaneously (``{a: b, b: a}`` swaps)."""
    existing = c.field_names()
    missing = [k for k in mapping if k not in existing]
    if missing:
        raise FieldError(f"cannot rename missing field(s) {missing}")
    final = [mapping.get(k, k) for k in existing]
    dupes = sorted({n for n in final if final.count(n) > 1})
    if dupes:
        raise FieldError(f"rename would produce duplicate field name(s) {dupes}")
    for new in mapping.values():
        if not isinstance(new, str) or not new:
            raise ParameterError("new field names must be non-empty strings")
    out = []
    for f in c.features:
        out.append(f.with_properties({mapping.get(k, k): v for k, v in f.properties.items()}))
    return c.with_features(out)


def add_xy_fields(c: FeatureCollection) -> FeatureCollection:
    out = []
    for i, f in enumerate(c.features):
        if f.geometry is None or f.geometry.kind != "Point":
            kind = None if f.geometry is None else f.geometry.kind
            raise GeometryTypeError(f"feature {i} is {kind}; coordinate fields need Point features")
        x, y = f.geometry.coordinates
        props = dict(f.properties)
        props["POINT_X"] = x
        props["POINT_Y"] = y
        out.append(f.with_properties(props))
    return c.with_features(out)


def select_rows(c: FeatureCollection, indices: Sequence[int] | None = None,
                ids: Sequence | None = None) -> FeatureCollection:
    """Subset by 0-based position or by feature id, in request order."""
    if (indices is None) == (ids is None):
        raise ParameterError("pass exactly one of indices or ids")
    if indices is not None:
        picked = []
        for i in indices:
            if isinstance(i, bool) or not isinstance(i, int):
                raise ParameterError(f"row index must be an integer, got {i!r}")
            if not 0 <= i < len(c.features):
                raise ParameterError(f"row index {i} out of range for {len(c.features)} features")
            picked.append(c.features[i])
        return c.with_features(picked)
    by_id: dict = {}
    for f in c.features:
        if f.id is not None:
            by_id.setdefault(f.id, f)
    picked = []
    for fid in ids:
        if fid not in by_id:
            raise ParameterError(f"no feature with id {fid!r}")
        picked.append(by_id[fid])
    return c.with_features(picked)


def filter_rows(c: FeatureCollection, predicate: str | Expr) -> FeatureCollection:
    """Keep rows where ``predicate`` is true; false and null drop the row."""
    expr = compile_expression(predicate)
    out = []
    for i, f in enumerate(c.features):
        try:
            v = evaluate(expr, f.properties)
        except ExprEvalError as exc:
            raise ExprEvalError(f"row {i}: {exc.message}", row=i) from None
        if v is True:
            out.append(f)
        elif v is not None and v is not False:
            raise ExprEvalError(f"row {i}: filter expression produced {value_type(v)}, not boolean", row=i)
    return c.with_features(out)


def _column_type(values: Iterable, what: str) -> str | None:
    types = {value_type(v) for v in values} - {"null"}
    if len(types) > 1:
        raise FieldError(f"{what} mixes types {sorted(types)}")
    return types.pop() if types else None


def sort_by_field(c: FeatureCollection, field: str, order: str = "asc") -> FeatureCollection:
    """Stable sort on ``field``; nulls go last in both directions."""
    if field not in c.field_names():
        raise FieldError(f"no field {field!r}")
    order = order.lower()
    if order not in ("asc", "desc"):
        raise ParameterError(f"order must be 'asc' or 'desc', got {order!r}")
    values = [f.properties.get(field) for f in c.features]
    _column_type(values, f"field {field!r}")
    present = [f for f in c.features if f.properties.get(field) is not None]
    nulls = [f for f in c.features if f.properties.get(field) is None]
    present.sort(key=lambda f: f.properties[field], reverse=(order == "desc"))
    return c.with_features(present + nulls)


def _sort_key_groups(keys: list) -> list:
    _column_type(keys, "group key")
    present = sorted({k for k in keys if k is not None})
    return present + ([None] if any(k is None for k in keys) else [])


def group_aggregate(c: FeatureCollection, by: str, aggs: Sequence[tuple[str, str]]) -> TabularData:
    """One row per distinct ``by`` value, ascending (null key last).

    Output columns are ``by``, then ``<field>_<fn>`` per aggregation, then
    ``<field>_nulls`` counting the null values skipped for each field.
    """
    names = c.field_names()
    if c.features and by not in names:
        raise FieldError(f"no field {by!r} to group by")
    aggs = [tuple(a) for a in aggs]
    for fld, fn in aggs:
        if fn not in AGG_FUNCTIONS:
            raise ParameterError(f"unknown aggregation {fn!r}; use one of {AGG_FUNCTIONS}")
        if c.features and fld not in names:
            raise FieldError(f"no field {fld!r} to aggregate")
        if fn != "count":
            t = _column_type((f.properties.get(fld) for f in c.features), f"field {fld!r}")
            if t not in (None, "number"):
                raise FieldError(f"cannot {fn} non-numeric field {fld!r} ({t})")
    agg_fields = list(dict.fromkeys(fld for fld, _ in aggs))
    columns = [by] + [f"{fld}_{fn}" for fld, fn in aggs] + [f"{fld}_nulls" for fld in agg_fields]
    if len(set(columns)) != len(columns):
        raise ParameterError("duplicate aggregation requested")
    groups: dict = {}
    for f in c.features:
        groups.setdefault(f.properties.get(by), []).append(f.properties)
    rows = []
    for key in _sort_key_groups(list(groups)):
        members = groups[key]
        row: dict = {by: key}
        for fld, fn in aggs:
            vals = [p.get(fld) for p in members if p.get(fld) is not None]
            if fn == "count":
                row[f"{fld}_{fn}"] = len(vals)
            elif not vals:
                row[f"{fld}_{fn}"] = None
            elif fn == "sum":
                row[f"{fld}_{fn}"] = sum(vals)
            elif fn == "mean":
                row[f"{fld}_{fn}"] = sum(vals) / len(vals)
            elif fn == "min":
                row[f"{fld}_{fn}"] = min(vals)
            else:
                row[f"{fld}_{fn}"] = max(vals)
        for fld in agg_fields:
            row[f"{fld}_nulls"] = sum(1 for p in members if p.get(fld) is None)
        rows.append(row)
    return TabularData(tuple(columns), tuple(rows))


def suffixed_name(name: str, taken: set, suffix_start: int = 2) -> str:
    k = suffix_start
    cand = f"{name}_{k}"
    while cand in taken:
        k += 1
        cand = f"{name}_{k}"
    return cand


def right_columns(left_names: Iterable[str], right_names: Iterable[str]) -> dict:
    """Map right-hand column names to output names, suffixing collisions."""
    taken = set(left_names)
    out = {}
    for n in right_names:
        new = n if n not in taken else suffixed_name(n, taken | set(right_names))
        taken.add(new)
        out[n] = new
    return out


@dataclass(frozen=True)
class AttributeJoinResult:
    collection: FeatureCollection
    matched: int
    duplicate_keys: int


def _key(v):
    return (value_type(v), v)


def attribute_join(geo: FeatureCollection, table: TabularData, key_geo: str, key_tab: str) -> AttributeJoinResult:
    """Left join of ``table`` onto ``geo``; the first table row per key wins."""
    if geo.features and key_geo not in geo.field_names():
        raise FieldError(f"no field {key_geo!r} in the collection")
    if key_tab not in table.columns:
        raise FieldError(f"no column {key_tab!r} in the table")
    index: dict = {}
    dupes = 0
    for row in table.rows:
        k = row[key_tab]
        if k is None:
            continue
        if _key(k) in index:
            dupes += 1
        else:
            index[_key(k)] = row
    extra = [col for col in table.columns if col != key_tab]
    names = right_columns(geo.field_names(), extra)
    out = []
    matched = 0
    for f in geo.features:
        k = f.properties.get(key_geo)
        row = index.get(_key(k)) if k is not None else None
        props = dict(f.properties)
        if row is not None:
            matched += 1
        for col in extra:
            props[names[col]] = None if row is None else row[col]
        out.append(f.with_properties(props))
    return AttributeJoinResult(geo.with_features(out), matched, dupes)
