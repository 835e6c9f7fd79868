"""Joins, counts, nearest-feature and distance operations."""

from __future__ import annotations

import math

import numpy as np
import shapely
from scipy.spatial import cKDTree

from ..errors import EmptyInputError, FieldError, GeometryTypeError, ParameterError
from ..model import POLYGON_KINDS, Feature, FeatureCollection, Geometry, value_type
from ._geom import (closest_on_segments, points_array, require_kinds, segments_array, shapely_geoms,
                    to_shapely)
from .attributes import right_columns
from .table import TabularData

JOIN_PREDICATES = ("Intersects", "Within", "Contains")
LINE_KINDS = {"LineString", "MultiLineString"}

# STRtree.query(g, predicate=p) evaluates p(g, tree_geom); closed-set variants.
_TREE_PREDICATE = {"Intersects": "intersects", "Within": "covered_by", "Contains": "covers"}


def _tree(geoms: list) -> shapely.STRtree:
    return shapely.STRtree([g if g is not None else shapely.Point() for g in geoms])


def spatial_join(left: FeatureCollection, right: FeatureCollection, predicate: str = "Intersects") -> FeatureCollection:
    """Left join on a spatial predicate, one row per (left, match) pair."""
    pred = {p.lower(): p for p in JOIN_PREDICATES}.get(str(predicate).lower())
    if pred is None:
        raise ParameterError(f"join predicate must be one of {JOIN_PREDICATES}")
    rgeoms = shapely_geoms(right)
    tree = _tree(rgeoms)
    names = right_columns(left.field_names(), right.field_names())
    out = []
    for f in left.features:
        matches: list = []
        if f.geometry is not None and not f.geometry.is_empty and rgeoms:
            s = to_shapely(f.geometry)
            hits = tree.query(s, predicate=_TREE_PREDICATE[pred])
            matches = [j for j in sorted(hits.tolist()) if rgeoms[j] is not None]
        if not matches:
            props = dict(f.properties)
            props.update({names[k]: None for k in names})
            out.append(f.with_properties(props))
        for j in matches:
            props = dict(f.properties)
            rp = right[j].properties
            props.update({names[k]: rp.get(k) for k in names})
            out.append(f.with_properties(props))
    return left.with_features(out)


def count_in_regions(points: FeatureCollection, regions: FeatureCollection, out_field: str = "count") -> FeatureCollection:
    """Each region gains ``out_field``: points inside it, boundary included."""
    require_kinds(points, {"Point"}, "count (points)")
    require_kinds(regions, set(POLYGON_KINDS), "count (regions)")
    pts = points_array(points, "count")
    pgeoms = shapely.points(pts) if len(pts) else np.array([], dtype=object)
    tree = shapely.STRtree(pgeoms)
    out = []
    for f, g in zip(regions.features, shapely_geoms(regions)):
        n = int(len(tree.query(g, predicate="covers"))) if len(pgeoms) else 0
        props = dict(f.properties)
        props[out_field] = n
        out.append(f.with_properties(props))
    return regions.with_features(out)


def _target_segments(target: FeatureCollection):
    segs, owners = [], []
    for j, f in enumerate(target.features):
        s = segments_array(f.geometry.parts())
        segs.append(s)
        owners.extend([j] * len(s))
    return np.concatenate(segs) if segs else np.empty((0, 4)), np.asarray(owners, dtype=int)


def _nearest_on_lines(px, py, segs, owners, skip: int | None = None):
    qx, qy, d = closest_on_segments(px, py, segs)
    if skip is not None:
        d = np.where(owners == skip, np.inf, d)
    k = int(np.argmin(d))  # first minimum: lowest owner, then lowest segment
    return int(owners[k]), float(d[k]), float(qx[k]), float(qy[k])


def nearest_join(source: FeatureCollection, target: FeatureCollection, exclude_self: bool = False) -> FeatureCollection:
    """Add NEAR_ID, NEAR_DIST, NEAR_X, NEAR_Y for the nearest target feature.

    Targets are points or lines. ``exclude_self`` skips the target with the
    same index (for joining a layer to itself).
    """
    require_kinds(source, {"Point"}, "nearest (source)")
    if not target.features:
        raise EmptyInputError("nearest: target collection is empty")
    kinds = {f.geometry.kind if f.geometry else None for f in target.features}
    if kinds <= {"Point"}:
        tp = points_array(target, "nearest")
        mode = "points"
    elif kinds <= LINE_KINDS:
        segs, owners = _target_segments(target)
        mode = "lines"
    else:
        raise GeometryTypeError(f"nearest: target must be all points or all lines, got {sorted(map(str, kinds))}")
    if exclude_self and len(target.features) < 2:
        raise EmptyInputError("nearest: no other target feature once self is excluded")
    out = []
    for i, f in enumerate(source.features):
        px, py = f.geometry.coordinates
        skip = i if exclude_self else None
        if mode == "points":
            d = np.hypot(tp[:, 0] - px, tp[:, 1] - py)
            if skip is not None and skip < len(d):
                d[skip] = np.inf
            j = int(np.argmin(d))
            near = (j, float(d[j]), float(tp[j, 0]), float(tp[j, 1]))
        else:
            near = _nearest_on_lines(px, py, segs, owners, skip)
        props = dict(f.properties)
        props.update({"NEAR_ID": near[0], "NEAR_DIST": near[1], "NEAR_X": near[2], "NEAR_Y": near[3]})
        out.append(f.with_properties(props))
    return source.with_features(out)


def nearest_point_on_line(points: FeatureCollection, lines: FeatureCollection) -> FeatureCollection:
    """Project each point onto the nearest line segment (clamped)."""
    require_kinds(points, {"Point"}, "nearest point (points)")
    require_kinds(lines, LINE_KINDS, "nearest point (lines)")
    if not lines.features:
        raise EmptyInputError("nearest point: line collection is empty")
    segs, owners = _target_segments(lines)
    out = []
    for f in points.features:
        _, d, qx, qy = _nearest_on_lines(*f.geometry.coordinates, segs, owners)
        props = dict(f.properties)
        props["NEAR_DIST"] = d
        out.append(Feature(props, Geometry.point(qx, qy), f.id))
    return points.with_features(out)


def point_line_distance(points: FeatureCollection, lines: FeatureCollection) -> TabularData:
    """Rows ``point_id, line_id, distance`` for every point/line pair."""
    require_kinds(points, {"Point"}, "distance (points)")
    require_kinds(lines, LINE_KINDS, "distance (lines)")
    if not points.features or not lines.features:
        raise EmptyInputError("distance: both inputs must be nonempty")
    per_line = [segments_array(f.geometry.parts()) for f in lines.features]
    rows = []
    for i, f in enumerate(points.features):
        px, py = f.geometry.coordinates
        for j, segs in enumerate(per_line):
            rows.append({"point_id": i, "line_id": j, "distance": float(closest_on_segments(px, py, segs)[2].min())})
    return TabularData(("point_id", "line_id", "distance"), tuple(rows))


def pairwise_distances(points: FeatureCollection) -> TabularData:
    """Rows ``i, j, distance`` for all ``i < j``."""
    pts = points_array(points, "pairwise distances")
    if len(pts) < 2:
        raise EmptyInputError("pairwise distances need at least 2 points")
    rows = []
    for i in range(len(pts)):
        d = np.hypot(pts[i + 1:, 0] - pts[i, 0], pts[i + 1:, 1] - pts[i, 1])
        rows.extend({"i": i, "j": i + 1 + k, "distance": float(v)} for k, v in enumerate(d))
    return TabularData(("i", "j", "distance"), tuple(rows))


def connect_nearest_pair(points: FeatureCollection) -> FeatureCollection:
    """The globally closest pair as one LineString (lowest ``(i, j)`` on ties)."""
    pts = points_array(points, "nearest pair")
    if len(pts) < 2:
        raise EmptyInputError("nearest pair needs at least 2 points")
    tree = cKDTree(pts)
    dd, _ = tree.query(pts, k=2)
    dmin = float(dd[:, 1].min())
    cands = tree.query_pairs(dmin * (1 + 1e-9) + 1e-300)
    best = min((math.hypot(*(pts[j] - pts[i])), i, j) for i, j in ((min(p), max(p)) for p in cands))
    d, i, j = best
    line = Geometry("LineString", (tuple(pts[i]), tuple(pts[j])))
    return points.with_features([Feature({"from_id": i, "to_id": j, "distance": d}, line)])


def cluster_points(points: FeatureCollection, threshold: float) -> FeatureCollection:
    """Single-linkage clusters; adds ``cluster_id`` ordered by first member."""
    if not isinstance(threshold, (int, float)) or not threshold > 0 or not math.isfinite(threshold):
        raise ParameterError(f"threshold must be a positive number, got {threshold!r}")
    pts = points_array(points, "cluster")
    parent = list(range(len(pts)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if len(pts):
        for a, b in cKDTree(pts).query_pairs(threshold):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    ids: dict = {}
    out = []
    for i, f in enumerate(points.features):
        root = find(i)
        ids.setdefault(root, len(ids))
        props = dict(f.properties)
        props["cluster_id"] = ids[root]
        out.append(f.with_properties(props))
    return points.with_features(out)


def summarize_nearest(c: FeatureCollection, dist_field: str = "NEAR_DIST", group_field: str | None = None) -> TabularData:
    """min/max/mean/count of ``dist_field``, overall or per group (nulls skipped)."""
    names = c.field_names()
    cols = ([group_field] if group_field else []) + ["min", "max", "mean", "count"]
    if not c.features:
        return TabularData(tuple(cols), ())
    for fld in filter(None, (dist_field, group_field)):
        if fld not in names:
            raise FieldError(f"no field {fld!r}")
    types = {value_type(f.properties.get(dist_field)) for f in c.features} - {"null"}
    if types - {"number"}:
        raise FieldError(f"field {dist_field!r} is not numeric")
    groups: dict = {}
    for f in c.features:
        key = f.properties.get(group_field) if group_field else None
        groups.setdefault(key, []).append(f.properties.get(dist_field))
    keys = list(groups)
    if group_field:
        ktypes = {value_type(k) for k in keys} - {"null"}
        if len(ktypes) > 1:
            raise FieldError(f"group field {group_field!r} mixes types {sorted(ktypes)}")
        keys = sorted(k for k in keys if k is not None) + ([None] if None in groups else [])
    rows = []
    for k in keys:
        vals = [v for v in groups[k] if v is not None]
        row = {group_field: k} if group_field else {}
        row.update({"min": min(vals) if vals else None, "max": max(vals) if vals else None,
                    "mean": sum(vals) / len(vals) if vals else None, "count": len(vals)})
        rows.append(row)
    return TabularData(tuple(cols), tuple(rows))


def coord_pairs_to_lines(c: FeatureCollection, start=("POINT_X", "POINT_Y"), end=("NEAR_X", "NEAR_Y")) -> FeatureCollection:
    """One 2-point LineString per row; zero-length rows flagged ``degenerate``."""
    out = []
    for i, f in enumerate(c.features):
        vals = []
        for fld in (*start, *end):
            v = f.properties.get(fld)
            if v is None and fld not in f.properties:
                raise FieldError(f"row {i}: missing coordinate field {fld!r}")
            if value_type(v) != "number" or not math.isfinite(v):
                raise FieldError(f"row {i}: coordinate field {fld!r} is not a finite number")
            vals.append(float(v))
        a, b = (vals[0], vals[1]), (vals[2], vals[3])
        props = dict(f.properties)
        props["degenerate"] = a == b
        out.append(Feature(props, Geometry("LineString", (a, b)), f.id))
    return c.with_features(out)
