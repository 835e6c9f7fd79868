"""Buffering, clipping, overlay and geometry-type conversions."""

from __future__ import annotations

import math

import shapely
from shapely import ops as sops

from ..errors import GeometryTypeError, ParameterError, TopologyError
from ..model import POLYGON_KINDS, Feature, FeatureCollection, Geometry
from ._geom import (BUFFER_QUAD_SEGS, from_shapely, require_kinds, require_planar, shapely_geoms,
                    to_shapely, union_all)

OVERLAY_MODES = ("Intersection", "Union", "Difference", "SymmetricDifference")
LINE_AND_POLYGON = {"LineString", "MultiLineString", "Polygon", "MultiPolygon"}


def buffer(c: FeatureCollection, distances, allow_geographic: bool = False) -> FeatureCollection:
    """Multi-ring buffer; ring ``k`` is ``buffer(d_k) - buffer(d_{k-1})``.

    Outputs are feature-major then distance-major and carry ``distance``.
    """
    if isinstance(distances, (int, float)):
        distances = [distances]
    distances = [float(d) for d in distances]
    if not distances:
        raise ParameterError("at least one buffer distance is required")
    if any(not math.isfinite(d) or d <= 0 for d in distances):
        raise ParameterError(f"buffer distances must be positive, got {distances}")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ParameterError(f"buffer distances must be strictly ascending, got {distances}")
    require_planar(c, "buffer", allow_geographic)
    out = []
    for f in c.features:
        if f.geometry is None or f.geometry.is_empty:
            continue
        s = to_shapely(f.geometry)
        inner = None
        for d in distances:
            outer = shapely.buffer(s, d, quad_segs=BUFFER_QUAD_SEGS)
            ring = outer if inner is None else outer.difference(inner)
            inner = outer
            g = from_shapely(ring, 2)
            if g is None:
                continue
            props = dict(f.properties)
            props["distance"] = d
            out.append(Feature(props, g, f.id))
    return c.with_features(out)


def _dim_of(g: Geometry) -> int:
    return 0 if g.is_point else 1 if g.is_line else 2


def clip(target: FeatureCollection, mask: FeatureCollection) -> FeatureCollection:
    """Intersect each target geometry with the union of the mask polygons."""
    require_kinds(mask, set(POLYGON_KINDS), "clip mask")
    m = union_all(shapely_geoms(mask))
    shapely.prepare(m)
    out = []
    for f in target.features:
        if f.geometry is None or f.geometry.is_empty:
            continue
        s = to_shapely(f.geometry)
        if not m.intersects(s):
            continue
        g = from_shapely(s.intersection(m), _dim_of(f.geometry))
        if g is not None:
            out.append(f.with_geometry(g))
    return target.with_features(out)


def _merge_names(a_names, b_names):
    """Output names for a's and b's fields; shared names get ``_1``/``_2``."""
    shared = set(a_names) & set(b_names)
    left = {n: (f"{n}_1" if n in shared else n) for n in a_names}
    right = {n: (f"{n}_2" if n in shared else n) for n in b_names}
    return left, right


def _props(names_a, pa, names_b, pb) -> dict:
    props = {names_a[k]: (None if pa is None else pa.get(k)) for k in names_a}
    props.update({names_b[k]: (None if pb is None else pb.get(k)) for k in names_b})
    return props


def _area_features(sgeom, props) -> list:
    g = from_shapely(sgeom, 2)
    return [] if g is None else [Feature(props, g)]


def overlay(a: FeatureCollection, b: FeatureCollection, mode: str = "Intersection") -> FeatureCollection:
    """Pairwise polygon overlay in the style of a GIS overlay tool.

    Intersection yields one piece per intersecting pair (i, j). Difference
    keeps ``a_i - union(b)``. SymmetricDifference adds ``b_j - union(a)``,
    and Union further adds the intersection pieces.
    """
    modes = {m.lower(): m for m in OVERLAY_MODES}
    mode = modes.get(str(mode).lower())
    if mode is None:
        raise ParameterError(f"overlay mode must be one of {OVERLAY_MODES}")
    require_kinds(a, set(POLYGON_KINDS), "overlay (first input)", allow_null=True)
    require_kinds(b, set(POLYGON_KINDS), "overlay (second input)", allow_null=True)
    ga, gb = shapely_geoms(a), shapely_geoms(b)
    if mode == "Difference":
        names_a = {n: n for n in a.field_names()}
        names_b: dict = {}
    else:
        names_a, names_b = _merge_names(a.field_names(), b.field_names())
    out: list = []
    if mode in ("Intersection", "Union"):
        tree = shapely.STRtree([g if g is not None else shapely.Point() for g in gb])
        for i, sa in enumerate(ga):
            if sa is None:
                continue
            for j in sorted(tree.query(sa, predicate="intersects").tolist()):
                props = _props(names_a, a[i].properties, names_b, b[j].properties)
                out.extend(_area_features(sa.intersection(gb[j]), props))
    if mode in ("Difference", "SymmetricDifference", "Union"):
        ub = union_all(gb)
        for i, sa in enumerate(ga):
            if sa is not None:
                out.extend(_area_features(sa.difference(ub), _props(names_a, a[i].properties, names_b, None)))
    if mode in ("SymmetricDifference", "Union"):
        ua = union_all(ga)
        for j, sb in enumerate(gb):
            if sb is not None:
                out.extend(_area_features(sb.difference(ua), _props(names_a, None, names_b, b[j].properties)))
    return a.with_features(out)


def self_overlaps(c: FeatureCollection) -> FeatureCollection:
    """Areas shared by two features of one collection, one per pair i < j."""
    require_kinds(c, set(POLYGON_KINDS), "overlap", allow_null=True)
    geoms = shapely_geoms(c)
    tree = shapely.STRtree([g if g is not None else shapely.Point() for g in geoms])
    names = {n: n for n in c.field_names()}
    out = []
    for i, s in enumerate(geoms):
        if s is None:
            continue
        for j in sorted(tree.query(s, predicate="intersects").tolist()):
            if j <= i:
                continue
            props = {n: c[i].properties.get(n) for n in names}
            props.update({"index_1": i, "index_2": j})
            out.extend(_area_features(s.intersection(geoms[j]), props))
    return c.with_features(out)


def split_polygon_by_line(polygons: FeatureCollection, lines: FeatureCollection) -> FeatureCollection:
    """Cut each polygon by every line crossing it; adds ``part_index``."""
    require_kinds(polygons, set(POLYGON_KINDS), "split (polygons)")
    require_kinds(lines, {"LineString", "MultiLineString"}, "split (lines)")
    line_geoms = shapely_geoms(lines)
    tree = shapely.STRtree(line_geoms) if line_geoms else None
    out = []
    for f in polygons.features:
        s = to_shapely(f.geometry)
        hits = [] if tree is None else sorted(tree.query(s, predicate="intersects").tolist())
        pieces = [s]
        if hits:
            cutter = union_all([line_geoms[k] for k in hits])
            pieces = [p for g in _split_parts(s) for p in sops.split(g, cutter).geoms]
        for k, piece in enumerate(p for p in pieces if p.area > 0):
            props = dict(f.properties)
            props["part_index"] = k
            out.append(Feature(props, from_shapely(piece, 2), f.id))
    return polygons.with_features(out)


def _split_parts(s) -> list:
    return list(s.geoms) if hasattr(s, "geoms") else [s]


def lines_to_polygons(c: FeatureCollection, tolerance: float = 0.0) -> FeatureCollection:
    """Node all lines and polygonize the enclosed faces.

    Open lines whose two ends lie within ``tolerance`` are closed first. A
    face takes the attributes of the longest input line sharing a stretch
    of its boundary (lowest index on ties).
    """
    require_kinds(c, {"LineString", "MultiLineString"}, "lines to polygons")
    if tolerance < 0:
        raise ParameterError("tolerance must be nonnegative")
    geoms = []
    for f in c.features:
        parts = []
        for coords in f.geometry.parts():
            coords = list(coords)
            (x0, y0), (x1, y1) = coords[0], coords[-1]
            if (x0, y0) != (x1, y1) and math.hypot(x1 - x0, y1 - y0) <= tolerance and len(coords) > 2:
                coords[-1] = coords[0]
            parts.append(coords)
        geoms.append(shapely.MultiLineString(parts))
    noded = union_all(geoms)
    faces = list(sops.polygonize(noded))
    if not faces:
        raise TopologyError("no closed face found among the input lines")
    lengths = [g.length for g in geoms]
    out = []
    for face in faces:
        boundary = face.boundary
        best = None
        for k, g in enumerate(geoms):
            if g.intersection(boundary).length > 0:
                if best is None or lengths[k] > lengths[best]:
                    best = k
        src = c[best] if best is not None else None
        props = dict(src.properties) if src is not None else {}
        out.append(Feature(props, from_shapely(face, 2), None if src is None else src.id))
    return c.with_features(out)


def features_to_lines(c: FeatureCollection) -> FeatureCollection:
    """Polygon rings become closed LineStrings with ``ring_index``; lines pass through."""
    require_kinds(c, LINE_AND_POLYGON, "features to lines")
    out = []
    for f in c.features:
        if f.geometry.is_line:
            out.append(f)
            continue
        k = 0
        for poly in f.geometry.parts():
            for ring in poly:
                props = dict(f.properties)
                props["ring_index"] = k
                out.append(Feature(props, Geometry("LineString", ring), f.id))
                k += 1
    return c.with_features(out)


def vertices_to_points(c: FeatureCollection) -> FeatureCollection:
    """One Point per vertex with ``vertex_index``; ring closures emitted once."""
    require_kinds(c, LINE_AND_POLYGON, "vertices to points")
    out = []
    for f in c.features:
        g = f.geometry
        seqs = [list(p) for p in g.parts()] if g.is_line else [list(r)[:-1] for poly in g.parts() for r in poly]
        k = 0
        for seq in seqs:
            for x, y in seq:
                props = dict(f.properties)
                props["vertex_index"] = k
                out.append(Feature(props, Geometry.point(x, y), f.id))
                k += 1
    return c.with_features(out)


def require_polygons(c: FeatureCollection, op: str) -> None:
    for i, f in enumerate(c.features):
        if f.geometry is None or not f.geometry.is_polygon:
            raise GeometryTypeError(f"{op}: feature {i} is not a polygon")
