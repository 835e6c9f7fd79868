"""Geometry plumbing shared by the operations.

Boolean overlay, buffering and noding are delegated to shapely (GEOS);
these helpers convert between shapely objects and :class:`Geometry`, and
hold the few planar primitives the operations compute directly.
"""

from __future__ import annotations

import math
import warnings
from typing import Iterable

import numpy as np
import shapely
from shapely import geometry as sg

from ..errors import EmptyInputError, GeographicCRSError, GeometryTypeError, GeoWarning
from ..model import Feature, FeatureCollection, Geometry

BUFFER_QUAD_SEGS = 16


def to_shapely(g: Geometry):
    c = g.coordinates
    if g.kind == "Point":
        return sg.Point(c)
    if g.kind == "MultiPoint":
        return sg.MultiPoint(list(c))
    if g.kind == "LineString":
        return sg.LineString(c)
    if g.kind == "MultiLineString":
        return sg.MultiLineString([list(p) for p in c])
    if g.kind == "Polygon":
        return sg.Polygon(c[0], c[1:]) if c else sg.Polygon()
    return sg.MultiPolygon([sg.Polygon(p[0], p[1:]) for p in c])


def from_shapely(s, dim: int | None = None) -> Geometry | None:
    """Convert a shapely geometry; ``None`` when empty.

    ``dim`` restricts a mixed result (e.g. a GeometryCollection coming out of
    an intersection) to parts of that dimension: 0 points, 1 lines, 2 areas.
    """
    if s is None or s.is_empty:
        return None
    parts = _flatten(s)
    if dim is None:
        dim = max(_dim(p) for p in parts)
    parts = [p for p in parts if _dim(p) == dim and not p.is_empty]
    if dim == 2:
        parts = [p for p in parts if p.area > 0]
    if dim == 1:
        parts = [p for p in parts if p.length > 0]
    if not parts:
        return None
    if dim == 0:
        pts = [(p.x, p.y) for p in parts]
        return Geometry("Point", pts[0]) if len(pts) == 1 else Geometry("MultiPoint", tuple(pts))
    if dim == 1:
        lines = [tuple(p.coords) for p in parts]
        return Geometry("LineString", lines[0]) if len(lines) == 1 else Geometry("MultiLineString", tuple(lines))
    polys = [_poly_coords(p) for p in parts]
    return Geometry("Polygon", polys[0]) if len(polys) == 1 else Geometry("MultiPolygon", tuple(polys))


def _poly_coords(p) -> tuple:
    return (tuple(p.exterior.coords),) + tuple(tuple(r.coords) for r in p.interiors)


def _flatten(s) -> list:
    if hasattr(s, "geoms"):
        out = []
        for g in s.geoms:
            out.extend(_flatten(g))
        return out
    return [s]


def _dim(s) -> int:
    if isinstance(s, sg.Point):
        return 0
    if isinstance(s, (sg.LineString, sg.LinearRing)):
        return 1
    return 2


def polygon_parts(g: Geometry) -> tuple:
    return g.parts() if g.is_polygon else ()


def line_parts(g: Geometry) -> tuple:
    if g.is_line:
        return g.parts()
    if g.is_polygon:
        return tuple(ring for poly in g.parts() for ring in poly)
    return ()


def point_parts(g: Geometry) -> tuple:
    return g.parts() if g.is_point else ()


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def polyline_length(coords) -> float:
    return sum(math.hypot(x1 - x0, y1 - y0) for (x0, y0), (x1, y1) in zip(coords, coords[1:]))


def geometry_length(g: Geometry) -> float:
    return sum(polyline_length(part) for part in line_parts(g))


def polygon_area(poly) -> float:
    from ..model import ring_signed_area

    return sum(ring_signed_area(r) for r in poly)


def geometry_area(g: Geometry) -> float:
    return sum(polygon_area(p) for p in polygon_parts(g))


def closest_on_segment(px, py, ax, ay, bx, by) -> tuple[float, float, float]:
    """Closest point on segment AB to P (clamped) and its distance."""
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / denom
        t = 0.0 if t < 0 else 1.0 if t > 1 else t
    qx, qy = ax + t * dx, ay + t * dy
    return qx, qy, math.hypot(px - qx, py - qy)


def segments_array(lines: Iterable) -> np.ndarray:
    """``(n, 4)`` array of segments ``ax, ay, bx, by`` from coordinate sequences."""
    segs = []
    for coords in lines:
        for a, b in zip(coords, coords[1:]):
            segs.append((a[0], a[1], b[0], b[1]))
    return np.asarray(segs, dtype=float).reshape(-1, 4)


def closest_on_segments(px: float, py: float, segs: np.ndarray):
    """Vectorized :func:`closest_on_segment`; returns ``(qx, qy, d)`` arrays."""
    ax, ay, bx, by = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, ((px - ax) * dx + (py - ay) * dy) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    qx, qy = ax + t * dx, ay + t * dy
    return qx, qy, np.hypot(px - qx, py - qy)


# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------


def require_kinds(c: FeatureCollection, allowed: set, op: str, allow_null: bool = False) -> None:
    for i, f in enumerate(c.features):
        if f.geometry is None:
            if allow_null:
                continue
            raise GeometryTypeError(f"{op}: feature {i} has no geometry")
        if f.geometry.kind not in allowed:
            raise GeometryTypeError(
                f"{op}: feature {i} is {f.geometry.kind}; expected one of {sorted(allowed)}"
            )


def require_nonempty(c: FeatureCollection, op: str) -> None:
    if not c.features:
        raise EmptyInputError(f"{op}: input collection is empty")


def require_planar(c: FeatureCollection, op: str, allow_geographic: bool) -> None:
    if c.crs.is_geographic:
        if not allow_geographic:
            raise GeographicCRSError(
                f"{op}: collection is in geographic {c.crs.name} (degrees); "
                "reproject to a projected CRS (e.g. UTM) first or pass allow_geographic"
            )
        warnings.warn(f"{op}: computing in degrees on {c.crs.name}", GeoWarning, stacklevel=3)


def shapely_geoms(c: FeatureCollection) -> list:
    return [None if f.geometry is None else to_shapely(f.geometry) for f in c.features]


def point_xy(f: Feature) -> tuple[float, float]:
    g = f.geometry
    if g is None or g.kind != "Point":
        raise GeometryTypeError("expected a Point geometry")
    return g.coordinates


def points_array(c: FeatureCollection, op: str) -> np.ndarray:
    require_kinds(c, {"Point"}, op)
    return np.asarray([f.geometry.coordinates for f in c.features], dtype=float).reshape(-1, 2)


def union_all(geoms: list):
    geoms = [g for g in geoms if g is not None and not g.is_empty]
    if not geoms:
        return sg.GeometryCollection()
    return shapely.union_all(geoms)
