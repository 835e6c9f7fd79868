"""Convex hulls, minimum-area rectangles and polygon orientation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import EmptyInputError, FieldError, GeometryTypeError, ParameterError, TopologyError
from ..model import Feature, FeatureCollection, Geometry, value_type

BOUNDING_KINDS = ("RotatedRectangle", "ConvexHull")


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[float, float]]:
    """Andrew's monotone chain; counterclockwise, no repeated closing vertex.

    Collinear input yields its two extreme points; a single point yields one.
    """
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Rectangle:
    corners: tuple  # counterclockwise, unclosed
    width: float  # extent along ``angle``
    height: float
    angle: float  # radians, direction of the first side

    @property
    def area(self) -> float:
        return self.width * self.height


def min_area_rectangle(points) -> Rectangle:
    """Minimum-area enclosing rectangle.

    One side of an optimal rectangle is collinear with a hull edge, so each
    hull edge direction is tried; the first minimum wins.
    """
    hull = convex_hull(points)
    if not hull:
        raise EmptyInputError("no points")
    if len(hull) == 1:
        return Rectangle((hull[0],) * 4, 0.0, 0.0, 0.0)
    best = None
    n = len(hull)
    edges = n if n > 2 else 1
    for k in range(edges):
        (x0, y0), (x1, y1) = hull[k], hull[(k + 1) % n]
        length = math.hypot(x1 - x0, y1 - y0)
        ux, uy = (x1 - x0) / length, (y1 - y0) / length
        vx, vy = -uy, ux
        us = [(p[0] - x0) * ux + (p[1] - y0) * uy for p in hull]
        vs = [(p[0] - x0) * vx + (p[1] - y0) * vy for p in hull]
        umin, umax, vmin, vmax = min(us), max(us), min(vs), max(vs)
        area = (umax - umin) * (vmax - vmin)
        if best is None or area < best[0]:
            best = (area, x0, y0, ux, uy, umin, umax, vmin, vmax)
    _, x0, y0, ux, uy, umin, umax, vmin, vmax = best
    vx, vy = -uy, ux

    def at(u, v):
        return (x0 + u * ux + v * vx, y0 + u * uy + v * vy)

    corners = (at(umin, vmin), at(umax, vmin), at(umax, vmax), at(umin, vmax))
    return Rectangle(corners, umax - umin, vmax - vmin, math.atan2(uy, ux))


def _collect_positions(features) -> list:
    pts = []
    for f in features:
        if f.geometry is not None:
            pts.extend(f.geometry.positions())
    return pts


def _bounding_feature(pts: list, kind: str, props: dict) -> Feature:
    hull = convex_hull(pts)
    if len(hull) < 2:
        raise EmptyInputError("bounding geometry needs at least 2 distinct points")
    if len(hull) == 2:
        geom = Geometry("LineString", tuple(hull))
        area, degenerate = 0.0, True
    elif kind == "ConvexHull":
        geom = Geometry("Polygon", (tuple(hull) + (hull[0],),))
        area, degenerate = _ring_area(hull), False
    else:
        r = min_area_rectangle(hull)
        geom = Geometry("Polygon", (r.corners + (r.corners[0],),))
        area, degenerate = r.area, False
    out = dict(props)
    out.update({"kind": kind, "area": area, "degenerate": degenerate})
    return Feature(out, geom)


def _ring_area(pts) -> float:
    n = len(pts)
    return abs(sum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n))) / 2


def min_bounding_geometry(c: FeatureCollection, kind: str = "RotatedRectangle",
                          group_field: str | None = None) -> FeatureCollection:
    """Bounding rectangle or hull of all vertices, or of each ``group_field`` value.

    Collinear input gives a LineString flagged ``degenerate``.
    """
    kind = {k.lower(): k for k in BOUNDING_KINDS}.get(str(kind).lower())
    if kind is None:
        raise ParameterError(f"kind must be one of {BOUNDING_KINDS}")
    if group_field is None:
        return c.with_features([_bounding_feature(_collect_positions(c.features), kind, {})])
    if c.features and group_field not in c.field_names():
        raise FieldError(f"no field {group_field!r} to group by")
    groups: dict = {}
    for f in c.features:
        groups.setdefault(f.properties.get(group_field), []).append(f)
    types = {value_type(k) for k in groups} - {"null"}
    if len(types) > 1:
        raise ParameterError(f"group field {group_field!r} mixes types {sorted(types)}")
    keys = sorted(k for k in groups if k is not None) + ([None] if None in groups else [])
    return c.with_features([_bounding_feature(_collect_positions(groups[k]), kind, {group_field: k})
                            for k in keys])


def _fold_degrees(rad: float) -> float:
    d = math.degrees(rad) % 180.0
    if d >= 180.0 - 1e-9 or abs(d) < 1e-9:
        return 0.0
    return d


def polygon_direction(g: Geometry) -> float:
    """Angle in degrees [0, 180) of the long side of the minimum rectangle."""
    if not g.is_polygon:
        raise GeometryTypeError(f"direction needs a polygon, got {g.kind}")
    pts = [p for poly in g.parts() for p in poly[0]]
    r = min_area_rectangle(pts)
    if r.area <= 0:
        raise TopologyError("direction of a degenerate (zero-area) polygon is undefined")
    along, across = _fold_degrees(r.angle), _fold_degrees(r.angle + math.pi / 2)
    scale = max(r.width, r.height)
    if abs(r.width - r.height) <= 1e-9 * scale:
        return min(along, across)
    return along if r.width > r.height else across


def main_direction(c: FeatureCollection, field: str = "Direction") -> FeatureCollection:
    out = []
    for i, f in enumerate(c.features):
        if f.geometry is None:
            raise GeometryTypeError(f"feature {i} has no geometry")
        props = dict(f.properties)
        props[field] = polygon_direction(f.geometry)
        out.append(f.with_properties(props))
    return c.with_features(out)
