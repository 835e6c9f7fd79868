"""Lengths, centroids and representative points."""

from __future__ import annotations

import math
import warnings

from ..errors import EmptyInputError, GeometryTypeError, GeoWarning, ParameterError
from ..model import FeatureCollection, Geometry
from ._geom import geometry_length as _length
from ._geom import polygon_area, polyline_length

CENTROID_MODES = ("Centroid", "RepresentativePoint")


def geometry_length(c: FeatureCollection, field: str = "length") -> FeatureCollection:
    """Add ``field`` holding the length (lines) or perimeter (polygons).

    Values are in CRS units; a :class:`GeoWarning` is issued for degrees.
    """
    out = []
    for i, f in enumerate(c.features):
        g = f.geometry
        if g is not None and g.is_point:
            raise GeometryTypeError(f"feature {i} is {g.kind}; length needs lines or polygons")
        props = dict(f.properties)
        props[field] = None if g is None else _length(g)
        out.append(f.with_properties(props))
    if c.crs.is_geographic and c.features:
        warnings.warn(f"lengths computed in degrees on {c.crs.name}", GeoWarning, stacklevel=2)
    return c.with_features(out)


def _polygon_centroid(polys) -> tuple[float, float] | None:
    ox, oy = polys[0][0][0]
    a_sum = cx = cy = 0.0
    for poly in polys:
        for ring in poly:
            for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
                x0, y0, x1, y1 = x0 - ox, y0 - oy, x1 - ox, y1 - oy
                cross = x0 * y1 - x1 * y0
                a_sum += cross
                cx += (x0 + x1) * cross
                cy += (y0 + y1) * cross
    if a_sum == 0:
        return None
    return ox + cx / (3 * a_sum), oy + cy / (3 * a_sum)


def _line_centroid(lines) -> tuple[float, float] | None:
    total = sx = sy = 0.0
    for coords in lines:
        for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            total += seg
            sx += seg * (x0 + x1) / 2
            sy += seg * (y0 + y1) / 2
    if total == 0:
        return None
    return sx / total, sy / total


def _mean(points) -> tuple[float, float]:
    pts = list(points)
    return sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts)


def centroid(g: Geometry) -> tuple[float, float]:
    """Area-weighted, then length-weighted, then vertex-mean fallback."""
    if g.is_empty:
        raise EmptyInputError("centroid of an empty geometry")
    if g.is_polygon:
        polys = g.parts()
        p = _polygon_centroid(polys)
        if p is not None:
            return p
        lines = [ring for poly in polys for ring in poly]
        return _line_centroid(lines) or _mean(pt for ln in lines for pt in ln)
    if g.is_line:
        return _line_centroid(g.parts()) or _mean(g.positions())
    return _mean(g.positions())


def _scanline_chords(poly, y: float) -> list[tuple[float, float]]:
    xs = []
    for ring in poly:
        for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
            if (y0 <= y < y1) or (y1 <= y < y0):
                xs.append(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
    xs.sort()
    return [(xs[k], xs[k + 1]) for k in range(0, len(xs) - 1, 2)]


def _point_along(coords, frac: float) -> tuple[float, float]:
    target = polyline_length(coords) * frac
    run = 0.0
    for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        if seg > 0 and run + seg >= target:
            t = (target - run) / seg
            return x0 + t * (x1 - x0), y0 + t * (y1 - y0)
        run += seg
    return coords[-1]


def representative_point(g: Geometry) -> tuple[float, float]:
    """A point on the geometry; strictly interior for non-degenerate polygons.

    Polygons: the largest part is cut by a horizontal scanline halfway
    between the two middle distinct vertex heights, so it never passes
    through a vertex, and the midpoint of the widest chord is returned.
    Lines: the point halfway along the longest part. Points: the input point
    nearest the vertex mean.
    """
    if g.is_empty:
        raise EmptyInputError("representative point of an empty geometry")
    if g.is_polygon:
        poly = max(g.parts(), key=lambda p: abs(polygon_area(p)))
        ys = sorted({y for ring in poly for _, y in ring})
        if len(ys) >= 2:
            m = len(ys) // 2
            y = (ys[m - 1] + ys[m]) / 2
            chords = _scanline_chords(poly, y)
            if chords:
                a, b = max(chords, key=lambda ab: ab[1] - ab[0])
                return (a + b) / 2, y
        return centroid(g)
    if g.is_line:
        longest = max(g.parts(), key=polyline_length)
        return _point_along(longest, 0.5)
    pts = list(g.positions())
    mx, my = _mean(pts)
    return min(pts, key=lambda p: (p[0] - mx) ** 2 + (p[1] - my) ** 2)


def centroid_points(c: FeatureCollection, mode: str = "Centroid") -> FeatureCollection:
    """Replace each geometry by its centroid or representative point."""
    fn = {"centroid": centroid, "representativepoint": representative_point}.get(str(mode).lower())
    if fn is None:
        raise ParameterError(f"mode must be one of {CENTROID_MODES}, got {mode!r}")
    out = []
    for i, f in enumerate(c.features):
        if f.geometry is None or f.geometry.is_empty:
            raise EmptyInputError(f"feature {i} has an empty geometry")
        x, y = fn(f.geometry)
        out.append(f.with_geometry(Geometry.point(x, y)))
    return c.with_features(out)
