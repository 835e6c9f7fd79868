"""Thiessen (Voronoi) polygons by half-plane clipping."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ..errors import EmptyInputError
from ..model import Feature, FeatureCollection, Geometry
from ._geom import points_array

ENVELOPE_MARGIN = 0.10  # fraction of the bbox diagonal added on every side


def clip_half_plane(poly: list, nx: float, ny: float, c: float) -> list:
    """Keep the part of convex ``poly`` where ``nx*x + ny*y <= c``."""
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        dp = nx * p[0] + ny * p[1] - c
        dq = nx * q[0] + ny * q[1] - c
        if dp <= 0:
            out.append(p)
        if (dp < 0 < dq) or (dq < 0 < dp):
            t = dp / (dp - dq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _neighbors(pts: np.ndarray) -> list[list[int]]:
    n = len(pts)
    if n >= 3:
        try:
            tri = Delaunay(pts)
        except QhullError:
            pass  # collinear: every other seed is a candidate
        else:
            indptr, idx = tri.vertex_neighbor_vertices
            return [sorted(idx[indptr[i]:indptr[i + 1]].tolist()) for i in range(n)]
    return [[j for j in range(n) if j != i] for i in range(n)]


def clip_envelope(pts: np.ndarray) -> tuple[float, float, float, float]:
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    m = ENVELOPE_MARGIN * math.hypot(xmax - xmin, ymax - ymin)
    return float(xmin - m), float(ymin - m), float(xmax + m), float(ymax + m)


def voronoi(points: FeatureCollection) -> FeatureCollection:
    """One cell per input point, clipped to the expanded bounding box.

    Repeated seeds share the cell of their first occurrence.
    """
    pts = points_array(points, "voronoi")
    uniq, first, inverse = np.unique(pts, axis=0, return_index=True, return_inverse=True)
    if len(uniq) < 2:
        raise EmptyInputError("voronoi needs at least 2 distinct points")
    order = np.argsort(first)  # distinct seeds in input order
    seeds = uniq[order]
    rank = np.empty(len(order), dtype=int)
    rank[order] = np.arange(len(order))
    origin = seeds.mean(axis=0)
    local = seeds - origin
    x0, y0, x1, y1 = clip_envelope(local)
    box = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    cells = []
    for i, nbrs in enumerate(_neighbors(local)):
        poly = box
        pi = local[i]
        for j in nbrs:
            d = local[j] - pi
            mid = (local[j] + pi) / 2
            poly = clip_half_plane(poly, float(d[0]), float(d[1]), float(d @ mid))
        ring = tuple((x + origin[0], y + origin[1]) for x, y in poly)
        cells.append(Geometry("Polygon", (ring + (ring[0],),)))
    out = []
    for k, f in enumerate(points.features):
        out.append(Feature(dict(f.properties), cells[rank[int(np.ravel(inverse)[k])]], f.id))
    return points.with_features(out)
