"""Brute-force reference implementations used only by the tests.

Each one is written independently of the package code it checks.
"""

from __future__ import annotations

import math
from itertools import combinations


def shoelace(ring) -> float:
    n = len(ring)
    return abs(sum(ring[i][0] * ring[(i + 1) % n][1] - ring[(i + 1) % n][0] * ring[i][1] for i in range(n))) / 2


def polygon_area(coords) -> float:
    """Exterior minus holes, for GeoJSON-style polygon coordinates."""
    return shoelace(coords[0]) - sum(shoelace(h) for h in coords[1:])


def geometry_area(g) -> float:
    if g is None:
        return 0.0
    if g.kind == "Polygon":
        return polygon_area(g.coordinates)
    if g.kind == "MultiPolygon":
        return sum(polygon_area(p) for p in g.coordinates)
    return 0.0


def seg_dist(p, a, b):
    """Distance from p to segment ab and the closest point."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L = dx * dx + dy * dy
    t = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L))
    q = (ax + t * dx, ay + t * dy)
    return math.dist(p, q), q


def on_boundary(p, ring, eps=1e-12) -> bool:
    return any(seg_dist(p, ring[i], ring[i + 1])[0] <= eps for i in range(len(ring) - 1))


def inside_ring(p, ring) -> bool:
    """Even-odd ray casting; boundary handling is left to the caller."""
    x, y = p
    inside = False
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xc > x:
                inside = not inside
    return inside


def point_in_polygon_closed(p, coords) -> bool:
    """Closed-set containment for one polygon (boundary counts)."""
    if any(on_boundary(p, r) for r in coords):
        return True
    if not inside_ring(p, coords[0]):
        return False
    return not any(inside_ring(p, h) for h in coords[1:])


def union_find_labels(pts, threshold):
    n = len(pts)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for i, j in combinations(range(n), 2):
        if math.dist(pts[i], pts[j]) <= threshold:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    roots = [find(i) for i in range(n)]
    relabel = {}
    return [relabel.setdefault(r, len(relabel)) for r in roots]


def same_partition(a, b) -> bool:
    return len(a) == len(b) and all((a[i] == a[j]) == (b[i] == b[j]) for i, j in combinations(range(len(a)), 2))


def closest_pair(pts):
    best = None
    for i, j in combinations(range(len(pts)), 2):
        d = math.dist(pts[i], pts[j])
        if best is None or d < best[0]:
            best = (d, i, j)
    return best


def nearest_point_target(p, targets):
    best = None
    for j, t in enumerate(targets):
        d = math.dist(p, t)
        if best is None or d < best[0]:
            best = (d, j)
    return best


def nearest_line_target(p, line_coords):
    best = None
    for j, coords in enumerate(line_coords):
        for a, b in zip(coords, coords[1:]):
            d, q = seg_dist(p, a, b)
            if best is None or d < best[0]:
                best = (d, j, q)
    return best


def min_rect_area_sweep(pts, step_deg=0.1):
    """Smallest axis-aligned box area over rotations in ``step_deg`` steps."""
    best = math.inf
    k = 0
    while k * step_deg < 90.0:
        a = math.radians(k * step_deg)
        c, s = math.cos(a), math.sin(a)
        us = [x * c + y * s for x, y in pts]
        vs = [-x * s + y * c for x, y in pts]
        best = min(best, (max(us) - min(us)) * (max(vs) - min(vs)))
        k += 1
    return best


def regular_polygon_area(n: int, r: float) -> float:
    return n / 2 * r * r * math.sin(2 * math.pi / n)


def web_mercator(lon, lat, R=6378137.0):
    return R * math.radians(lon), R * math.log(math.tan(math.pi / 4 + math.radians(lat) / 2))


def rect_area_at(pts, deg):
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    us = [x * c + y * s for x, y in pts]
    vs = [-x * s + y * c for x, y in pts]
    return (max(us) - min(us)) * (max(vs) - min(vs))


def min_rect_area_refined(pts, step_deg=0.1, keep=5):
    """0.1 degree sweep, then a bounded 1-D search around the best few angles.

    The area curve has a kink at its minimum, so the plain sweep is only
    accurate to O(step); the local search brings it to ~1e-12.
    """
    from scipy.optimize import minimize_scalar

    n = int(round(90.0 / step_deg))
    samples = sorted((rect_area_at(pts, k * step_deg), k * step_deg) for k in range(n))
    best = samples[0][0]
    for _, deg in samples[:keep]:
        r = minimize_scalar(lambda d: rect_area_at(pts, d), bounds=(deg - step_deg, deg + step_deg),
                            method="bounded", options={"xatol": 1e-12})
        best = min(best, r.fun)
    return best


def euler_bounded_faces(segments) -> int:
    """Bounded face count of a connected planar graph given as noded segments."""
    verts = {p for s in segments for p in s}
    edges = {frozenset(s) for s in segments}
    return 2 - len(verts) + len(edges) - 1
