"""Generate the stock benchmark catalog under src/geoagents/benchmark/data.

Every dataset is synthetic and built so the expected check values follow
from the construction (rectangle areas, chord lengths, known counts). The
script is deterministic: rerunning it rewrites byte-identical files.

    python3 tools/build_catalog.py [--out DIR]
"""

from __future__ import annotations

import argparse
import json
import math
import shutil
from pathlib import Path

from scipy.integrate import quad

ROOT = Path(__file__).resolve().parents[1]
DEFAULT_OUT = ROOT / "src" / "geoagents" / "benchmark" / "data"

FC, CG = "FunctionCalling", "CodeGeneration"
PRE = "from geoagents.ops import *\n"

# local-frame origins per projected CRS
ORIGINS = {
    "EPSG:32617": (500000.0, 4400000.0),
    "EPSG:32618": (585000.0, 4510000.0),
    "EPSG:32610": (525000.0, 5040000.0),
    "EPSG:32611": (400000.0, 3800000.0),
}
SC_ORIGIN = (496000.0, 3762000.0)
BUFFER_64 = 32 * math.sin(math.pi / 32)  # area of the 64-gon buffer of a point, per r^2


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------

def shift(origin, pts):
    ox, oy = origin
    return [[ox + x, oy + y] for x, y in pts]


def box(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]


def rotated_box(cx, cy, length, width, deg):
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    corners = [(-length / 2, -width / 2), (length / 2, -width / 2), (length / 2, width / 2), (-length / 2, width / 2)]
    ring = [(cx + x * c - y * s, cy + x * s + y * c) for x, y in corners]
    return ring + [ring[0]]


def rect_points(cx, cy, a, b, deg, interior):
    """Corners of an (a x b) rectangle rotated by deg, plus interior points in local units."""
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    local = [(-a / 2, -b / 2), (a / 2, -b / 2), (a / 2, b / 2), (-a / 2, b / 2)] + list(interior)
    return [(cx + x * c - y * s, cy + x * s + y * c) for x, y in local]


def feature(props, gtype, coords, fid=None):
    f = {"type": "Feature", "properties": props, "geometry": {"type": gtype, "coordinates": coords}}
    if fid is not None:
        f["id"] = fid
    return f


def collection(features, crs="EPSG:4326"):
    doc = {"type": "FeatureCollection"}
    if crs is not None and crs != "EPSG:4326":
        doc["crs"] = {"type": "name", "properties": {"name": crs}}
    doc["features"] = features
    return doc


def local_points(crs, rows, origin=None):
    origin = origin or ORIGINS[crs]
    return collection([feature(p, "Point", shift(origin, [xy])[0]) for p, xy in rows], crs)


def local_polygons(crs, rows, origin=None):
    origin = origin or ORIGINS[crs]
    return collection([feature(p, "Polygon", [shift(origin, r) for r in rings]) for p, rings in rows], crs)


def local_lines(crs, rows, origin=None):
    origin = origin or ORIGINS[crs]
    return collection([feature(p, "LineString", shift(origin, pts)) for p, pts in rows], crs)


def seg_dist(p, a, b):
    (px, py), (ax, ay), (bx, by) = p, a, b
    dx, dy = bx - ax, by - ay
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)))
    qx, qy = ax + t * dx, ay + t * dy
    return math.hypot(px - qx, py - qy), (qx, qy)


def meridian_arc(lat0, lat1, a=6378137.0, f=1 / 298.257223563):
    """Meridian arc length by quadrature of the meridional radius of curvature."""
    e2 = f * (2 - f)
    m = lambda phi: a * (1 - e2) / (1 - e2 * math.sin(phi) ** 2) ** 1.5  # noqa: E731
    return quad(m, math.radians(lat0), math.radians(lat1), epsabs=1e-9, epsrel=1e-13)[0]


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------

L17 = "EPSG:32617"

RECTANGLES = [(1, 0.0, 0.0, 0), (2, 600.0, 0.0, 30), (3, 0.0, 600.0, 90), (4, 600.0, 600.0, 135)]

POINT_GROUPS = [
    ("A", (0.0, 0.0, 40.0, 20.0, 30), [(0.0, 0.0), (10.0, 3.0), (-8.0, -5.0)]),
    ("B", (1500.0, 200.0, 30.0, 30.0, 0), [(0.0, 0.0), (5.0, 7.0), (-6.0, 4.0)]),
    ("C", (700.0, 1400.0, 50.0, 10.0, 45), [(0.0, 0.0), (12.0, -2.0)]),
]

AREA = [(1, "A1", box(0, 0, 1000, 1000)), (2, "A2", box(2000, 0, 3000, 1000))]
ROAD_XS = [-500.0, 500.0, 1500.0, 2500.0, 3500.0]
LINE = [(-200.0, 0.0), (1200.0, 0.0)]
POINT_XY = [(1, 100.0, 300.0), (2, 400.0, -200.0), (3, 700.0, 500.0), (4, 1000.0, -100.0),
            (5, 1300.0, 200.0), (6, 250.0, 320.0)]

ZONES = [
    ("Z1", "North Ridge", [box(0, 0, 1000, 1000)]),
    ("Z2", "River Basin", [box(1500, 0, 3000, 1500), box(2000, 500, 2500, 1000)[::-1]]),
    ("Z3", "East Hills", [box(0, 2000, 1000, 3000)]),
]
# (city, x, y, p, zone or None); one point sits in the Z2 hole
RAINFALL = [
    ("Ashford", 200.0, 300.0, 1200.0, "Z1"),
    ("Brookton", 700.0, 800.0, 950.0, "Z1"),
    ("Cedarville", 500.0, 500.0, 1100.0, "Z1"),
    ("Dunmore", 1700.0, 200.0, 800.0, "Z2"),
    ("Elmwood", 2800.0, 1300.0, 1350.0, "Z2"),
    ("Fairhaven", 1800.0, 1200.0, 600.0, "Z2"),
    ("Glenrock", 2250.0, 750.0, 1500.0, None),
    ("Hillcrest", 300.0, 2500.0, 1050.0, "Z3"),
    ("Ironwood", 800.0, 2200.0, 700.0, "Z3"),
    ("Juniper", 1200.0, 1200.0, 900.0, None),
    ("Kingsley", 3500.0, 500.0, 400.0, None),
    ("Lakeside", 500.0, 1700.0, 1250.0, None),
]
AREA_STATS = [("R1", 0, 0, 120.5), ("R1", 1, 0, 98.0), ("R2", 2, 0, 143.25), ("R2", 3, 0, 87.75),
              ("R2", 4, 0, 110.0), ("R3", 5, 0, 64.5)]

PA_COUNTIES = [  # name, box, population; ALAND is the exact box area
    ("Allegheny", (0, 0, 20000, 30000), 1250000),
    ("Centre", (40000, 10000, 80000, 40000), 158000),
    ("Dauphin", (100000, 0, 125000, 20000), 286000),
    ("Philadelphia", (150000, 5000, 160000, 20000), 1600000),
]
FASTFOOD_PER_COUNTY = {"Allegheny": 3, "Centre": 4, "Dauphin": 2, "Philadelphia": 1}

PACOUNTIES = [("Erie", (0.0, 0.0, 30000.0, 10000.0, 0)), ("Potter", (60000.0, 0.0, 25000.0, 10000.0, 90)),
              ("Lancaster", (0.0, 60000.0, 20000.0, 8000.0, 45)), ("Wayne", (60000.0, 60000.0, 12000.0, 12000.0, 0))]

SC_COUNTIES = [("Richland", (0, 0, 40000, 30000)), ("Lexington", (-50000, 0, -5000, 20000)),
               ("Kershaw", (0, 35000, 20000, 75000))]
SC_STATIONS = [("SC-001", 5000, 5000, "Richland"), ("SC-002", 20000, 15000, "Richland"),
               ("SC-003", 35000, 25000, "Richland"), ("SC-004", -40000, 10000, "Lexington"),
               ("SC-005", -10000, 15000, "Lexington"), ("SC-006", 10000, 50000, "Kershaw")]

SCHOOLS = [("Hand Middle", 0.0, 0.0), ("Dreher High", 3000.0, 0.0), ("Rosewood Elementary", 0.0, 3000.0),
           ("Logan Elementary", 3000.0, 3000.0)]
SIDEWALKS = [("W1", [(-1000.0, 0.0), (1000.0, 0.0)]), ("W2", [(0.0, -1000.0), (0.0, 1000.0)]),
             ("W3", [(2000.0, 0.0), (4000.0, 0.0)]), ("W4", [(3000.0, 2000.0), (3000.0, 4000.0)]),
             ("W5", [(-1000.0, 1500.0), (4000.0, 1500.0)])]
SIDEWALK_EXPECTED = {"Hand Middle": 2000.0, "Dreher High": 1000.0, "Logan Elementary": 1000.0}

COFFEE = [(1, "Bean There", 0.0, 0.0), (2, "Daily Grind", 300.0, 0.0), (3, "Cup of Joe", 1000.0, 200.0),
          (4, "Brew Lab", 1000.0, 900.0), (5, "Steam Room", 2500.0, 0.0), (6, "Roastery", 2500.0, 450.0),
          (7, "Perk Up", 4000.0, 1000.0), (8, "Night Owl", 5200.0, 1000.0)]
BUS = [("M1", 100.0, 600.0), ("M2", 1800.0, 500.0), ("M3", 2600.0, 900.0), ("M4", 4200.0, 200.0),
       ("M5", 6500.0, 3000.0), ("M6", 5600.0, 1900.0)]

STREETS = [("S1", [(0.0, 0.0), (500.0, 0.0)]), ("S2", [(0.0, 300.0), (500.0, 300.0)]),
           ("S3", [(800.0, 0.0), (800.0, 300.0)])]
TREES_NEAR = ([(25.0 + 50 * k, 8.0 if k % 2 else -8.0) for k in range(10)]
              + [(40.0 + 80 * k, 310.0 if k % 2 else 290.0) for k in range(6)]
              + [(805.0 if k % 2 else 795.0, 50.0 + 100 * k) for k in range(3)])
TREE_EXPECTED = {"S1": 10, "S2": 6, "S3": 3}
SPECIES = [("Acer", 150), ("Quercus", 120), ("Pinus", 40)]

US_COUNTIES = [("Fairfax", 128000), ("Loudoun", 147000), ("Marin", 121000), ("Cook", 72000),
               ("Wayne", 52000), ("Travis", 89000)]
OBESITY = [("Adams", 31.2, 2.1), ("Baker", 35.8, 3.4), ("Clark", 28.4, 1.7), ("Dixon", 38.9, 4.0),
           ("Ellis", 33.1, 2.6), ("Floyd", 36.5, 3.1), ("Grant", 29.7, 1.9), ("Hardin", 40.2, 4.4)]
NC_BLOCKS = [("370630001001", 1520, 2500000), ("370630001002", 2210, 1800000), ("370630002001", 980, 4200000),
             ("370630002002", 3105, 1250000), ("370630003001", 1765, 3100000)]
POVERTY = [("T01", 0.031), ("T02", 0.12), ("T03", 0.047), ("T04", 0.58), ("T05", 0.22), ("T06", 0.018),
           ("T07", 0.65), ("T08", 0.09)]
LEVEL3_RAIN = [2.1, 2.7, 3.0, 2.4, 2.9, 3.3, 2.6, 2.2, 3.8, 2.55]


def datasets() -> dict:
    d = {}
    d["rectangles.geojson"] = local_polygons(L17, [
        ({"id": i, "name": f"R{i}"}, [rotated_box(x, y, 300, 100, deg)]) for i, x, y, deg in RECTANGLES])

    rows, n = [], 0
    for grp, (cx, cy, a, b, deg), interior in POINT_GROUPS:
        for xy in rect_points(cx, cy, a, b, deg, interior):
            n += 1
            rows.append(({"id": n, "name": f"P{n:02d}", "group": grp}, xy))
    d["points.geojson"] = local_points(L17, rows)

    d["roads.geojson"] = local_lines(L17, [
        ({"id": 1, "name": "Main St"}, [(0.0, 0.0), (300.0, 400.0)]),
        ({"id": 2, "name": "Oak Ave"}, [(0.0, 1000.0), (500.0, 1000.0), (500.0, 1800.0)]),
        ({"id": 3, "name": "Elm Rd"}, [(1000.0, 0.0), (1000.0, 700.0)])])

    d["area.geojson"] = local_polygons(L17, [({"AREA_ID": i, "name": nm}, [ring]) for i, nm, ring in AREA])
    d["road.geojson"] = local_lines(L17, [({"ROAD_ID": 1, "name": "South Rd"}, [(x, 300.0) for x in ROAD_XS]),
                                          ({"ROAD_ID": 2, "name": "North Rd"}, [(x, 700.0) for x in ROAD_XS])])
    d["line.geojson"] = local_lines(L17, [({"LINE_ID": 1, "name": "Canal"}, LINE)])
    d["parcel.geojson"] = local_polygons(L17, [({"PARCEL_ID": 101}, [box(0, -400, 1000, 600)])])

    ox, oy = ORIGINS[L17]
    pts = []
    for pid, x, y in POINT_XY:
        dist, (qx, qy) = seg_dist((x, y), *LINE)
        pts.append(({"id": pid, "Point_X": ox + x, "Point_Y": oy + y, "NEAR_X": ox + qx, "NEAR_Y": oy + qy,
                     "NEAR_DIST": dist}, (x, y)))
    d["Point.geojson"] = local_points(L17, pts)

    apts = []
    for aid, _, ring in AREA:
        for x, y in ring[:-1]:
            apts.append(({"ORIG_FID": aid, "NEAR_DIST": seg_dist((x, y), *LINE)[0]}, (x, y)))
    d["area_points.geojson"] = local_points(L17, apts)

    circle = lambda cx, cy: [(cx + 100 * math.cos(2 * math.pi * k / 64), cy + 100 * math.sin(2 * math.pi * k / 64))  # noqa: E731
                             for k in range(64)]
    d["circles.geojson"] = local_polygons(L17, [({"CIRCLE_ID": i}, [c + [c[0]]]) for i, c in
                                                enumerate([circle(0, 0), circle(150, 0), circle(600, 0)], 1)])
    d["area_stats.geojson"] = local_polygons(L17, [({"index": idx, "p": p}, [box(200 * i, 0, 200 * i + 100, 100)])
                                                   for idx, i, _, p in AREA_STATS])

    d["zone.geojson"] = local_polygons(L17, [({"zone": z, "name": nm}, rings) for z, nm, rings in ZONES])
    d["zone_lines.geojson"] = local_lines(L17, [({"name": nm}, box(x, 0, x + 400, 400)) for nm, x in
                                                (("Z1", 0), ("Z2", 1000), ("Z3", 2000))])
    d["rainfall.geojson"] = local_points(L17, [({"index": c, "p": p}, (x, y)) for c, x, y, p, _ in RAINFALL])

    d["PennsylvaniaCounties.geojson"] = local_polygons(L17, [
        ({"NAME": nm, "Population": pop, "ALAND": (b[2] - b[0]) * (b[3] - b[1])}, [box(*b)])
        for nm, b, pop in PA_COUNTIES])
    ff, k = [], 0
    for nm, b, _ in PA_COUNTIES:
        for j in range(FASTFOOD_PER_COUNTY[nm]):
            k += 1
            x = b[0] + (b[2] - b[0]) * (j + 1) / (FASTFOOD_PER_COUNTY[nm] + 1)
            y = (b[1] + b[3]) / 2
            ff.append(({"id": k, "name": f"Restaurant {k}", "X": ox + x, "Y": oy + y}, (x, y)))
    ff.append(({"id": k + 1, "name": f"Restaurant {k + 1}", "X": ox + 200000.0, "Y": oy + 50000.0},
               (200000.0, 50000.0)))
    d["PA_Fastfoods_XY.geojson"] = local_points(L17, ff)
    d["PACounties.geojson"] = local_polygons(L17, [({"NAME": nm}, [rotated_box(x, y, a, b, deg)])
                                                   for nm, (x, y, a, b, deg) in PACOUNTIES])
    d["Penn_State_Buildings.geojson"] = local_polygons(L17, [
        ({"BLDG": f"B{i}"}, [box(42000 + 500 * i, 20000, 42200 + 500 * i, 20150)]) for i in range(5)])

    d["SC_county_boundaries.geojson"] = local_polygons(L17, [({"NAME": nm}, [box(*b)]) for nm, b in SC_COUNTIES],
                                                       SC_ORIGIN)
    d["SC_weatherstations.geojson"] = local_points(L17, [({"STATION": s, "ELEV": 100 + 10 * i}, (x, y))
                                                         for i, (s, x, y, _) in enumerate(SC_STATIONS)], SC_ORIGIN)
    ids = [7, 3, 10, 1, 5, 9, 2, 8, 4, 6]
    d["Richland_SC_fastfood.geojson"] = local_points(L17, [
        ({"id": i, "name": f"Outlet {i}"}, (3000.0 * (k % 4) + 400 * (k // 4), 2500.0 * (k // 4) + 300 * (k % 3)))
        for k, i in enumerate(ids)], SC_ORIGIN)
    d["Columbia_schools_EPSG6569.geojson"] = local_points(L17, [({"name": nm}, (x, y)) for nm, x, y in SCHOOLS],
                                                          SC_ORIGIN)
    d["Columbia_sidewalk_EPSG6569.geojson"] = local_lines(L17, [({"SW_ID": s}, p) for s, p in SIDEWALKS], SC_ORIGIN)

    L18 = "EPSG:32618"
    d["New_york_coffee_shops_EPSG6535.geojson"] = local_points(L18, [({"id": i, "name": nm}, (x, y))
                                                                     for i, nm, x, y in COFFEE])
    d["bus_metro_stop_EPSG6535.geojson"] = local_points(L18, [({"stop_id": s}, (x, y)) for s, x, y in BUS])

    L10 = "EPSG:32610"
    d["Roads_Portland_EPSG6852_subset.geojson"] = local_lines(L10, [({"name": s}, p) for s, p in STREETS])
    species = [s for s, n in SPECIES for _ in range(n)]
    far = [(2000.0 + 50 * (k % 20), 2000.0 + 50 * (k // 20)) for k in range(310 - len(TREES_NEAR))]
    trees = [({"TREE_ID": k + 1, "SPECIES": species[k]}, xy) for k, xy in enumerate(TREES_NEAR + far)]
    d["Street_Tree_EPSG6852_subset.geojson"] = local_points(L10, trees)

    L11 = "EPSG:32611"
    d["SAF_SpecialStudyZone.geojson"] = local_polygons(L11, [({"ZONE": "SAF-1"}, [box(0, 0, 2000, 600)])])
    houses = [(100 + 250 * k, 300.0) for k in range(7)] + [(500.0, 900.0), (2500.0, 300.0), (1000.0, -200.0)]
    d["DamagedHouses.geojson"] = local_points(L11, [({"HOUSE_ID": k + 1}, xy) for k, xy in enumerate(houses)])

    def grid_polys(rows, crs=None, lon0=None, lat0=None):
        feats = []
        for k, props in enumerate(rows):
            x0, y0 = lon0 + 0.5 * (k % 4), lat0 + 0.5 * (k // 4)
            feats.append(feature(props, "Polygon", [[[x0, y0], [x0 + 0.4, y0], [x0 + 0.4, y0 + 0.4],
                                                     [x0, y0 + 0.4], [x0, y0]]]))
        return collection(feats, crs)

    d["US_Counties.geojson"] = grid_polys([{"NAME": n, "income": v} for n, v in US_COUNTIES], None, -90.0, 38.0)
    d["US_Counties.geojson"].pop("crs", None)
    d["US_Counties_Obesity_Covid.geojson"] = grid_polys(
        [{"NAME": n, "obesity": o, "covid_death_rate": c} for n, o, c in OBESITY], None, -95.0, 35.0)
    d["Poverty.geojson"] = grid_polys([{"TRACT": t, "ratio_pove": r} for t, r in POVERTY], None, -75.5, 39.8)
    d["level3_30.geojson"] = grid_polys([{"COUNTY": f"C{k + 1:02d}", "rainfall": r}
                                         for k, r in enumerate(LEVEL3_RAIN)], None, -80.0, 40.0)
    d["North_Carolina_block_group_boundaries.geojson"] = local_polygons(L17, [
        ({"GEOID": g, "population": pop, "ALAND": aland}, [box(3000 * k, 0, 3000 * k + 1000, aland / 1000)])
        for k, (g, pop, aland) in enumerate(NC_BLOCKS)])

    d["Nigeria_Major_Roads.geojson"] = collection([
        feature({"name": f"A{k + 1}", "highway": "trunk" if k % 2 else "primary"}, "LineString",
                [[3.0 + k, 6.5 + 0.5 * k], [3.6 + k, 7.2 + 0.5 * k], [4.1 + k, 7.4 + 0.5 * k]])
        for k in range(6)])
    d["country.geojson"] = collection([
        feature({"name": nm}, "Polygon", [[[x, y], [x + 2, y], [x + 2, y + 1.5], [x, y + 1.5], [x, y]]])
        for nm, x, y in (("Arland", 10.0, 45.0), ("Borovia", 14.0, 46.0), ("Cestia", 12.0, 49.0))])
    d["Roads.geojson"] = collection([
        feature({"name": "R1"}, "LineString", [[-123.0, 45.0], [-123.0, 45.1]]),
        feature({"name": "R2"}, "LineString", [[-122.9, 45.02], [-122.8, 45.05]]),
        feature({"name": "R3"}, "LineString", [[-123.2, 45.08], [-123.1, 45.08], [-123.1, 45.12]])])
    d["PA_Hospital.geojson"] = collection([
        feature({"name": nm}, "Point", [lon, lat]) for nm, lon, lat in
        (("Mercy", -79.98, 40.44), ("Allegheny General", -80.00, 40.46), ("Shadyside", -79.94, 40.45))])
    d["PA_Fastfoods.geojson"] = collection([
        feature({"name": f"Outlet {k}"}, "Point", [-77.8 + 0.01 * k, 40.79]) for k in range(3)])
    return d


def remote_buildings() -> dict:
    feats = []
    for k in range(5):
        x, y = -77.865 + 0.0004 * k, 40.795
        feats.append(feature({"osm_id": 100 + k, "building": "yes" if k % 2 else "university"}, "Polygon",
                             [[[x, y], [x + 0.0002, y], [x + 0.0002, y + 0.0002], [x, y + 0.0002], [x, y]]]))
    return collection(feats)


# ---------------------------------------------------------------------------
# expected values
# ---------------------------------------------------------------------------

def points_xy() -> list:
    out = []
    for _, (cx, cy, a, b, deg), interior in POINT_GROUPS:
        out.extend(rect_points(cx, cy, a, b, deg, interior))
    return out


def voronoi_box_area(pts) -> float:
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    m = 0.1 * math.hypot(w, h)
    return (w + 2 * m) * (h + 2 * m)


def closest_to_center(pts, center):
    d = [math.hypot(x - center[0], y - center[1]) for x, y in pts]
    k = min(range(len(pts)), key=d.__getitem__)
    return k, pts[k]


def hull_centroid(pts):
    """Monotone-chain hull and its shoelace centroid."""
    pts = sorted(set(pts))

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and ((h[-1][0] - h[-2][0]) * (p[1] - h[-2][1])
                                   - (h[-1][1] - h[-2][1]) * (p[0] - h[-2][0])) <= 0:
                h.pop()
            h.append(p)
        return h
    hull = half(pts)[:-1] + half(pts[::-1])[:-1]
    a = cx = cy = 0.0
    for (x0, y0), (x1, y1) in zip(hull, hull[1:] + hull[:1]):
        cr = x0 * y1 - x1 * y0
        a += cr
        cx += (x0 + x1) * cr
        cy += (y0 + y1) * cr
    return cx / (3 * a), cy / (3 * a)


def bus_overlap_pairs() -> int:
    n = 0
    for _, _, cx, cy in COFFEE:
        for _, bx, by in BUS:
            d = math.hypot(cx - bx, cy - by)
            assert not 990 <= d <= 1010, "ambiguous buffer overlap"
            n += d < 1000
    return n


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def exists(t):
    return {"kind": "FileExists", "target": t}


def count(t, n):
    return {"kind": "FeatureCount", "target": t, "expected": n}


def has(t, f):
    return {"kind": "FieldPresent", "target": t, "field": f}


def near(t, f, v, row=None, stat=None, tol=1e-6):
    c = {"kind": "NumericFieldNear", "target": t, "field": f, "expected": v, "tol": tol}
    c.update({"row": row} if row is not None else {"stat": stat})
    return c


def cell(t, f, row, v, tol=None):
    c = {"kind": "TableCell", "target": t, "field": f, "row": row, "expected": v}
    if tol is not None:
        c["tol"] = tol
    return c


def geom(t, pred, expected=None, row=None, tol=None):
    c = {"kind": "GeometryPredicate", "target": t, "predicate": pred}
    if expected is not None or pred == "crs":
        c["expected"] = expected
    if row is not None:
        c["row"] = row
    if tol is not None:
        c["tol"] = tol
    return c


def by(field, value):
    return {"field": field, "value": value}


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

def call(name, **arguments):
    return {"name": name, "arguments": arguments}


def step(instruction, body, **extra):
    s = {"instruction": instruction}
    s.update({"call": body} if isinstance(body, (dict, list)) else {"script": PRE + body})
    s.update(extra)
    return s


PROMPTS = {
    "B-1": "Please download the OSM data of Pennsylvania buildings for a specified bounding box and data type, then save it as a GeoJSON file.",
    "B-2": "Please convert the uploaded GeoJSON file to shapefile format. The output should be a shapefile with the same attributes and geometry as the original GeoJSON file.",
    "B-3": "Please convert the coordinate system of the uploaded GeoJSON file from EPSG:4326 to EPSG:3857 and save it as a new GeoJSON file.",
    "B-4": "Please clear the coordinate system of the uploaded GeoJSON file and save it as a new GeoJSON file.",
    "B-5": "Please visualize the uploaded GeoJSON file and save the image.",
    "B-6": "Please add a new Direction column for the uploaded GeoJSON file to indicate the direction of the matrix and save the result as a new GeoJSON file.",
    "B-7": "Please rename the fields to the corresponding Chinese in the uploaded GeoJSON file. And save it as a new GeoJSON file.",
    "B-8": "Please create an Interactive Query interface based on the uploaded GeoJSON file, allowing users to click to view attribute information, search for features, and control layers, and save the result as a html file.",
    "B-9": "Please create an Interactive edit interface based on the uploaded GeoJSON file and save the result as a html file, which allow users to click to view and modify attributes such as the name, type, height, or any other specified property of buildings. Once changes are made, the updated information can be automatically synchronized and saved.",
    "B-10": "Please calculate the length of each geometric feature in the uploaded GeoJSON file. The results should include the ID of each feature and its corresponding length. Save the results as a new GeoJSON file and ensure that all original attribute fields are included.",
    "B-11": "Please clip the uploaded target GeoJSON layer (road.geojson) according to the provided boundaries (area.geojson) . Ensure that the clipped results include all original attribute fields and save it as a new GeoJSON file.",
    "B-12": "Please convert the geometric features in the uploaded GeoJSON file into line features. Ensure that the converted line features retain all original attribute fields and save them as a new GeoJSON file.",
    "B-13": "Please convert the vertices of line or polygon features in the uploaded GeoJSON file into point features. Ensure that the converted point features include all original attribute fields and save them as a new GeoJSON file.",
    "B-14": "Please convert the line features in the uploaded GeoJSON file into polygon features. Ensure that the converted polygon features retain all original attribute fields and save them as a new GeoJSON file.",
    "B-15": "Please analyze the intersecting parts of the two uploaded GeoJSON file and save them as a new GeoJSON file.",
    "B-16": "Please create a specified distance buffer for each geometric feature in the uploaded GeoJSON file. The results should include all original attribute fields and be saved as a new GeoJSON file.",
    "B-17": "Please create Thiessen polygons (Voronoi diagrams) for the point features in the uploaded GeoJSON file. The results should include all original attribute fields and be saved as a new GeoJSON file.",
    "B-18": "Please create minimum bounding rectangles for the point groups in the uploaded GeoJSON file. The results should include all original attribute fields and be saved as a new GeoJSON file.",
    "B-19": "Please convert the vertices of line or polygon features in the uploaded GeoJSON file into point features. Ensure that the converted point features include all original attribute fields and save them as a new GeoJSON file.",
    "B-20": "Please conduct a spatial feature analysis of clustered point features in the uploaded GeoJSON file. The results should identify and describe the spatial patterns of each cluster area and be saved as a new GeoJSON file.",
    "B-21": "Please add coordinate fields, POINT_X and POINT_Y, to each point feature in the provided GeoJSON file. These fields should capture the X and Y coordinates of each point respectively. Ensure that the updated data is saved in the existing GeoJSON file or as a new GeoJSON file, as per the requirement.",
    "B-22": "Please convert the start (Point_X, Point_Y) and end (NEAR_X, NEAR_Y) point features in the provided GeoJSON file into line features. Save the resulting lines as a new GeoJSON file.",
    "B-23": "Please create the nearest vertical line for the two symmetrical line features in the uploaded GeoJSON file. First convert the line feature to a vertex point, then nearest neighbor analyze to calculating the point closest to each point feature on the line feature, then add a coordinate column (Point_X, Point_Y) to the vertex point feature, and then convert the starting point (Point_X, Point_Y) and end point coordinates (NEAR_X, NEAR_Y) of the point feature to a line feature, then sort the vertex point files in ascending order according to (NEAR_DIST), then create a line feature connecting the two nearest point features, and finally save this line feature as a new GeoJSON file.",
    "B-24": "Please extract the overlapping areas between polygon features in the provided GeoJSON file and create a new GeoJSON file consisting of the resulting polygon features.",
    "B-25": "Please use line to split polygon and save the new polygon as a new GeoJSON file.",
    "B-26": "Please calculate the distance between each pair of point features in the uploaded GeoJSON file. The results should be saved as a new csv file.",
    "B-27": "Please find the two closest point features in the uploaded GeoJSON file and create a line connecting these two points. First you have to sort the uploaded point elements by distance, after that create a line connecting these two points and finally save the result as a new GeoJSON file.",
    "B-28": "Please summarize the distance from each polygon vertex in the GeoJSON file to its nearest line. The distances are already stored in the columns of the vertex file and the summary results should be saved as a new GeoJSON file.",
    "B-29": "Please conduct a nearest neighbor analysis to find the closest point on a line feature for each point feature within the provided GeoJSON file. The analysis should record the distance to the nearest point, and its coordinates (X and Y), and all original attribute fields of the point features should be preserved. The results should be saved in a new GeoJSON file.",
    "B-30": "Please calculate the perpendicular distance from all points to the line and save it as a csv file.",
    "B-31": "Please find the location of the nearest point from each polygon to the nearest line in the uploaded GeoJSON file. First convert the polygon to polygon vertice, then perform a nearest neighbor analysis to get the closest distance from the vertice to the line elements, then summarize the closest distance from the vertice to the line, and finally join the summarized results and save them as a new GeoJSON file.",
    "B-32": "Please calculate the principal directions of rectangular polygon features in the uploaded GeoJSON file. The results should include the ID and direction of each rectangle and be saved as a new GeoJSON file.",
    "B-33": "Combine the uploaded GeoJSON file and group the features by the index field, which represents the region identifier. For each region, calculate the total precipitation using the p field, which contains the precipitation values. Save the results, including the index field and the total precipitation for each region, as a new CSV file.",
    "B-34": "Please calculates the representative_point or the centroid of the uploaded GeoJSON. The representative_point represents the average position of all the points in the feature, while the centroid is the center of mass or the point that balances the feature's shape if it were a physical object. Please save the results as a geojson file format with the same attributes and geometry as the original GeoJSON file and export it.",
    "B-35": "Please collect the rainfall statistics for different regions in the specified area and save the precipitation data for each region as a new GeoJSON file.",
    "B-36": "Please sort the point features in the provided GeoJSON file based on a specified field (NEAR_DIST) in ascending order. Save the sorted results as a new GeoJSON file.",
    "B-37": "Please perform a spatial join on the two uploaded GeoJSON files to analyze their spatial relationships. The results should include all original attribute fields and be saved as a new GeoJSON file.",
    "B-38": "Please filter the uploaded GeoJSON file for points with precipitation greater than 1000 by the specified criteria. The result should include all original attribute fields and save it as a new GeoJSON file.",
    "B-39": "Please export the coordinates of the geometry as a csv file.",
    "B-40": "Please draw a bar chart of precipitation for each city, while the 'city' is represented by 'index' and 'precipitation' is represented by 'p'. when completed please save the result as an image file.",
    "I-1": "Please count the number of fast-food restaurants in each county from the uploaded GeoJSON files and then store the name of each county and its count results of fast-food restaurants in a new csv file and a new GeoJSON file.",
    "I-2": "Please convert the coordinate system of the uploaded GeoJSON file to UTM Zone 10,and then add a new field named 'length' to the file to store the length of the road features.",
    "I-3": "Please convert the coordinate system of the uploaded GeoJSON file to UTM Zone 17,and then create a buffer zone with a distance of 1000 meters for each hospital in the file to analyze the possible coverage of medical insurance. When completed, save the results as a new GeoJSON file.",
    "I-4": "Please convert the coordinate system of the uploaded GeoJSON file to UTM Zone 29,and then calculate the length of the geometry in the file. When completed, please save the results as a new GeoJSON file.",
    "I-5": "Please calculate the representative_point or the centroid of the uploaded GeoJSON file and save the results as a geojson file format with the same attributes and geometry as the original GeoJSON file,then visualize the file and create an HTML file to display the map, in which users can click to view basic attribute information of each polygon.",
    "I-6": "Please calculate the boundary length of each county in the file. Then create a new field containing the length of the boundary, the field name is \"boundary_length\" When completed, please save the results as a new GeoJSON file.",
    "I-7": "Please create Thiessen polygons (Voronoi diagrams) for the point features in the uploaded GeoJSON file. When completed, please use Matplotlib to plot these Thiessen polygons, then visualize it as a PNG image file for easy understanding and analysis.",
    "I-8": "Please create the minimum boundary geometry (minimum area rectangle and minimum convex_hull) for all points of the uploaded GeoJSON file, and then visualize the file and its attribute information. The data should be visualized to a image file for easy understanding and analysis.",
    "I-9": "Please plot a scatterplot of obesity rates and COVID-19 death rates of the uploaded GeoJSON file, when completed, please save the result and visualize it to a image file for easy understanding and analysis.",
    "I-10": "Please identify the counties with a household income over $100,000 from the uploaded GeoJSON file. Then plot a bar chart to visualize the household income of these counties. When completed, please save the result and visualize the bar chart as an image file for easy understanding and analysis.",
    "I-11": "Please download the OSM data of Pennsylvania buildings for a specified bounding box and data type, then save it as a GeoJSON file.",
    "I-12": "Please count how many damaged houses were located within the San Andreas Special Studies Zones in the uploaded GeoJSON file, and create a new GeoJSON file for these damaged houses in the San Andreas Special Study Area",
    "I-13": "Please create the nearest vertical line to connect each coffee shop to its nearest coffee shop and save the result as a new GeoJSON file.",
    "I-14": "Please convert the features in the uploaded GeoJSON file to polygons, then calculate the main direction of these polygons and save the calculated direction values in a new field called 'Direction' in the GeoJSON file.",
    "I-15": "Please group the uploaded GeoJSON file by SPECIES and calculate the totals for each SPECIES. When completed, please plot the number of each tree species with a population greater than 100 using a bar chart",
    "I-16": "Please create a 500-meter buffer zone around each coffee shop and bus station in the uploaded GeoJSON files, and perform a spatial overlap analysis to find which coffee shops' buffer zones overlap with bus station buffer zones, when completed, please save the result in a new shapefile.",
    "I-17": "Please sort the fast food restaurant data from the uploaded GeoJSON file in ascending order based on the numeric values of the 'id' attribute. When completed, please save the result as a new GeoJSON file.",
    "I-18": "Please create the geometric center for all the points in the 'points' dataset in the uploaded GeoJSON file, and calculate the distance of each of the 20 points from the geometric center, then identify the point closest to the geometric center. when completed, please output the coordinates and id of this closest point.",
    "I-19": "Please calculate population density as population divided by (land area in square meters divided by 1,000,000) from the uploaded GeoJSON file, then save the result as a new csv file for easy understanding and analysis.",
    "I-20": "please select the areas with the 'ratio_pove' below 0.05 from the uploaded GeoJSON file, and save the selected areas save as a new GeoJSON file for easy understanding and analysis.",
    "A-1": "Please calculate the number of street trees within a 20-meter buffer zone around each street from the uploaded GeoJSON file, and save the result as a csv file.",
    "A-2": "For each county, find the weather station in the county and list all the weather station number in each county in a csv table file",
    "A-3": "I would like to identify which counties in Pennsylvania are suitable for planting more trees, using annual rainfall as a key parameter. Counties receiving more than 2.5 inches of rain per year should be considered suitable for tree planting. Based on your analysis, please answer the following: How many counties of Pennsylvania meet the criteria for tree planting suitability?",
    "A-4": "For each school in Columbia, calculate the length of sidewalks within 500 meters.",
    "A-5": "For each bus stop in New York City, create Thiessen polygons to analyze the theoretical service area of each stop and display them in an interactive web page",
    "A-6": "Based on the existing poverty data, identify census tracts with poverty rates above 0.5 and display these poverty areas in an interactive web page",
    "A-7": "Generate a population density map of all counties in Pennsylvania based on available census data(population density is land area in square meters divided by 1,000,000)",
    "A-8": "Can you analyze and visualize the fast food accessibility score for each county based on the number of fast food restaurants and population?",
    "A-9": "Please calculate the building density for each county in Pennsylvania using the uploaded GeoJSON data (building footprint area as a proportion of total county land area). When completed, please generate a map of Pennsylvania visualizing the building density distribution across counties, and save the result as an image file for easy understanding and analysis.",
    "A-10": "I want to build a bus company in New York City. Please choose a suitable location as the location of the bus company based on the distribution of all bus stops.",
}

INPUTS = {
    "B-1": [], "B-2": ["Nigeria_Major_Roads.geojson"], "B-3": ["country.geojson"], "B-4": ["country.geojson"],
    "B-5": ["Columbia_schools_EPSG6569.geojson"], "B-6": ["rectangles.geojson"], "B-7": ["points.geojson"],
    "B-8": ["PA_Fastfoods.geojson"], "B-9": ["PA_Fastfoods.geojson"], "B-10": ["roads.geojson"],
    "B-11": ["area.geojson", "road.geojson"], "B-12": ["zone.geojson"], "B-13": ["zone_lines.geojson"],
    "B-14": ["zone_lines.geojson"], "B-15": ["rainfall.geojson", "zone.geojson"], "B-16": ["area.geojson"],
    "B-17": ["points.geojson"], "B-18": ["points.geojson"], "B-19": ["road.geojson"], "B-20": ["points.geojson"],
    "B-21": ["Point.geojson"], "B-22": ["Point.geojson"], "B-23": ["road.geojson"], "B-24": ["circles.geojson"],
    "B-25": ["line.geojson", "parcel.geojson"], "B-26": ["points.geojson"], "B-27": ["Point.geojson"],
    "B-28": ["area.geojson", "area_points.geojson", "line.geojson"], "B-29": ["line.geojson", "Point.geojson"],
    "B-30": ["line.geojson", "Point.geojson"], "B-31": ["area.geojson", "line.geojson"],
    "B-32": ["rectangles.geojson"], "B-33": ["area_stats.geojson"], "B-34": ["PACounties.geojson"],
    "B-35": ["rainfall.geojson", "zone.geojson"], "B-36": ["Point.geojson"],
    "B-37": ["rainfall.geojson", "zone.geojson"], "B-38": ["rainfall.geojson"], "B-39": ["area.geojson"],
    "B-40": ["rainfall.geojson"],
    "I-1": ["PA_Fastfoods_XY.geojson", "PennsylvaniaCounties.geojson"], "I-2": ["Roads.geojson"],
    "I-3": ["PA_Hospital.geojson"], "I-4": ["Nigeria_Major_Roads.geojson"], "I-5": ["US_Counties.geojson"],
    "I-6": ["SC_county_boundaries.geojson"], "I-7": ["Richland_SC_fastfood.geojson"], "I-8": ["points.geojson"],
    "I-9": ["US_Counties_Obesity_Covid.geojson"], "I-10": ["US_Counties.geojson"], "I-11": [],
    "I-12": ["DamagedHouses.geojson", "SAF_SpecialStudyZone.geojson"],
    "I-13": ["New_york_coffee_shops_EPSG6535.geojson"], "I-14": ["PACounties.geojson"],
    "I-15": ["Street_Tree_EPSG6852_subset.geojson"],
    "I-16": ["bus_metro_stop_EPSG6535.geojson", "New_york_coffee_shops_EPSG6535.geojson"],
    "I-17": ["Richland_SC_fastfood.geojson"], "I-18": ["points.geojson"],
    "I-19": ["North_Carolina_block_group_boundaries.geojson"], "I-20": ["Poverty.geojson"],
    "A-1": ["Roads_Portland_EPSG6852_subset.geojson", "Street_Tree_EPSG6852_subset.geojson"],
    "A-2": ["SC_county_boundaries.geojson", "SC_weatherstations.geojson"], "A-3": ["level3_30.geojson"],
    "A-4": ["Columbia_schools_EPSG6569.geojson", "Columbia_sidewalk_EPSG6569.geojson"],
    "A-5": ["bus_metro_stop_EPSG6535.geojson"], "A-6": ["Poverty.geojson"],
    "A-7": ["PennsylvaniaCounties.geojson"],
    "A-8": ["PA_Fastfoods_XY.geojson", "PennsylvaniaCounties.geojson"],
    "A-9": ["Penn_State_Buildings.geojson", "PennsylvaniaCounties.geojson"],
    "A-10": ["bus_metro_stop_EPSG6535.geojson"],
}

# attempts columns: rounds, or None for "Failed"
ATTEMPTS = {
    "B": [(1, 2), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1), (None, None), (1, 1),
          (3, 1), (1, 1), (1, 1), (None, 1), (1, 1), (1, 1), (1, 1), (2, 3), (1, 1), (1, 2),
          (1, 1), (1, 1), (None, 2), (1, 1), (2, 1), (1, 1), (2, 1), (2, 3), (1, 1), (1, 1),
          (2, 3), (1, 1), (1, 1), (1, 1), (1, 2), (1, 1), (1, 1), (1, 1), (1, 1), (1, 2)],
    "I": [(1, 1), (1, 1), (1, 1), (1, 1), (None, 2), (1, 1), (None, 3), (2, 3), (1, 1), (1, 1),
          (2, 1), (2, 1), (2, 2), (2, 1), (1, 1), (2, 1), (1, 1), (1, 2), (None, 1), (1, 1)],
    "A": [(2, 2), (1, 1), (1, 1), (2, 3), (None, 3), (2, 1), (None, 1), (None, 1), (None, None), (1, 2)],
}
LEVEL_NAMES = {"B": "Basic", "I": "Intermediate", "A": "Advanced"}
NOT_IMPLEMENTABLE = {
    "B-8": "needs an interactive query page; the function library marks InteractiveQuery as not implemented",
    "B-9": "needs an interactive editing page; the function library marks InteractiveEdit as not implemented",
    "I-5": "needs an interactive HTML map",
    "A-5": "needs an interactive web page",
    "A-6": "needs an interactive web page",
}
BUILDINGS_URL = "https://osm.example.org/export/pennsylvania_buildings.geojson"


def case_specs() -> dict:
    """case id -> (checks, FC steps, CG steps, remote)."""
    pts = points_xy()
    ox, oy = ORIGINS[L17]
    cases = {}

    def add(cid, checks, fc, cg, remote=None):
        cases[cid] = (checks, fc, cg, remote or {})

    remote = {BUILDINGS_URL: "remote/pennsylvania_buildings.geojson"}
    dl = call("DownloadGeoJSONData", url=BUILDINGS_URL, output_path="pa_buildings.geojson")
    dl_script = (f"c = fetch_remote_collection({BUILDINGS_URL!r})\n"
                 "save_result(c, 'pa_buildings.geojson')\n")
    b1 = [count("pa_buildings.geojson", 5), has("pa_buildings.geojson", "building")]
    add("B-1", b1, [step("download the buildings extract", dl)],
        [step("inspect the remote extract",
              f"c = fetch_remote_collection({BUILDINGS_URL!r})\nprint(len(c), c.field_names())\n"),
         step("download and save the buildings", dl_script)], remote)
    add("I-11", b1, [step("download the buildings extract", dl, fail_times=1, on_error="retry")],
        [step("download and save the buildings", dl_script)], remote)

    add("B-2", [exists("Nigeria_Major_Roads.shp"), count("Nigeria_Major_Roads.shp", 6),
                has("Nigeria_Major_Roads.shp", "highway")],
        [step("convert to shapefile", call("ConvertFileFormat", input_path="Nigeria_Major_Roads.geojson",
                                             output_path="Nigeria_Major_Roads.shp"))],
        [step("convert to shapefile", "save_result(read_collection('Nigeria_Major_Roads.geojson'), "
                                        "'Nigeria_Major_Roads.shp')\n")])
    add("B-3", [count("country_3857.geojson", 3), geom("country_3857.geojson", "crs", "EPSG:3857")],
        [step("reproject to web mercator", call("TransformProjectionOfGeoDataFrame", input_path="country.geojson",
                                                  target_crs="EPSG:3857", output_path="country_3857.geojson"))],
        [step("reproject to web mercator", "c = reproject(read_collection('country.geojson'), 'EPSG:3857')\n"
                                             "save_result(c, 'country_3857.geojson')\n")])
    add("B-4", [count("country_nocrs.geojson", 3), geom("country_nocrs.geojson", "crs", None)],
        [step("clear the crs", call("TransformProjectionOfGeoDataFrame", input_path="country.geojson",
                                      target_crs="none", output_path="country_nocrs.geojson"))],
        [step("clear the crs", "c = reproject(read_collection('country.geojson'), None)\n"
                                 "save_result(c, 'country_nocrs.geojson')\n")])
    add("B-5", [exists("schools.svg")],
        [step("draw the schools", call("VisualizeGeoJSONData", input_path="Columbia_schools_EPSG6569.geojson",
                                         output_path="schools.svg", title="Columbia schools"))],
        [step("draw the schools", "c = read_collection('Columbia_schools_EPSG6569.geojson')\n"
                                    "render_map_svg([(c, None)], 'schools.svg', 'Columbia schools')\n")])

    def direction_case(cid, out):
        checks = [count(out, 4)] + [near(out, "Direction", float(deg), row=by("id", i)) for i, _, _, deg in RECTANGLES]
        add(cid, checks,
            [step("compute main directions", call("CalculateMainDirectionOfPolygon", input_path="rectangles.geojson",
                                                     output_path=out))],
            [step("compute main directions", f"save_result(main_direction(read_collection('rectangles.geojson')), "
                                               f"{out!r})\n")])
    direction_case("B-6", "rectangles_direction.geojson")
    direction_case("B-32", "rectangles_principal.geojson")

    add("B-7", [count("points_zh.geojson", 20), has("points_zh.geojson", "名称"), has("points_zh.geojson", "分组")],
        [step("rename fields", call("RenameColumnOfGeoDataFrame", input_path="points.geojson",
                                      old_names=["id", "name", "group"], new_names=["编号", "名称", "分组"],
                                      output_path="points_zh.geojson"))],
        [step("rename fields", "c = rename_fields(read_collection('points.geojson'), "
                                 "{'id': '编号', 'name': '名称', 'group': '分组'})\n"
                                 "save_result(c, 'points_zh.geojson')\n")])

    add("B-10", [count("roads_length.geojson", 3), near("roads_length.geojson", "length", 500.0, row=by("id", 1)),
                 near("roads_length.geojson", "length", 1300.0, row=by("id", 2)),
                 near("roads_length.geojson", "length", 700.0, row=by("id", 3))],
        [step("measure lengths", call("CalculateGeometryLength", input_path="roads.geojson",
                                        output_path="roads_length.geojson"))],
        [step("measure lengths", "save_result(geometry_length(read_collection('roads.geojson')), "
                                   "'roads_length.geojson')\n")])

    add("B-11", [count("road_clip.geojson", 2), geom("road_clip.geojson", "length", 4000.0, tol=1e-6),
                 has("road_clip.geojson", "ROAD_ID")],
        [step("clip roads to the areas", call("ClipGeoDataFrame", input_path="road.geojson", mask_path="area.geojson",
                                                output_path="road_clip.geojson"), fail_times=2, on_error="retry")],
        [step("clip roads to the areas", "c = clip(read_collection('road.geojson'), read_collection('area.geojson'))\n"
                                           "save_result(c, 'road_clip.geojson')\n")])
    add("B-12", [count("zone_lines_out.geojson", 4), geom("zone_lines_out.geojson", "kind", ["LineString"]),
                 has("zone_lines_out.geojson", "zone")],
        [step("polygons to lines", call("FeatureToLine", input_path="zone.geojson",
                                          output_path="zone_lines_out.geojson"))],
        [step("polygons to lines", "save_result(features_to_lines(read_collection('zone.geojson')), "
                                     "'zone_lines_out.geojson')\n")])
    add("B-13", [count("zone_vertices.geojson", 15), has("zone_vertices.geojson", "name")],
        [step("vertices to points", call("FeatureVerticesToPoints", input_path="zone_lines.geojson",
                                           output_path="zone_vertices.geojson"))],
        [step("vertices to points", "save_result(vertices_to_points(read_collection('zone_lines.geojson')), "
                                      "'zone_vertices.geojson')\n")])
    add("B-14", [count("zone_polygons.geojson", 3), geom("zone_polygons.geojson", "kind", ["Polygon"]),
                 geom("zone_polygons.geojson", "area", 3 * 160000.0, tol=1e-6)],
        [step("convert lines (wrong function chosen)", call("FeatureToLine", input_path="zone_lines.geojson",
                                                              output_path="zone_polygons.geojson"))],
        [step("lines to polygons", "save_result(lines_to_polygons(read_collection('zone_lines.geojson')), "
                                     "'zone_polygons.geojson')\n")])
    inside = sum(1 for r in RAINFALL if r[4])
    add("B-15", [count("rain_zone_intersect.geojson", inside), has("rain_zone_intersect.geojson", "p")],
        [step("intersect rainfall with zones", call("ClipGeoDataFrame", input_path="rainfall.geojson",
                                                      mask_path="zone.geojson",
                                                      output_path="rain_zone_intersect.geojson"))],
        [step("intersect rainfall with zones",
              "c = clip(read_collection('rainfall.geojson'), read_collection('zone.geojson'))\n"
              "save_result(c, 'rain_zone_intersect.geojson')\n")])
    ring_area = 1e6 + 4 * 1000 * 100 + BUFFER_64 * 100 ** 2
    add("B-16", [count("area_buffer.geojson", 2), geom("area_buffer.geojson", "area", ring_area, row=by("AREA_ID", 1),
                                                         tol=1e-6), has("area_buffer.geojson", "name")],
        [step("buffer 100 m", call("CreateMultiRingBufferFromGeoDataFrame", input_path="area.geojson",
                                     distances=[100], output_path="area_buffer.geojson"))],
        [step("buffer 100 m", "save_result(buffer(read_collection('area.geojson'), 100), 'area_buffer.geojson')\n")])
    add("B-17", [count("points_voronoi.geojson", 20), has("points_voronoi.geojson", "group"),
                 geom("points_voronoi.geojson", "area", voronoi_box_area(pts), tol=1e-3)],
        [step("thiessen polygons", call("CreateThiessenPolygon", input_path="points.geojson",
                                          output_path="points_voronoi.geojson"))],
        [step("thiessen polygons", "save_result(voronoi(read_collection('points.geojson')), "
                                     "'points_voronoi.geojson')\n")])
    mbr = "points_mbr.geojson"
    add("B-18", [count(mbr, 3), geom(mbr, "area", 800.0, row=by("group", "A"), tol=1e-6),
                 geom(mbr, "area", 900.0, row=by("group", "B"), tol=1e-6),
                 geom(mbr, "area", 500.0, row=by("group", "C"), tol=1e-6)],
        [step("minimum bounding rectangles per group",
              call("CreateMinPointgroupBorder", input_path="points.geojson", output_path=mbr,
                   kind="RotatedRectangle", group_field="group"), fail_times=1, on_error="retry")],
        [step("list the point groups", "c = read_collection('points.geojson')\n"
                                         "print(sorted({f.properties['group'] for f in c}))\n"),
         step("rectangles per group", "c = read_collection('points.geojson')\n"
                                        "save_result(min_bounding_geometry(c, 'RotatedRectangle', 'group'), "
                                        "'mbr_tmp.geojson')\n"),
         step("save the rectangles", f"save_result(read_collection('mbr_tmp.geojson'), {mbr!r})\n")])
    add("B-19", [count("road_vertices.geojson", 10), has("road_vertices.geojson", "ROAD_ID")],
        [step("vertices to points", call("FeatureVerticesToPoints", input_path="road.geojson",
                                           output_path="road_vertices.geojson"))],
        [step("vertices to points", "save_result(vertices_to_points(read_collection('road.geojson')), "
                                      "'road_vertices.geojson')\n")])
    add("B-20", [count("points_clusters.geojson", 20), near("points_clusters.geojson", "cluster_id", 2.0, stat="max"),
                 near("points_clusters.geojson", "cluster_id", 0.0, stat="min")],
        [step("cluster points within 100 m", call("SpatialAnalysisOfAggregationPoints", input_path="points.geojson",
                                                    threshold=100, output_path="points_clusters.geojson"))],
        [step("survey nearest-neighbour spacing", "t = pairwise_distances(read_collection('points.geojson'))\n"
                                                    "print(min(r['distance'] for r in t.rows))\n"),
         step("cluster points within 100 m", "c = cluster_points(read_collection('points.geojson'), 100)\n"
                                               "save_result(c, 'points_clusters.geojson')\n")])
    add("B-21", [count("Point_xy.geojson", 6), near("Point_xy.geojson", "POINT_X", ox + 1300.0, row=by("id", 5)),
                 near("Point_xy.geojson", "POINT_Y", oy + 200.0, row=by("id", 5))],
        [step("add xy fields", call("AddXYCoordinates", input_path="Point.geojson", output_path="Point_xy.geojson"))],
        [step("add xy fields", "save_result(add_xy_fields(read_collection('Point.geojson')), 'Point_xy.geojson')\n")])
    near_total = math.fsum(seg_dist((x, y), *LINE)[0] for _, x, y in POINT_XY)
    add("B-22", [count("Point_lines.geojson", 6), geom("Point_lines.geojson", "length", near_total, tol=1e-6)],
        [step("coordinate pairs to lines", call("XYCoordinatesToLine", input_path="Point.geojson",
                                                  output_path="Point_lines.geojson", start_fields=["Point_X", "Point_Y"],
                                                  end_fields=["NEAR_X", "NEAR_Y"]))],
        [step("coordinate pairs to lines",
              "c = coord_pairs_to_lines(read_collection('Point.geojson'), ('Point_X', 'Point_Y'), ('NEAR_X', 'NEAR_Y'))\n"
              "save_result(c, 'Point_lines.geojson')\n")])
    add("B-23", [count("road_connector.geojson", 1), geom("road_connector.geojson", "length", 400.0, tol=1e-6)],
        [step("vertices, nearest, xy, lines, sort, connect", [
            call("FeatureVerticesToPoints", input_path="road.geojson", output_path="road_v.geojson"),
            call("JoinNearestPoints", input_path="road_v.geojson", near_path="road.geojson",
                 output_path="road_v_near.geojson"),
            call("AddXYCoordinates", input_path="road_v_near.geojson", output_path="road_v_xy.geojson"),
            call("XYCoordinatesToLine", input_path="road_v_xy.geojson", output_path="road_v_lines.geojson"),
            call("SortPointsbyField", input_path="road_v_lines.geojson", field="NEAR_DIST",
                 output_path="road_v_sorted.geojson"),
            call("CreateLineConnectingNearestPoints", input_path="road_v_sorted.geojson",
                 output_path="road_connector.geojson")])],
        [step("vertices of one road joined to the other", (
            "roads = read_collection('road.geojson')\n"
            "south, north = roads.with_features([roads[0]]), roads.with_features([roads[1]])\n"
            "v = add_xy_fields(nearest_join(vertices_to_points(south), north))\n"
            "save_result(sort_by_field(v, 'NEAR_DIST'), 'road_v_sorted.geojson')\n")),
         step("connector for the nearest vertex", (
             "v = read_collection('road_v_sorted.geojson')\n"
             "lines = coord_pairs_to_lines(v.with_features([v[0]]))\n"
             "save_result(lines, 'road_connector.geojson')\n"))])
    add("B-24", [count("circle_overlaps.geojson", 1), geom("circle_overlaps.geojson", "kind", ["Polygon"])],
        [step("self overlaps", call("OverlayAnalysis", input_path="circles.geojson",
                                      output_path="circle_overlaps.geojson"))],
        [step("self overlaps", "save_result(self_overlaps(read_collection('circles.geojson')), "
                                 "'circle_overlaps.geojson')\n")])
    add("B-25", [count("parcel_split.geojson", 2), geom("parcel_split.geojson", "area", 1e6, tol=1e-6)],
        [step("split the parcel", call("SplitPolygonByLine", input_path="parcel.geojson", line_path="line.geojson",
                                         output_path="parcel_split.geojson"), fail_times=1, on_error="retry")],
        [step("split the parcel", "c = split_polygon_by_line(read_collection('parcel.geojson'), "
                                    "read_collection('line.geojson'))\nsave_result(c, 'parcel_split.geojson')\n")])
    d01 = math.hypot(pts[1][0] - pts[0][0], pts[1][1] - pts[0][1])
    add("B-26", [count("pairwise.csv", 190), cell("pairwise.csv", "distance", 0, d01, 1e-6)],
        [step("pairwise distances", call("CalculateDistanceBetweenPoints", input_path="points.geojson",
                                           output_path="pairwise.csv"))],
        [step("pairwise distances", "save_result(pairwise_distances(read_collection('points.geojson')), "
                                      "'pairwise.csv')\n")])
    add("B-27", [count("closest_pair.geojson", 1), geom("closest_pair.geojson", "length", math.hypot(150, 20),
                                                           tol=1e-6)],
        [step("sort by distance", call("SortPointsbyField", input_path="Point.geojson", field="NEAR_DIST",
                                         output_path="Point_sorted.geojson")),
         step("connect the closest pair", call("CreateLineConnectingNearestPoints", input_path="Point_sorted.geojson",
                                                 output_path="closest_pair.geojson"))],
        [step("sort and connect the closest pair",
              "c = sort_by_field(read_collection('Point.geojson'), 'NEAR_DIST')\n"
              "save_result(connect_nearest_pair(c), 'closest_pair.geojson')\n")])

    a1 = [seg_dist(xy, *LINE)[0] for xy in AREA[0][2][:-1]]
    a2 = [seg_dist(xy, *LINE)[0] for xy in AREA[1][2][:-1]]
    add("B-28", [count("area_near_summary.geojson", 2),
                 cell("area_near_summary.geojson", "mean", by("AREA_ID", 1), sum(a1) / 4, 1e-6),
                 cell("area_near_summary.geojson", "min", by("AREA_ID", 2), min(a2), 1e-6)],
        [step("summarize vertex distances", call("SummarizeNearestDistances", input_path="area_points.geojson",
                                                   output_path="near_summary.csv", group_field="ORIG_FID")),
         step("join onto the polygons", call("MergeDataFrameToGeoDataFrame", input_path="area.geojson",
                                               table_path="near_summary.csv", geo_key="AREA_ID", table_key="ORIG_FID",
                                               output_path="area_near_summary.geojson"))],
        [step("inspect the vertex file", "print(read_collection('area_points.geojson').field_names())\n"),
         step("summarize vertex distances",
              "t = summarize_nearest(read_collection('area_points.geojson'), 'NEAR_DIST', 'ORIG_FID')\n"
              "save_result(t, 'near_summary.csv')\n"),
         step("join onto the polygons",
              "res = attribute_join(read_collection('area.geojson'), read_tabular('near_summary.csv'), "
              "'AREA_ID', 'ORIG_FID')\nsave_result(res.collection, 'area_near_summary.geojson')\n")])
    add("B-29", [count("Point_near_line.geojson", 6),
                 near("Point_near_line.geojson", "NEAR_DIST", math.sqrt(50000.0), row=by("id", 5))],
        [step("nearest point on the line", call("nearest_point_on_line", input_path="Point.geojson",
                                                  line_path="line.geojson", output_path="Point_near_line.geojson"))],
        [step("nearest point on the line",
              "c = nearest_point_on_line(read_collection('Point.geojson'), read_collection('line.geojson'))\n"
              "save_result(c, 'Point_near_line.geojson')\n")])
    add("B-30", [count("point_line_distance.csv", 6), cell("point_line_distance.csv", "distance", 3, 100.0, 1e-6)],
        [step("perpendicular distances", call("CalculatePerpendicularDistanceFromPointToLine",
                                                input_path="Point.geojson", line_path="line.geojson",
                                                output_path="point_line_distance.csv"))],
        [step("perpendicular distances",
              "t = point_line_distance(read_collection('Point.geojson'), read_collection('line.geojson'))\n"
              "save_result(t, 'point_line_distance.csv')\n")])
    add("B-31", [count("area_nearest.geojson", 2),
                 cell("area_nearest.geojson", "min", by("AREA_ID", 1), min(a1), 1e-6),
                 cell("area_nearest.geojson", "max", by("AREA_ID", 1), max(a1), 1e-6),
                 cell("area_nearest.geojson", "min", by("AREA_ID", 2), min(a2), 1e-6)],
        [step("vertices and nearest line", [
            call("FeatureVerticesToPoints", input_path="area.geojson", output_path="area_v.geojson"),
            call("JoinNearestPoints", input_path="area_v.geojson", near_path="line.geojson",
                 output_path="area_v_near.geojson")]),
         step("summarize and join", [
             call("SummarizeNearestDistances", input_path="area_v_near.geojson", output_path="area_v_summary.csv",
                  group_field="AREA_ID"),
             call("MergeDataFrameToGeoDataFrame", input_path="area.geojson", table_path="area_v_summary.csv",
                  geo_key="AREA_ID", table_key="AREA_ID", output_path="area_nearest.geojson")])],
        [step("vertices and nearest line",
              "v = nearest_join(vertices_to_points(read_collection('area.geojson')), read_collection('line.geojson'))\n"
              "save_result(v, 'area_v_near.geojson')\n"),
         step("summarize", "t = summarize_nearest(read_collection('area_v_near.geojson'), 'NEAR_DIST', 'AREA_ID')\n"
                           "save_result(t, 'area_v_summary.csv')\n"),
         step("join", "res = attribute_join(read_collection('area.geojson'), read_tabular('area_v_summary.csv'), "
                      "'AREA_ID', 'AREA_ID')\nsave_result(res.collection, 'area_nearest.geojson')\n")])
    sums = {}
    for idx, _, _, p in AREA_STATS:
        sums[idx] = sums.get(idx, 0.0) + p
    add("B-33", [count("area_stats_sum.csv", 3)] + [cell("area_stats_sum.csv", "p_sum", by("index", k), v, 1e-9)
                                                    for k, v in sums.items()],
        [step("group by index", call("GroupByOneGeoDataFrames", input_path="area_stats.geojson", by="index",
                                       aggregations=["p:sum"], output_path="area_stats_sum.csv"))],
        [step("group by index", "t = group_aggregate(read_collection('area_stats.geojson'), 'index', [('p', 'sum')])\n"
                                  "save_result(t, 'area_stats_sum.csv')\n")])
    add("B-34", [count("PACounties_center.geojson", 4), geom("PACounties_center.geojson", "kind", ["Point"]),
                 has("PACounties_center.geojson", "NAME")],
        [step("centroids", call("CalculateGeometricCenter", input_path="PACounties.geojson",
                                  output_path="PACounties_center.geojson", mode="Centroid"))],
        [step("representative points", "c = centroid_points(read_collection('PACounties.geojson'), "
                                         "'RepresentativePoint')\nsave_result(c, 'PACounties_center.geojson')\n")])
    zsum = {}
    for _, _, _, p, z in RAINFALL:
        if z:
            zsum[z] = zsum.get(z, 0.0) + p
    rz = "zone_rainfall.geojson"
    add("B-35", [count(rz, 3)] + [cell(rz, "p_sum", by("zone", z), v, 1e-9) for z, v in sorted(zsum.items())],
        [step("join, total and attach", [
            call("SpatialJoinTwoGeoDataFrames", input_path="rainfall.geojson", join_path="zone.geojson",
                 predicate="Within", output_path="rain_in_zone.geojson"),
            call("GroupByOneGeoDataFrames", input_path="rain_in_zone.geojson", by="zone", aggregations=["p:sum"],
                 output_path="zone_p.csv"),
            call("MergeDataFrameToGeoDataFrame", input_path="zone.geojson", table_path="zone_p.csv", geo_key="zone",
                 table_key="zone", output_path=rz)])],
        [step("join rainfall to zones", "j = spatial_join(read_collection('rainfall.geojson'), "
                                          "read_collection('zone.geojson'), 'Within')\n"
                                          "save_result(j, 'rain_in_zone.geojson')\n"),
         step("total per zone", "t = group_aggregate(read_collection('rain_in_zone.geojson'), 'zone', [('p', 'sum')])\n"
                                "res = attribute_join(read_collection('zone.geojson'), t, 'zone', 'zone')\n"
                                f"save_result(res.collection, {rz!r})\n")])
    add("B-36", [count("Point_by_dist.geojson", 6), cell("Point_by_dist.geojson", "id", 0, 4),
                 cell("Point_by_dist.geojson", "id", 5, 3)],
        [step("sort by NEAR_DIST", call("SortPointsbyField", input_path="Point.geojson", field="NEAR_DIST",
                                          output_path="Point_by_dist.geojson"))],
        [step("sort by NEAR_DIST", "save_result(sort_by_field(read_collection('Point.geojson'), 'NEAR_DIST'), "
                                     "'Point_by_dist.geojson')\n")])
    add("B-37", [count("rain_zone_join.geojson", 12), has("rain_zone_join.geojson", "zone"),
                 cell("rain_zone_join.geojson", "zone", by("index", "Elmwood"), "Z2"),
                 cell("rain_zone_join.geojson", "zone", by("index", "Glenrock"), None)],
        [step("spatial join", call("SpatialJoinTwoGeoDataFrames", input_path="rainfall.geojson",
                                     join_path="zone.geojson", output_path="rain_zone_join.geojson"))],
        [step("spatial join", "j = spatial_join(read_collection('rainfall.geojson'), read_collection('zone.geojson'))\n"
                                "save_result(j, 'rain_zone_join.geojson')\n")])
    wet = sum(1 for r in RAINFALL if r[3] > 1000)
    add("B-38", [count("rain_over_1000.geojson", wet), near("rain_over_1000.geojson", "p", 1050.0, stat="min")],
        [step("filter p > 1000", call("FilterRowsByExpression", input_path="rainfall.geojson", expression="p > 1000",
                                        output_path="rain_over_1000.geojson"))],
        [step("filter p > 1000", "save_result(filter_rows(read_collection('rainfall.geojson'), 'p > 1000'), "
                                   "'rain_over_1000.geojson')\n")])
    add("B-39", [count("area_coords.csv", 10), has("area_coords.csv", "vertex_index")],
        [step("export coordinates", call("ExportCoordinateofGeometry", input_path="area.geojson",
                                           output_path="area_coords.csv"))],
        [step("export coordinates", "export_coordinates(read_collection('area.geojson'), 'area_coords.csv')\n")])
    add("B-40", [exists("rainfall_bar.svg")],
        [step("bar chart", call("PlotGeoDataFrameByMatplotlib", input_path="rainfall.geojson",
                                  output_path="rainfall_bar.svg", chart="Bar", x="index", y="p",
                                  title="Precipitation by city"))],
        [step("check the columns", "print(read_collection('rainfall.geojson').field_names())\n"),
         step("bar chart", "c = read_collection('rainfall.geojson')\n"
                           "t = TabularData.from_rows([f.properties for f in c], c.field_names())\n"
                           "render_chart_svg(t, 'Bar', 'index', 'p', 'rainfall_bar.svg', 'Precipitation by city')\n")])

    # intermediate
    i1 = "county_fastfood.geojson"
    add("I-1", [count(i1, 4), count("county_fastfood.csv", 4)]
        + [cell("county_fastfood.csv", "count", by("NAME", nm), n) for nm, n in FASTFOOD_PER_COUNTY.items()],
        [step("count and save both formats", [
            call("CountTheQuantityOfSpatialFeatures", points_path="PA_Fastfoods_XY.geojson",
                 regions_path="PennsylvaniaCounties.geojson", output_path=i1),
            call("SaveAsFinalResult", input_path=i1, output_path="county_fastfood.csv")])],
        [step("count and save both formats",
              "c = count_in_regions(read_collection('PA_Fastfoods_XY.geojson'), "
              "read_collection('PennsylvaniaCounties.geojson'))\n"
              f"save_result(c, {i1!r})\nsave_result(c, 'county_fastfood.csv')\n")])
    r1_len = 0.9996 * meridian_arc(45.0, 45.1)
    add("I-2", [count("Roads_utm10.geojson", 3), geom("Roads_utm10.geojson", "crs", "EPSG:32610"),
                near("Roads_utm10.geojson", "length", r1_len, row=by("name", "R1"), tol=1e-3)],
        [step("reproject and measure", [
            call("TransformProjectionOfGeoDataFrame", input_path="Roads.geojson", target_crs="EPSG:32610",
                 output_path="Roads_32610.geojson"),
            call("CalculateGeometryLength", input_path="Roads_32610.geojson", output_path="Roads_utm10.geojson")])],
        [step("reproject and measure", "c = geometry_length(reproject(read_collection('Roads.geojson'), 'EPSG:32610'))\n"
                                         "save_result(c, 'Roads_utm10.geojson')\n")])
    add("I-3", [count("hospital_buffer.geojson", 3), geom("hospital_buffer.geojson", "crs", "EPSG:32617"),
                geom("hospital_buffer.geojson", "area", BUFFER_64 * 1e6, row=0, tol=1e-4)],
        [step("reproject and buffer", [
            call("TransformProjectionOfGeoDataFrame", input_path="PA_Hospital.geojson", target_crs="EPSG:32617",
                 output_path="PA_Hospital_32617.geojson"),
            call("CreateMultiRingBufferFromGeoDataFrame", input_path="PA_Hospital_32617.geojson", distances=[1000],
                 output_path="hospital_buffer.geojson")])],
        [step("reproject and buffer", "c = reproject(read_collection('PA_Hospital.geojson'), 'EPSG:32617')\n"
                                        "save_result(buffer(c, 1000), 'hospital_buffer.geojson')\n")])
    add("I-4", [count("Nigeria_utm29.geojson", 6), geom("Nigeria_utm29.geojson", "crs", "EPSG:32629"),
                has("Nigeria_utm29.geojson", "length")],
        [step("reproject and measure", [
            call("TransformProjectionOfGeoDataFrame", input_path="Nigeria_Major_Roads.geojson",
                 target_crs="EPSG:32629", output_path="Nigeria_32629.geojson"),
            call("CalculateGeometryLength", input_path="Nigeria_32629.geojson", output_path="Nigeria_utm29.geojson")])],
        [step("reproject and measure",
              "c = geometry_length(reproject(read_collection('Nigeria_Major_Roads.geojson'), 'EPSG:32629'))\n"
              "save_result(c, 'Nigeria_utm29.geojson')\n")])
    perims = {nm: 2 * ((b[2] - b[0]) + (b[3] - b[1])) for nm, b in SC_COUNTIES}
    add("I-6", [count("SC_boundary_length.geojson", 3)]
        + [near("SC_boundary_length.geojson", "boundary_length", float(v), row=by("NAME", nm)) for nm, v in perims.items()],
        [step("boundary lengths", call("CalculateGeometryLength", input_path="SC_county_boundaries.geojson",
                                         output_path="SC_boundary_length.geojson", field_name="boundary_length"))],
        [step("boundary lengths", "c = geometry_length(read_collection('SC_county_boundaries.geojson'), "
                                    "'boundary_length')\nsave_result(c, 'SC_boundary_length.geojson')\n")])
    add("I-7", [count("richland_thiessen.geojson", 10), exists("richland_thiessen.svg")],
        [step("thiessen polygons and a PNG plot", [
            call("CreateThiessenPolygon", input_path="Richland_SC_fastfood.geojson",
                 output_path="richland_thiessen.geojson"),
            call("PlotGeoDataFrameByMatplotlib", input_path="richland_thiessen.geojson",
                 output_path="richland_thiessen.png")])],
        [step("thiessen polygons", "c = voronoi(read_collection('Richland_SC_fastfood.geojson'))\n"
                                     "save_result(c, 'richland_thiessen.geojson')\n"),
         step("plot the polygons", "c = read_collection('richland_thiessen.geojson')\n"
                                     "pts = read_collection('Richland_SC_fastfood.geojson')\n"
                                     "render_map_svg([(c, None), (pts, None)], 'richland_thiessen.svg', "
                                     "'Thiessen polygons')\n"),
         step("confirm the image", "import os\nassert os.path.getsize('richland_thiessen.svg') > 0\n")])
    add("I-8", [count("points_rect.geojson", 1), count("points_hull.geojson", 1), exists("points_bounds.svg")],
        [step("rectangle and hull", [
            call("CreateMinPointgroupBorder", input_path="points.geojson", output_path="points_rect.geojson"),
            call("CreateMinPointgroupBorder", input_path="points.geojson", output_path="points_hull.geojson",
                 kind="ConvexHull")]),
         step("draw them", call("PlotGeoDataFrameByMatplotlib", input_path="points.geojson",
                                  output_path="points_bounds.svg", extra_layers=["points_rect.geojson",
                                                                                 "points_hull.geojson"]))],
        [step("rectangle", "save_result(min_bounding_geometry(read_collection('points.geojson'), 'RotatedRectangle'), "
                           "'points_rect.geojson')\n"),
         step("hull", "save_result(min_bounding_geometry(read_collection('points.geojson'), 'ConvexHull'), "
                      "'points_hull.geojson')\n"),
         step("draw them", "layers = [(read_collection(p), None) for p in "
                           "('points.geojson', 'points_rect.geojson', 'points_hull.geojson')]\n"
                           "render_map_svg(layers, 'points_bounds.svg', 'Minimum bounding geometry')\n")])
    add("I-9", [exists("obesity_covid.svg")],
        [step("scatter plot", call("PlotGeoDataFrameByMatplotlib", input_path="US_Counties_Obesity_Covid.geojson",
                                     output_path="obesity_covid.svg", chart="Scatter", x="obesity",
                                     y="covid_death_rate"))],
        [step("scatter plot", "c = read_collection('US_Counties_Obesity_Covid.geojson')\n"
                              "t = TabularData.from_rows([f.properties for f in c], c.field_names())\n"
                              "render_chart_svg(t, 'Scatter', 'obesity', 'covid_death_rate', 'obesity_covid.svg')\n")])
    rich = sum(1 for _, v in US_COUNTIES if v > 100000)
    add("I-10", [count("rich_counties.geojson", rich), exists("rich_counties.svg")],
        [step("filter and chart", [
            call("FilterRowsByExpression", input_path="US_Counties.geojson", expression="income > 100000",
                 output_path="rich_counties.geojson"),
            call("PlotGeoDataFrameByMatplotlib", input_path="rich_counties.geojson", output_path="rich_counties.svg",
                 chart="Bar", x="NAME", y="income")])],
        [step("filter and chart", "c = filter_rows(read_collection('US_Counties.geojson'), 'income > 100000')\n"
                                  "save_result(c, 'rich_counties.geojson')\n"
                                  "t = TabularData.from_rows([f.properties for f in c], c.field_names())\n"
                                  "render_chart_svg(t, 'Bar', 'NAME', 'income', 'rich_counties.svg')\n")])
    add("I-12", [count("houses_in_zone.geojson", 7), cell("zone_house_count.geojson", "count", 0, 7)],
        [step("clip houses to the zone", call("ClipGeoDataFrame", input_path="DamagedHouses.geojson",
                                                mask_path="SAF_SpecialStudyZone.geojson",
                                                output_path="houses_in_zone.geojson")),
         step("count them", call("CountTheQuantityOfSpatialFeatures", points_path="houses_in_zone.geojson",
                                   regions_path="SAF_SpecialStudyZone.geojson",
                                   output_path="zone_house_count.geojson"))],
        [step("clip and count", "z = read_collection('SAF_SpecialStudyZone.geojson')\n"
                                "h = clip(read_collection('DamagedHouses.geojson'), z)\n"
                                "save_result(h, 'houses_in_zone.geojson')\n"
                                "save_result(count_in_regions(h, z), 'zone_house_count.geojson')\n"
                                "print(len(h))\n")])
    add("I-13", [count("coffee_links.geojson", 8), geom("coffee_links.geojson", "length", 2 * (300 + 700 + 450 + 1200),
                                                        tol=1e-6)],
        [step("nearest shop and xy", [
            call("JoinNearestPoints", input_path="New_york_coffee_shops_EPSG6535.geojson",
                 output_path="coffee_near.geojson"),
            call("AddXYCoordinates", input_path="coffee_near.geojson", output_path="coffee_xy.geojson")]),
         step("links", call("XYCoordinatesToLine", input_path="coffee_xy.geojson",
                              output_path="coffee_links.geojson"))],
        [step("nearest shop and xy", "c = read_collection('New_york_coffee_shops_EPSG6535.geojson')\n"
                                     "save_result(add_xy_fields(nearest_join(c, c, exclude_self=True)), "
                                     "'coffee_xy.geojson')\n"),
         step("links", "save_result(coord_pairs_to_lines(read_collection('coffee_xy.geojson')), "
                       "'coffee_links.geojson')\n")])
    dirs = {nm: float(deg) for nm, (_, _, _, _, deg) in PACOUNTIES}
    dirs["Wayne"] = 0.0
    add("I-14", [count("PACounties_direction.geojson", 4)]
        + [near("PACounties_direction.geojson", "Direction", v, row=by("NAME", nm)) for nm, v in dirs.items()
           if nm != "Wayne"],
        [step("boundaries to lines", call("FeatureToLine", input_path="PACounties.geojson",
                                            output_path="PACounties_lines.geojson")),
         step("lines to polygons and direction", [
             call("FeatureToPolygon", input_path="PACounties_lines.geojson", output_path="PACounties_poly.geojson"),
             call("CalculateMainDirectionOfPolygon", input_path="PACounties_poly.geojson",
                  output_path="PACounties_direction.geojson")])],
        [step("direction", "save_result(main_direction(read_collection('PACounties.geojson')), "
                           "'PACounties_direction.geojson')\n")])
    sp = "species_count.csv"
    add("I-15", [cell(sp, "TREE_ID_count", by("SPECIES", "Acer"), 150), exists("species_bar.svg")],
        [step("count per species and chart", [
            call("GroupByOneGeoDataFrames", input_path="Street_Tree_EPSG6852_subset.geojson", by="SPECIES",
                 aggregations=["TREE_ID:count"], output_path=sp),
            call("PlotGeoDataFrameByMatplotlib", input_path=sp, output_path="species_bar.svg", chart="Bar",
                 x="SPECIES", y="TREE_ID_count")])],
        [step("count per species and chart",
              "t = group_aggregate(read_collection('Street_Tree_EPSG6852_subset.geojson'), 'SPECIES', "
              "[('TREE_ID', 'count')])\n"
              f"save_result(t, {sp!r})\n"
              "big = TabularData(t.columns, tuple(r for r in t.rows if r['TREE_ID_count'] > 100))\n"
              "render_chart_svg(big, 'Bar', 'SPECIES', 'TREE_ID_count', 'species_bar.svg')\n")])
    pairs = bus_overlap_pairs()
    add("I-16", [exists("overlap.shp"), count("overlap.shp", pairs)],
        [step("buffer both layers", [
            call("CreateMultiRingBufferFromGeoDataFrame", input_path="New_york_coffee_shops_EPSG6535.geojson",
                 distances=[500], output_path="coffee_500.geojson"),
            call("CreateMultiRingBufferFromGeoDataFrame", input_path="bus_metro_stop_EPSG6535.geojson",
                 distances=[500], output_path="bus_500.geojson")]),
         step("overlap to shapefile", call("OverlayAnalysis", input_path="coffee_500.geojson",
                                             overlay_path="bus_500.geojson", output_path="overlap.shp"))],
        [step("buffer, overlap and save",
              "a = buffer(read_collection('New_york_coffee_shops_EPSG6535.geojson'), 500)\n"
              "b = buffer(read_collection('bus_metro_stop_EPSG6535.geojson'), 500)\n"
              "save_result(overlay(a, b, 'Intersection'), 'overlap.shp')\n")])
    add("I-17", [count("fastfood_sorted.geojson", 10), cell("fastfood_sorted.geojson", "id", 0, 1),
                 cell("fastfood_sorted.geojson", "id", 9, 10)],
        [step("sort by id", call("SortPointsbyField", input_path="Richland_SC_fastfood.geojson", field="id",
                                   output_path="fastfood_sorted.geojson"))],
        [step("sort by id", "save_result(sort_by_field(read_collection('Richland_SC_fastfood.geojson'), 'id'), "
                            "'fastfood_sorted.geojson')\n")])
    hc = hull_centroid(pts)
    mean = (math.fsum(p[0] for p in pts) / len(pts), math.fsum(p[1] for p in pts) / len(pts))
    k_hull, p_hull = closest_to_center(pts, hc)
    k_mean, _ = closest_to_center(pts, mean)
    assert k_hull == k_mean, "hull centroid and mean centre disagree on the closest point"
    cl = "closest_point.geojson"
    add("I-18", [count(cl, 1), cell(cl, "NEAR_ID", 0, k_hull), near(cl, "NEAR_X", ox + p_hull[0], row=0),
                 near(cl, "NEAR_Y", oy + p_hull[1], row=0)],
        [step("centre, then nearest point", [
            call("CreateMinPointgroupBorder", input_path="points.geojson", output_path="points_hull.geojson",
                 kind="ConvexHull"),
            call("CalculateGeometricCenter", input_path="points_hull.geojson", output_path="points_center.geojson"),
            call("JoinNearestPoints", input_path="points_center.geojson", near_path="points.geojson",
                 output_path=cl)])],
        [step("distances to the mean centre", (
            "import math\nc = read_collection('points.geojson')\n"
            "xs = [f.geometry.coordinates[0] for f in c]\nys = [f.geometry.coordinates[1] for f in c]\n"
            "mx, my = math.fsum(xs) / len(xs), math.fsum(ys) / len(ys)\n"
            "rows = [{'index': i, 'id': f.properties['id'], 'distance': math.hypot(x - mx, y - my)}\n"
            "        for i, (f, x, y) in enumerate(zip(c, xs, ys))]\n"
            "save_result(TabularData.from_rows(rows, ['index', 'id', 'distance']), 'center_distances.csv')\n"
            "import json\nopen('center.json', 'w').write(json.dumps([mx, my]))\n")),
         step("closest point", (
             "import json\nfrom geoagents.model import Feature, FeatureCollection, Geometry\n"
             "t = read_tabular('center_distances.csv')\nbest = min(t.rows, key=lambda r: r['distance'])\n"
             "c = read_collection('points.geojson')\nx, y = c[best['index']].geometry.coordinates\n"
             "mx, my = json.loads(open('center.json').read())\n"
             "props = {'NEAR_ID': best['index'], 'id': best['id'], 'NEAR_DIST': best['distance'], "
             "'NEAR_X': x, 'NEAR_Y': y}\n"
             f"save_result(c.with_features([Feature(props, Geometry.point(mx, my))]), {cl!r})\n"
             "print(best['id'], x, y)\n"))])
    dens = [(g, pop / (aland / 1e6)) for g, pop, aland in NC_BLOCKS]
    add("I-19", [count("nc_density.csv", 5)] + [cell("nc_density.csv", "population_density", k, v, 1e-9)
                                                for k, (_, v) in enumerate(dens)],
        [step("compute density", call("CalculatePopulationDensity",
                                        input_path="North_Carolina_block_group_boundaries.geojson",
                                        output_path="nc_density.csv"))],
        [step("density to csv", "c = read_collection('North_Carolina_block_group_boundaries.geojson')\n"
                                "c = add_field(c, 'population_density', expression='population / (ALAND / 1000000)')\n"
                                "save_result(c, 'nc_density.csv')\n")])
    low = sum(1 for _, r in POVERTY if r < 0.05)
    add("I-20", [count("low_poverty.geojson", low), near("low_poverty.geojson", "ratio_pove", 0.047, stat="max")],
        [step("filter", call("FilterRowsByExpression", input_path="Poverty.geojson", expression="ratio_pove < 0.05",
                               output_path="low_poverty.geojson"))],
        [step("filter", "save_result(filter_rows(read_collection('Poverty.geojson'), 'ratio_pove < 0.05'), "
                        "'low_poverty.geojson')\n")])

    # advanced
    tc = "street_tree_count.csv"
    add("A-1", [count(tc, 3)] + [cell(tc, "tree_count", by("name", s), n) for s, n in TREE_EXPECTED.items()],
        [step("buffer streets", call("CreateMultiRingBufferFromGeoDataFrame",
                                       input_path="Roads_Portland_EPSG6852_subset.geojson", distances=[20],
                                       output_path="streets_20.geojson")),
         step("count trees", [
             call("CountTheQuantityOfSpatialFeatures", points_path="Street_Tree_EPSG6852_subset.geojson",
                  regions_path="streets_20.geojson", output_path="streets_trees.geojson", count_field="tree_count"),
             call("SaveAsFinalResult", input_path="streets_trees.geojson", output_path=tc)])],
        [step("buffer streets", "save_result(buffer(read_collection('Roads_Portland_EPSG6852_subset.geojson'), 20), "
                                "'streets_20.geojson')\n"),
         step("count trees", "c = count_in_regions(read_collection('Street_Tree_EPSG6852_subset.geojson'), "
                             "read_collection('streets_20.geojson'), 'tree_count')\n"
                             "t = TabularData.from_rows([{'name': f.properties['name'], 'tree_count': "
                             "f.properties['tree_count']} for f in c], ['name', 'tree_count'])\n"
                             f"save_result(t, {tc!r})\n")])
    st = "county_stations.csv"
    add("A-2", [count(st, 6)] + [cell(st, "NAME", by("STATION", s), c) for s, _, _, c in SC_STATIONS],
        [step("join and tabulate", [
            call("SpatialJoinTwoGeoDataFrames", input_path="SC_weatherstations.geojson",
                 join_path="SC_county_boundaries.geojson", predicate="Within", output_path="stations_county.geojson"),
            call("SaveAsFinalResult", input_path="stations_county.geojson", output_path=st)])],
        [step("join and tabulate", "j = spatial_join(read_collection('SC_weatherstations.geojson'), "
                                   "read_collection('SC_county_boundaries.geojson'), 'Within')\n"
                                   "rows = sorted(({'NAME': f.properties['NAME'], 'STATION': f.properties['STATION']}"
                                   " for f in j), key=lambda r: (r['NAME'], r['STATION']))\n"
                                   f"save_result(TabularData.from_rows(rows, ['NAME', 'STATION']), {st!r})\n")])
    suitable = sum(1 for r in LEVEL3_RAIN if r > 2.5)
    add("A-3", [count("suitable_counties.geojson", suitable)],
        [step("filter rainfall > 2.5", call("FilterRowsByExpression", input_path="level3_30.geojson",
                                              expression="rainfall > 2.5", output_path="suitable_counties.geojson"))],
        [step("filter rainfall > 2.5", "c = filter_rows(read_collection('level3_30.geojson'), 'rainfall > 2.5')\n"
                                       "save_result(c, 'suitable_counties.geojson')\nprint(len(c))\n")])
    sw = "school_sidewalks.csv"
    add("A-4", [count(sw, 3)] + [cell(sw, "length_sum", by("name", s), v, 1e-6) for s, v in SIDEWALK_EXPECTED.items()],
        [step("buffer schools, clip sidewalks and tag pieces with schools", [
            call("CreateMultiRingBufferFromGeoDataFrame", input_path="Columbia_schools_EPSG6569.geojson",
                 distances=[500], output_path="schools_500.geojson"),
            call("ClipGeoDataFrame", input_path="Columbia_sidewalk_EPSG6569.geojson", mask_path="schools_500.geojson",
                 output_path="sidewalk_clip.geojson"),
            call("SpatialJoinTwoGeoDataFrames", input_path="sidewalk_clip.geojson", join_path="schools_500.geojson",
                 output_path="sidewalk_pieces.geojson")]),
         step("measure and total per school", [
             call("CalculateGeometryLength", input_path="sidewalk_pieces.geojson",
                  output_path="sidewalk_pieces_len.geojson"),
             call("GroupByOneGeoDataFrames", input_path="sidewalk_pieces_len.geojson", by="name",
                  aggregations=["length:sum"], output_path=sw)])],
        [step("buffer schools", "save_result(buffer(read_collection('Columbia_schools_EPSG6569.geojson'), 500), "
                                "'schools_500.geojson')\n"),
         step("sidewalk pieces near each school",
              "b = read_collection('schools_500.geojson')\n"
              "p = spatial_join(clip(read_collection('Columbia_sidewalk_EPSG6569.geojson'), b), b)\n"
              "save_result(geometry_length(p), 'sidewalk_pieces_len.geojson')\n"),
         step("total per school", "t = group_aggregate(read_collection('sidewalk_pieces_len.geojson'), 'name', "
                                  "[('length', 'sum')])\n"
                                  f"save_result(t, {sw!r})\n")])
    pd = "pa_density.geojson"
    pa_dens = [(nm, pop / (((b[2] - b[0]) * (b[3] - b[1])) / 1e6)) for nm, b, pop in PA_COUNTIES]
    add("A-7", [count(pd, 4), exists("pa_density.svg")]
        + [near(pd, "population_density", v, row=by("NAME", nm), tol=1e-9) for nm, v in pa_dens],
        population_density_fc(), population_density_cg())
    sc = "fastfood_score.geojson"
    score = [(nm, FASTFOOD_PER_COUNTY[nm] / pop * 10000) for nm, _, pop in PA_COUNTIES]
    add("A-8", [count(sc, 4), exists("fastfood_score.svg")]
        + [near(sc, "score", v, row=by("NAME", nm), tol=1e-9) for nm, v in score],
        [step("count restaurants per county", call("CountTheQuantityOfSpatialFeatures",
                                                     points_path="PA_Fastfoods_XY.geojson",
                                                     regions_path="PennsylvaniaCounties.geojson",
                                                     output_path="county_counts.geojson")),
         step("score", call("AddFieldToGeoDataFrame", input_path="county_counts.geojson", field_name="score",
                              expression="count / Populaton * 10000", output_path=sc))],
        [step("score and map", "c = count_in_regions(read_collection('PA_Fastfoods_XY.geojson'), "
                               "read_collection('PennsylvaniaCounties.geojson'))\n"
                               "c = add_field(c, 'score', expression='count / Population * 10000')\n"
                               f"save_result(c, {sc!r})\n"
                               "render_map_svg([(c, LayerStyle(choropleth='score', classes=4))], 'fastfood_score.svg', "
                               "'Fast food accessibility')\n")])
    add("A-9", [count("building_density.geojson", 4), exists("building_density.svg")],
        [step("area of buildings", call("AddFieldToGeoDataFrame", input_path="Penn_State_Buildings.geojson",
                                          field_name="footprint", expression="$area *", output_path="b.geojson"))],
        [step("building density map", "c = read_collection('PennsylvaniaCounties.geojson')\n"
                                       "save_result(c, 'building_density.geojson')\n", fail_times=5)])
    hx, hy = hull_centroid([(x, y) for _, x, y in BUS])
    oxn, oyn = ORIGINS["EPSG:32618"]
    site = "bus_company_site.geojson"
    add("A-10", [count(site, 1), geom(site, "kind", ["Point"]), near(site, "POINT_X", oxn + hx, row=0, tol=1e-6),
                 near(site, "POINT_Y", oyn + hy, row=0, tol=1e-6)],
        [step("hull centre of the stops", [
            call("CreateMinPointgroupBorder", input_path="bus_metro_stop_EPSG6535.geojson",
                 output_path="bus_hull.geojson", kind="ConvexHull"),
            call("CalculateGeometricCenter", input_path="bus_hull.geojson", output_path="bus_center.geojson"),
            call("AddXYCoordinates", input_path="bus_center.geojson", output_path=site)])],
        [step("look at the stop layout", "c = read_collection('bus_metro_stop_EPSG6535.geojson')\n"
                                         "print(len(c), c.bounds)\n"),
         step("hull centre of the stops", "c = read_collection('bus_metro_stop_EPSG6535.geojson')\n"
                                          "h = min_bounding_geometry(c, 'ConvexHull')\n"
                                          f"save_result(add_xy_fields(centroid_points(h)), {site!r})\n")])
    return cases


def population_density_fc() -> list:
    return [
        step("read and save the counties", [
            call("ReadingDataFromGeoJSON", input_path="PennsylvaniaCounties.geojson"),
            call("SaveAsFinalResult", input_path="PennsylvaniaCounties.geojson", output_path="pa_counties.geojson")]),
        step("add the density field", call("AddFieldToGeoDataFrame", input_path="pa_counties.geojson",
                                             field_name="population_density",
                                             expression="Population / (ALAND / 1000000)",
                                             output_path="pa_density.geojson")),
        step("refresh attributes and map", call("UpdateDynamicAttributes", input_path="pa_density.geojson",
                                                  output_path="pa_density.svg")),
    ]


def population_density_cg() -> list:
    return [step("density field and choropleth", (
        "c = read_collection('PennsylvaniaCounties.geojson')\n"
        "c = add_field(c, 'population_density', expression='Population / (ALAND / 1000000)')\n"
        "save_result(c, 'pa_density.geojson')\n"
        "render_map_svg([(c, LayerStyle(choropleth='population_density', classes=4))], 'pa_density.svg', "
        "'Population density')\n"))]


def case_studies() -> dict:
    """name -> (goal, inputs, worker kind, steps, expected rounds, expected outcome)."""
    coffee, bus = "New_york_coffee_shops_EPSG6535.geojson", "bus_metro_stop_EPSG6535.geojson"
    goal_cafe = ("Find where 500 m buffers around coffee shops overlap 500 m buffers around bus stops "
                 "and save the overlap as a shapefile.")
    return {
        "basic_buffer_fc": ("Create a 100 m buffer around the polygon features.", ["area.geojson"], FC,
                            [step("create a 100 m buffer", call("CreateMultiRingBufferFromGeoDataFrame",
                                                                input_path="area.geojson", distances=[100],
                                                                output_path="area_buffer_100.geojson"))],
                            1, "Success"),
        "basic_buffer_cg": ("Create a 100 m buffer around the polygon features.", ["area.geojson"], CG,
                            [step("create a 100 m buffer", "save_result(buffer(read_collection('area.geojson'), 100), "
                                                           "'area_buffer_100.geojson')\n")],
                            1, "Success"),
        "cafe_bus_fc": (goal_cafe, [coffee, bus], FC, [
            step("buffer the coffee shops", call("CreateMultiRingBufferFromGeoDataFrame", input_path=coffee,
                                                   distances=[500], output_path="coffee_500.geojson")),
            step("buffer the bus stops", call("CreateMultiRingBufferFromGeoDataFrame", input_path=bus,
                                                distances=[500], output_path="bus_500.geojson")),
            step("overlap analysis", call("OverlayAnalysis", input_path="coffee_500.geojson",
                                            overlay_path="bus_500.geojson", output_path="overlap.geojson")),
            step("save the shapefile", call("SaveAsFinalResult", input_path="overlap.geojson",
                                              output_path="overlap.shp"))], 4, "Success"),
        "cafe_bus_cg": (goal_cafe, [coffee, bus], CG, [
            step("buffer both layers", f"save_result(buffer(read_collection({coffee!r}), 500), 'coffee_500.geojson')\n"
                                       f"save_result(buffer(read_collection({bus!r}), 500), 'bus_500.geojson')\n"),
            step("overlap analysis", "o = overlay(read_collection('coffee_500.geojson'), "
                                     "read_collection('bus_500.geojson'), 'Intersection')\n"
                                     "save_result(o, 'overlap.geojson')\n", fail_times=1, fault_field="stop_name"),
            step("save the shapefile", "save_result(read_collection('overlap.geojson'), 'overlap.shp')\n")],
            3, "Success"),
        "population_density_cg": (PROMPTS["A-7"], ["PennsylvaniaCounties.geojson"], CG, population_density_cg(),
                                  1, "Success"),
        "population_density_fc": (PROMPTS["A-7"], ["PennsylvaniaCounties.geojson"], FC, population_density_fc(),
                                  3, "Failure"),
    }


# ---------------------------------------------------------------------------
# writer
# ---------------------------------------------------------------------------

def dump(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def build(out: Path) -> dict:
    for sub in ("datasets", "remote", "plans", "case_studies"):
        shutil.rmtree(out / sub, ignore_errors=True)
    for name, doc in datasets().items():
        dump(out / "datasets" / name, doc)
    dump(out / "remote" / "pennsylvania_buildings.geojson", remote_buildings())

    specs = case_specs()
    manifest_cases = []
    for prefix, rows in ATTEMPTS.items():
        lines = ["id,function_calling,code_generation,provenance"]
        for n, (fc, cg) in enumerate(rows, 1):
            cid = f"{prefix}-{n}"
            lines.append(f"{cid},{'Failed' if fc is None else fc},{'Failed' if cg is None else cg},appendix")
            entry = {"id": cid, "level": LEVEL_NAMES[prefix], "prompt": PROMPTS[cid], "inputs": INPUTS[cid]}
            if cid in NOT_IMPLEMENTABLE:
                entry.update(implementable=False, provenance="synthetic", note=NOT_IMPLEMENTABLE[cid], checks=[])
            else:
                checks, fc_steps, cg_steps, remote = specs[cid]
                plans = {}
                for kind, steps, sub in ((FC, fc_steps, "fc"), (CG, cg_steps, "cg")):
                    rel = f"plans/{sub}/{cid}.json"
                    dump(out / rel, {"task_id": cid, "worker_kind": kind, "steps": steps})
                    plans[kind] = rel
                entry.update(implementable=True, provenance="synthetic", plan=plans, checks=checks)
                if remote:
                    entry["remote"] = remote
            manifest_cases.append(entry)
        (out / f"attempts_{LEVEL_NAMES[prefix].lower()}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    missing = set(specs) - {c["id"] for c in manifest_cases}
    assert not missing, f"specs without a catalog row: {missing}"
    manifest = {"dataset_dir": "datasets",
                "attempts": {lvl: f"attempts_{lvl.lower()}.csv" for lvl in LEVEL_NAMES.values()},
                "cases": manifest_cases}
    dump(out / "manifest.json", manifest)

    index = []
    for name, (goal, inputs, kind, steps, rounds, outcome) in case_studies().items():
        dump(out / "case_studies" / f"{name}.json", {"task_id": name, "worker_kind": kind, "steps": steps})
        index.append({"name": name, "goal": goal, "inputs": inputs, "plan": f"{name}.json",
                      "expected_rounds": rounds, "expected_outcome": outcome})
    dump(out / "case_studies" / "index.json", index)
    return manifest


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)
    manifest = build(args.out)
    print(f"wrote {len(manifest['cases'])} cases to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
