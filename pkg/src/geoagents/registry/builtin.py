"""The built-in catalog of 40 functions and their bindings to the operations."""

from __future__ import annotations

import hashlib
import json
import threading
import warnings
from typing import Any, Callable

from .. import ops
from ..errors import GeoError, GeoWarning, ParameterError
from ..model import CrsRef, FeatureCollection, collection_metadata
from ..ops.table import TabularData
from .core import CallResult, FunctionCall, FunctionSpec, Output, ParamSpec, Registry, ValidatedCall, validate_call
from .workspace import Workspace

CATALOG_NAMES = (
    "DownloadGeoJSONData", "ReadingDataFromGeoJSON", "AddFieldToGeoDataFrame", "RenameColumnOfGeoDataFrame",
    "SaveAsFinalResult", "TransformProjectionOfGeoDataFrame", "ConvertFileFormat", "VisualizeGeoJSONData",
    "InteractiveEdit", "GroupByOneGeoDataFrames", "MergeDataFrameToGeoDataFrame", "CalculateGeometryLength",
    "ClipGeoDataFrame", "FeatureToLine", "FeatureVerticesToPoints", "FeatureToPolygon", "OverlayAnalysis",
    "CreateMultiRingBufferFromGeoDataFrame", "SpatialAnalysisOfAggregationPoints", "CreateThiessenPolygon",
    "CreateMinPointgroupBorder", "CalculateMainDirectionOfPolygon", "SortPointsbyField",
    "CreateLineConnectingNearestPoints", "CalculateDistanceBetweenPoints", "SummarizeNearestDistances",
    "JoinNearestPoints", "CalculateGeometricCenter", "CountTheQuantityOfSpatialFeatures", "nearest_point_on_line",
    "XYCoordinatesToLine", "SplitPolygonByLine", "CalculatePerpendicularDistanceFromPointToLine",
    "AddXYCoordinates", "SelectRowsFromGeoDataFrame", "FilterRowsByExpression", "SpatialJoinTwoGeoDataFrames",
    "InteractiveQuery", "ExportCoordinateofGeometry", "PlotGeoDataFrameByMatplotlib",
)
CATALOG_CHECKSUM = "628dd07b5b80bcd8"  # first 16 hex digits of sha256 over the newline-joined names
NOT_IMPLEMENTED = frozenset({"InteractiveEdit", "InteractiveQuery"})


def catalog_checksum(names) -> str:
    return hashlib.sha256("\n".join(names).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# spec helpers
# ---------------------------------------------------------------------------


def P(name, type_, desc, required=True, **kw) -> ParamSpec:
    return ParamSpec(name, type_, required, desc, **kw)


IN = P("input_path", "path", "GeoJSON file to read, relative to the workspace")
OUT = P("output_path", "path", "file to write; the extension picks the format (.geojson, .shp, .csv)")
OUT_TABLE = P("output_path", "path", "table file to write (.csv or .json)")
OUT_SVG = P("output_path", "path", "SVG file to write")
RET_FILE = {"type": "file", "description": "path of the written file"}
RET_TABLE = {"type": "file", "description": "path of the written table"}


def spec(name, description, params, returns=RET_FILE, example_args=None) -> FunctionSpec:
    example = json.dumps({"name": name, "arguments": example_args or {}}, ensure_ascii=False)
    return FunctionSpec(name, description, tuple(params), dict(returns), example, name not in NOT_IMPLEMENTED)


SPECS = [
    spec("DownloadGeoJSONData", "Download GeoJSON from an http(s) URL and save it in the workspace.",
         [P("url", "string", "http or https URL of a GeoJSON document"), OUT],
         example_args={"url": "https://example.org/data.geojson", "output_path": "data.geojson"}),
    spec("ReadingDataFromGeoJSON", "Read a GeoJSON file and report its feature count, geometry types, fields, "
         "CRS and bounding box.", [IN], {"type": "table", "description": "file metadata summary"},
         {"input_path": "roads.geojson"}),
    spec("AddFieldToGeoDataFrame", "Add a field computed per row from an expression (a literal such as 0 or "
         "'x' gives a constant).",
         [IN, P("field_name", "string", "name of the new field"),
          P("expression", "expression", "value expression, e.g. population / (ALAND / 1000000)"), OUT,
          P("overwrite", "boolean", "replace an existing field of the same name", False, default=False)],
         example_args={"input_path": "counties.geojson", "field_name": "density",
                       "expression": "population / (ALAND / 1000000)", "output_path": "out.geojson"}),
    spec("RenameColumnOfGeoDataFrame", "Rename fields; old_names[i] becomes new_names[i], all at once.",
         [IN, P("old_names", "string_list", "existing field names", of="input_path"),
          P("new_names", "string_list", "replacement names, same length as old_names"), OUT],
         example_args={"input_path": "rain.geojson", "old_names": ["p"], "new_names": ["precip"],
                       "output_path": "out.geojson"}),
    spec("SaveAsFinalResult", "Save a workspace file as a final result; the output extension picks the "
         "format.", [P("input_path", "path", "GeoJSON or CSV file to save"), OUT],
         example_args={"input_path": "tmp/result.geojson", "output_path": "final/result.shp"}),
    spec("TransformProjectionOfGeoDataFrame", "Reproject to another CRS (EPSG:4326, EPSG:3857 or a UTM "
         "EPSG:326xx/327xx code), or clear the CRS with 'none'.",
         [IN, P("target_crs", "crs", "target CRS, e.g. EPSG:32650, or 'none' to clear"), OUT,
          P("source_crs", "crs", "CRS to assume for the input before transforming", False)],
         example_args={"input_path": "cafes.geojson", "target_crs": "EPSG:32650", "output_path": "cafes_utm.geojson"}),
    spec("ConvertFileFormat", "Convert a GeoJSON file to shapefile (.shp) or CSV (.csv).", [IN, OUT],
         example_args={"input_path": "roads.geojson", "output_path": "roads.shp"}),
    spec("VisualizeGeoJSONData", "Draw a GeoJSON file as an SVG map.",
         [IN, OUT_SVG, P("title", "string", "map title", False)], {"type": "file", "description": "SVG map"},
         {"input_path": "roads.geojson", "output_path": "roads.svg"}),
    spec("InteractiveEdit", "Interactive editing session (not available in batch execution).",
         [IN], {"type": "message", "description": "not available"}, {"input_path": "roads.geojson"}),
    spec("GroupByOneGeoDataFrames", "Group rows by a field and aggregate other fields; aggregations are "
         "'field:fn' with fn in sum, mean, min, max, count.",
         [IN, P("by", "field", "grouping field", of="input_path"),
          P("aggregations", "string_list", "list of 'field:fn' items"), OUT_TABLE], RET_TABLE,
         {"input_path": "rain.geojson", "by": "index", "aggregations": ["p:sum"], "output_path": "totals.csv"}),
    spec("MergeDataFrameToGeoDataFrame", "Left-join a CSV table onto a GeoJSON file by key fields.",
         [IN, P("table_path", "path", "CSV table to join"),
          P("geo_key", "field", "key field in the GeoJSON file", of="input_path"),
          P("table_key", "string", "key column in the table"), OUT],
         example_args={"input_path": "counties.geojson", "table_path": "stats.csv", "geo_key": "GEOID",
                       "table_key": "GEOID", "output_path": "joined.geojson"}),
    spec("CalculateGeometryLength", "Add the length of each line (perimeter for polygons) in CRS units.",
         [IN, OUT, P("field_name", "string", "name of the length field", False, default="length")],
         example_args={"input_path": "roads_utm.geojson", "output_path": "roads_len.geojson"}),
    spec("ClipGeoDataFrame", "Clip features to the union of the mask polygons.",
         [IN, P("mask_path", "path", "GeoJSON polygons used as the clip mask"), OUT],
         example_args={"input_path": "roads.geojson", "mask_path": "city.geojson", "output_path": "clipped.geojson"}),
    spec("FeatureToLine", "Convert polygon boundaries to lines, one per ring; lines pass through.", [IN, OUT],
         example_args={"input_path": "parcels.geojson", "output_path": "parcel_lines.geojson"}),
    spec("FeatureVerticesToPoints", "Create one point per vertex of lines or polygons.", [IN, OUT],
         example_args={"input_path": "roads.geojson", "output_path": "vertices.geojson"}),
    spec("FeatureToPolygon", "Build polygons from the faces enclosed by lines.",
         [IN, OUT, P("tolerance", "number", "close open lines whose ends are this close", False, default=0.0)],
         example_args={"input_path": "boundaries.geojson", "output_path": "faces.geojson"}),
    spec("OverlayAnalysis", "Overlay two polygon files (Intersection, Union, Difference, "
         "SymmetricDifference). Without overlay_path, returns the areas where features of the input overlap.",
         [IN, OUT, P("overlay_path", "path", "second polygon file", False),
          P("mode", "string", "overlay operation", False,
            choices=("Intersection", "Union", "Difference", "SymmetricDifference"), default="Intersection")],
         example_args={"input_path": "cafe_buffers.geojson", "overlay_path": "stop_buffers.geojson",
                       "output_path": "overlap.geojson", "mode": "Intersection"}),
    spec("CreateMultiRingBufferFromGeoDataFrame", "Buffer features by one or more ascending distances in CRS "
         "units; rings after the first are annuli. Reproject degree data to a metric CRS first.",
         [IN, P("distances", "number_list", "strictly ascending positive distances"), OUT,
          P("allow_geographic", "boolean", "permit buffering in degrees", False, default=False)],
         example_args={"input_path": "cafes_utm.geojson", "distances": [500], "output_path": "buffers.geojson"}),
    spec("SpatialAnalysisOfAggregationPoints", "Cluster points by single linkage: points chained by hops of at "
         "most threshold share a cluster_id.",
         [IN, P("threshold", "number", "linking distance in CRS units"), OUT],
         example_args={"input_path": "shops.geojson", "threshold": 250, "output_path": "clusters.geojson"}),
    spec("CreateThiessenPolygon", "Create Thiessen (Voronoi) polygons for points, clipped to an envelope "
         "around the points.", [IN, OUT],
         example_args={"input_path": "stations.geojson", "output_path": "thiessen.geojson"}),
    spec("CreateMinPointgroupBorder", "Minimum-area rotated rectangle or convex hull around all points, or "
         "around each group.",
         [IN, OUT, P("kind", "string", "bounding geometry", False, choices=("RotatedRectangle", "ConvexHull"),
                     default="RotatedRectangle"),
          P("group_field", "field", "one geometry per value of this field", False, of="input_path")],
         example_args={"input_path": "points.geojson", "output_path": "mbr.geojson", "kind": "ConvexHull"}),
    spec("CalculateMainDirectionOfPolygon", "Add the orientation in degrees [0, 180) counterclockwise from "
         "east of the long side of each polygon's minimum rectangle.",
         [IN, OUT, P("field_name", "string", "name of the direction field", False, default="Direction")],
         example_args={"input_path": "buildings.geojson", "output_path": "direction.geojson"}),
    spec("SortPointsbyField", "Sort features by a field (stable; nulls last).",
         [IN, P("field", "field", "field to sort on", of="input_path"), OUT,
          P("order", "string", "sort order", False, choices=("Asc", "Desc"), default="Asc")],
         example_args={"input_path": "near.geojson", "field": "NEAR_DIST", "output_path": "sorted.geojson"}),
    spec("CreateLineConnectingNearestPoints", "Connect the closest pair of points with a line.", [IN, OUT],
         example_args={"input_path": "points.geojson", "output_path": "closest_pair.geojson"}),
    spec("CalculateDistanceBetweenPoints", "Table of distances between every pair of points.",
         [IN, OUT_TABLE], RET_TABLE, {"input_path": "points.geojson", "output_path": "distances.csv"}),
    spec("SummarizeNearestDistances", "Table of min, max, mean and count of a distance field, overall or "
         "per group.",
         [IN, OUT_TABLE, P("distance_field", "field", "numeric distance field", False, of="input_path",
                           default="NEAR_DIST"),
          P("group_field", "field", "summarize per value of this field", False, of="input_path")], RET_TABLE,
         {"input_path": "near.geojson", "output_path": "summary.csv"}),
    spec("JoinNearestPoints", "Add NEAR_ID, NEAR_DIST, NEAR_X, NEAR_Y for the nearest feature in near_path "
         "(points or lines). Without near_path the input is matched against itself.",
         [IN, OUT, P("near_path", "path", "GeoJSON points or lines to search", False),
          P("exclude_self", "boolean", "skip the feature with the same index", False)],
         example_args={"input_path": "schools.geojson", "near_path": "stops.geojson", "output_path": "near.geojson"}),
    spec("CalculateGeometricCenter", "Replace geometries by their centroid, or by a point guaranteed to lie "
         "inside.",
         [IN, OUT, P("mode", "string", "point to compute", False, choices=("Centroid", "RepresentativePoint"),
                     default="Centroid")],
         example_args={"input_path": "parks.geojson", "output_path": "centers.geojson"}),
    spec("CountTheQuantityOfSpatialFeatures", "Count points inside each polygon (boundary counts as inside).",
         [P("points_path", "path", "GeoJSON points"), P("regions_path", "path", "GeoJSON polygons"), OUT,
          P("count_field", "string", "name of the count field", False, default="count")],
         example_args={"points_path": "restaurants.geojson", "regions_path": "counties.geojson",
                       "output_path": "counts.geojson"}),
    spec("nearest_point_on_line", "Snap each point to the closest position on the nearest line.",
         [IN, P("line_path", "path", "GeoJSON lines"), OUT],
         example_args={"input_path": "points.geojson", "line_path": "roads.geojson", "output_path": "snapped.geojson"}),
    spec("XYCoordinatesToLine", "Create one line per row from start coordinate fields to end coordinate "
         "fields.",
         [IN, OUT, P("start_fields", "string_list", "x and y start fields", False, of="input_path",
                     default=["POINT_X", "POINT_Y"]),
          P("end_fields", "string_list", "x and y end fields", False, of="input_path", default=["NEAR_X", "NEAR_Y"])],
         example_args={"input_path": "near.geojson", "output_path": "links.geojson"}),
    spec("SplitPolygonByLine", "Split polygons along crossing lines; parts get part_index.",
         [IN, P("line_path", "path", "GeoJSON cutting lines"), OUT],
         example_args={"input_path": "parcels.geojson", "line_path": "roads.geojson", "output_path": "split.geojson"}),
    spec("CalculatePerpendicularDistanceFromPointToLine", "Table of the shortest distance from every point to "
         "every line.",
         [IN, P("line_path", "path", "GeoJSON lines"), OUT_TABLE], RET_TABLE,
         {"input_path": "points.geojson", "line_path": "rivers.geojson", "output_path": "dist.csv"}),
    spec("AddXYCoordinates", "Add POINT_X and POINT_Y fields to point features.", [IN, OUT],
         example_args={"input_path": "points.geojson", "output_path": "points_xy.geojson"}),
    spec("SelectRowsFromGeoDataFrame", "Select rows by 0-based position or by feature id, in the given order.",
         [IN, OUT, P("indices", "number_list", "row positions", False),
          P("ids", "string_list", "feature ids", False)],
         example_args={"input_path": "roads.geojson", "output_path": "first.geojson", "indices": [0]}),
    spec("FilterRowsByExpression", "Keep rows where the expression is true.",
         [IN, P("expression", "expression", "condition, e.g. p > 1000 and name != 'x'"), OUT],
         example_args={"input_path": "rain.geojson", "expression": "p > 1000", "output_path": "wet.geojson"}),
    spec("SpatialJoinTwoGeoDataFrames", "Attach attributes of join_path features matching each input "
         "feature; unmatched rows keep nulls.",
         [IN, P("join_path", "path", "GeoJSON to join from"), OUT,
          P("predicate", "string", "spatial relation of input to joined feature", False,
            choices=("Intersects", "Within", "Contains"), default="Intersects")],
         example_args={"input_path": "stores.geojson", "join_path": "districts.geojson",
                       "output_path": "stores_district.geojson", "predicate": "Within"}),
    spec("InteractiveQuery", "Interactive query session (not available in batch execution).",
         [IN], {"type": "message", "description": "not available"}, {"input_path": "roads.geojson"}),
    spec("ExportCoordinateofGeometry", "Write every vertex coordinate to CSV.",
         [IN, P("output_path", "path", "CSV file to write")],
         example_args={"input_path": "roads.geojson", "output_path": "coords.csv"}),
    spec("PlotGeoDataFrameByMatplotlib", "Draw an SVG map, optionally a choropleth of a numeric field; or a "
         "Bar/Scatter chart of two columns of a table.",
         [IN, OUT_SVG, P("column", "field", "numeric field for a choropleth", False, of="input_path"),
          P("classes", "integer", "quantile classes for the choropleth (3 to 9)", False, default=5),
          P("title", "string", "figure title", False),
          P("extra_layers", "string_list", "more GeoJSON files drawn on top", False),
          P("chart", "string", "draw a chart instead of a map", False, choices=("Bar", "Scatter")),
          P("x", "string", "chart x column", False), P("y", "string", "chart y column", False)],
         {"type": "file", "description": "SVG figure"},
         {"input_path": "counties.geojson", "output_path": "density.svg", "column": "density"}),
]


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _read(ws: Workspace, args, key="input_path") -> FeatureCollection:
    return ops.read_collection(ws.resolve(args[key]))


def _read_any(ws: Workspace, path: str):
    full = ws.resolve(path)
    if full.suffix.lower() == ".csv":
        return ops.read_tabular(full)
    return ops.read_collection(full)


def _save(ws: Workspace, data, args, key="output_path") -> list[Output]:
    rep = ops.save_result(data, ws.resolve(args[key]))
    outs = [Output("file", ws.relative(p)) for p in rep.paths]
    kind = "rows" if isinstance(data, TabularData) else "features"
    outs.append(Output("message", f"wrote {rep.records} {kind} to {ws.relative(rep.paths[0])}"))
    outs.extend(Output("message", n) for n in rep.notes)
    return outs


def _report(ws: Workspace, rep) -> list[Output]:
    return [Output("file", ws.relative(p)) for p in rep.paths] + \
           [Output("message", f"wrote {rep.records} records to {ws.relative(rep.paths[0])}")]


def _unary(fn: Callable[[FeatureCollection, dict], Any]):
    def handler(args, ws):
        return _save(ws, fn(_read(ws, args), args), args)
    return handler


def _parse_aggs(items) -> list[tuple[str, str]]:
    out = []
    for it in items:
        fld, sep, fn = it.rpartition(":")
        if not sep or not fld:
            raise ParameterError(f"aggregation {it!r} must look like 'field:fn'")
        out.append((fld, fn))
    return out


def h_download(args, ws):
    c = ops.fetch_remote_collection(args["url"], transport=ws.transport)
    return _save(ws, c, args)


def h_read(args, ws):
    c = _read(ws, args)
    meta = collection_metadata(c, args["input_path"])
    return [Output("table", meta.to_json()),
            Output("message", f"{meta.feature_count} features, geometry {sorted(meta.geometry_kinds)}, "
                              f"crs {meta.crs.name}, fields {list(meta.property_schema)}")]


def h_add_field(args, ws):
    c = ops.add_field(_read(ws, args), args["field_name"], expression=args["expression"],
                      overwrite=args["overwrite"])
    return _save(ws, c, args)


def h_rename(args, ws):
    old, new = args["old_names"], args["new_names"]
    if len(old) != len(new):
        raise ParameterError("old_names and new_names must have the same length")
    if len(set(old)) != len(old):
        raise ParameterError("old_names contains duplicates")
    return _save(ws, ops.rename_fields(_read(ws, args), dict(zip(old, new))), args)


def h_save(args, ws):
    return _save(ws, _read_any(ws, args["input_path"]), args)


def h_reproject(args, ws):
    c = _read(ws, args)
    if "source_crs" in args:
        c = c.with_features(c.features, crs=CrsRef.parse(args["source_crs"]))
    return _save(ws, ops.reproject(c, args["target_crs"]), args)


def h_convert(args, ws):
    rep = ops.convert_format(ws.resolve(args["input_path"]), ws.resolve(args["output_path"]))
    return _report(ws, rep) + [Output("message", n) for n in rep.notes]


def h_visualize(args, ws):
    rep = ops.render_map_svg([(_read(ws, args), None)], ws.resolve(args["output_path"]), args.get("title"))
    return _report(ws, rep)


def h_not_implemented(args, ws):
    raise NotImplementedError


def h_group(args, ws):
    t = ops.group_aggregate(_read(ws, args), args["by"], _parse_aggs(args["aggregations"]))
    return _save(ws, t, args)


def h_merge(args, ws):
    table = ops.read_tabular(ws.resolve(args["table_path"]))
    res = ops.attribute_join(_read(ws, args), table, args["geo_key"], args["table_key"])
    outs = _save(ws, res.collection, args)
    outs.append(Output("scalar", {"matched": res.matched, "duplicate_keys": res.duplicate_keys}))
    return outs


def h_overlay(args, ws):
    a = _read(ws, args)
    if "overlay_path" in args:
        return _save(ws, ops.overlay(a, _read(ws, args, "overlay_path"), args["mode"]), args)
    if args["mode"] != "Intersection":
        raise ParameterError("without overlay_path only the Intersection mode (self-overlap) is defined")
    return _save(ws, ops.self_overlaps(a), args)


def h_select(args, ws):
    idx = args.get("indices")
    if idx is not None:
        bad = [v for v in idx if float(v) != int(v)]
        if bad:
            raise ParameterError(f"row indices must be whole numbers, got {bad}")
        idx = [int(v) for v in idx]
    return _save(ws, ops.select_rows(_read(ws, args), indices=idx, ids=args.get("ids")), args)


def h_nearest(args, ws):
    src = _read(ws, args)
    if "near_path" in args:
        target, excl = _read(ws, args, "near_path"), args.get("exclude_self", False)
    else:
        target, excl = src, args.get("exclude_self", True)
    return _save(ws, ops.nearest_join(src, target, exclude_self=excl), args)


def h_count(args, ws):
    c = ops.count_in_regions(_read(ws, args, "points_path"), _read(ws, args, "regions_path"), args["count_field"])
    return _save(ws, c, args)


def h_xy_to_line(args, ws):
    start, end = args["start_fields"], args["end_fields"]
    if len(start) != 2 or len(end) != 2:
        raise ParameterError("start_fields and end_fields each need exactly two names (x, y)")
    return _save(ws, ops.coord_pairs_to_lines(_read(ws, args), tuple(start), tuple(end)), args)


def h_export(args, ws):
    return _report(ws, ops.export_coordinates(_read(ws, args), ws.resolve(args["output_path"])))


def h_plot(args, ws):
    out = ws.resolve(args["output_path"])
    if "chart" in args:
        if "x" not in args or "y" not in args:
            raise ParameterError("a chart needs both x and y columns")
        data = _read_any(ws, args["input_path"])
        if isinstance(data, FeatureCollection):
            data = TabularData.from_rows([f.properties for f in data.features], data.field_names())
        return _report(ws, ops.render_chart_svg(data, args["chart"], args["x"], args["y"], out, args.get("title")))
    style = {"choropleth": args["column"], "classes": args["classes"]} if "column" in args else None
    layers = [(_read(ws, args), style)]
    layers += [(ops.read_collection(ws.resolve(p)), {"fill": "none", "stroke": "#636363"})
               for p in args.get("extra_layers", [])]
    return _report(ws, ops.render_map_svg(layers, out, args.get("title")))


HANDLERS: dict[str, Callable] = {
    "DownloadGeoJSONData": h_download,
    "ReadingDataFromGeoJSON": h_read,
    "AddFieldToGeoDataFrame": h_add_field,
    "RenameColumnOfGeoDataFrame": h_rename,
    "SaveAsFinalResult": h_save,
    "TransformProjectionOfGeoDataFrame": h_reproject,
    "ConvertFileFormat": h_convert,
    "VisualizeGeoJSONData": h_visualize,
    "InteractiveEdit": h_not_implemented,
    "GroupByOneGeoDataFrames": h_group,
    "MergeDataFrameToGeoDataFrame": h_merge,
    "CalculateGeometryLength": _unary(lambda c, a: ops.geometry_length(c, a["field_name"])),
    "ClipGeoDataFrame": lambda a, ws: _save(ws, ops.clip(_read(ws, a), _read(ws, a, "mask_path")), a),
    "FeatureToLine": _unary(lambda c, a: ops.features_to_lines(c)),
    "FeatureVerticesToPoints": _unary(lambda c, a: ops.vertices_to_points(c)),
    "FeatureToPolygon": _unary(lambda c, a: ops.lines_to_polygons(c, a["tolerance"])),
    "OverlayAnalysis": h_overlay,
    "CreateMultiRingBufferFromGeoDataFrame":
        _unary(lambda c, a: ops.buffer(c, a["distances"], allow_geographic=a["allow_geographic"])),
    "SpatialAnalysisOfAggregationPoints": _unary(lambda c, a: ops.cluster_points(c, a["threshold"])),
    "CreateThiessenPolygon": _unary(lambda c, a: ops.voronoi(c)),
    "CreateMinPointgroupBorder": _unary(lambda c, a: ops.min_bounding_geometry(c, a["kind"], a.get("group_field"))),
    "CalculateMainDirectionOfPolygon": _unary(lambda c, a: ops.main_direction(c, a["field_name"])),
    "SortPointsbyField": _unary(lambda c, a: ops.sort_by_field(c, a["field"], a["order"])),
    "CreateLineConnectingNearestPoints": _unary(lambda c, a: ops.connect_nearest_pair(c)),
    "CalculateDistanceBetweenPoints": _unary(lambda c, a: ops.pairwise_distances(c)),
    "SummarizeNearestDistances":
        _unary(lambda c, a: ops.summarize_nearest(c, a["distance_field"], a.get("group_field"))),
    "JoinNearestPoints": h_nearest,
    "CalculateGeometricCenter": _unary(lambda c, a: ops.centroid_points(c, a["mode"])),
    "CountTheQuantityOfSpatialFeatures": h_count,
    "nearest_point_on_line":
        lambda a, ws: _save(ws, ops.nearest_point_on_line(_read(ws, a), _read(ws, a, "line_path")), a),
    "XYCoordinatesToLine": h_xy_to_line,
    "SplitPolygonByLine":
        lambda a, ws: _save(ws, ops.split_polygon_by_line(_read(ws, a), _read(ws, a, "line_path")), a),
    "CalculatePerpendicularDistanceFromPointToLine":
        lambda a, ws: _save(ws, ops.point_line_distance(_read(ws, a), _read(ws, a, "line_path")), a),
    "AddXYCoordinates": _unary(lambda c, a: ops.add_xy_fields(c)),
    "SelectRowsFromGeoDataFrame": h_select,
    "FilterRowsByExpression": _unary(lambda c, a: ops.filter_rows(c, a["expression"])),
    "SpatialJoinTwoGeoDataFrames":
        lambda a, ws: _save(ws, ops.spatial_join(_read(ws, a), _read(ws, a, "join_path"), a["predicate"]), a),
    "InteractiveQuery": h_not_implemented,
    "ExportCoordinateofGeometry": h_export,
    "PlotGeoDataFrameByMatplotlib": h_plot,
}


def builtin_registry() -> Registry:
    r = Registry(SPECS, HANDLERS)
    if catalog_checksum(r.names()) != CATALOG_CHECKSUM:
        raise AssertionError("built-in function names drifted from the catalog")
    return r


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def with_defaults(spec: FunctionSpec, args: dict) -> dict:
    out = dict(args)
    for p in spec.params:
        if p.name not in out and p.default is not None:
            out[p.name] = list(p.default) if isinstance(p.default, list) else p.default
    return out


_WARNINGS_LOCK = threading.Lock()


def dispatch(r: Registry, call: FunctionCall | ValidatedCall | dict, ws: Workspace) -> CallResult:
    """Run a call in ``ws``; library failures become ``Error`` results."""
    if not isinstance(call, ValidatedCall):
        call = validate_call(r, call)
    if not call.ok:
        return CallResult.failure("invalid_call", "; ".join(str(v) for v in call.violations))
    fc = call.call
    spec = r.get(fc.name)
    if not spec.implemented:
        return CallResult.failure("not_implemented", f"{fc.name} needs an interactive session and is not "
                                                     "available here")
    handler = r.handler(fc.name)
    if handler is None:
        return CallResult.failure("not_implemented", f"{fc.name} has no handler")
    # the warnings filter state is process-global, so concurrent dispatches take turns
    with _WARNINGS_LOCK, warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GeoWarning)
        try:
            outputs = handler(with_defaults(spec, fc.arguments), ws)
        except GeoError as exc:
            notes = [Output("message", str(w.message)) for w in caught if issubclass(w.category, GeoWarning)]
            return CallResult.failure(exc.code, exc.message, notes)
        except Exception as exc:  # a library bug must not take down the agent loop
            return CallResult.failure("internal_error", f"{type(exc).__name__}: {exc}")
    notes = [Output("message", f"warning: {w.message}") for w in caught if issubclass(w.category, GeoWarning)]
    return CallResult("Ok", tuple(outputs) + tuple(notes))
