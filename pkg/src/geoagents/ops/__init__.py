"""Geospatial operations on :class:`~geoagents.model.FeatureCollection` values."""

from __future__ import annotations

from .attributes import (AttributeJoinResult, add_field, add_xy_fields, attribute_join, filter_rows,
                         group_aggregate, rename_fields, reproject, select_rows, sort_by_field)
from .hull import convex_hull, main_direction, min_area_rectangle, min_bounding_geometry
from .io import (WrittenFiles, convert_format, export_coordinates, fetch_remote_collection, read_collection,
                 read_tabular, save_result)
from .measure import centroid_points, geometry_length
from .overlay import (buffer, clip, features_to_lines, lines_to_polygons, overlay, self_overlaps,
                      split_polygon_by_line, vertices_to_points)
from .proximity import (cluster_points, connect_nearest_pair, coord_pairs_to_lines, count_in_regions,
                        nearest_join, nearest_point_on_line, pairwise_distances, point_line_distance,
                        spatial_join, summarize_nearest)
from .render import LayerStyle, render_chart_svg, render_map_svg
from .table import TabularData
from .voronoi import voronoi

__all__ = [
    "AttributeJoinResult", "LayerStyle", "TabularData", "WrittenFiles",
    "add_field", "add_xy_fields", "attribute_join", "buffer", "centroid_points", "clip", "cluster_points",
    "connect_nearest_pair", "convert_format", "convex_hull", "coord_pairs_to_lines", "count_in_regions",
    "export_coordinates", "features_to_lines", "fetch_remote_collection", "filter_rows", "geometry_length",
    "group_aggregate", "lines_to_polygons", "main_direction", "min_area_rectangle", "min_bounding_geometry",
    "nearest_join", "nearest_point_on_line", "overlay", "pairwise_distances", "point_line_distance",
    "read_collection", "read_tabular", "rename_fields", "render_chart_svg", "render_map_svg", "reproject",
    "save_result", "select_rows", "self_overlaps", "sort_by_field", "spatial_join", "split_polygon_by_line",
    "summarize_nearest", "vertices_to_points", "voronoi",
]
