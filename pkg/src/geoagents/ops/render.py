"""Deterministic SVG maps and charts."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from ..errors import EmptyInputError, FieldError, ParameterError
from ..model import FeatureCollection, Geometry, value_type
from .io import WrittenFiles, _prepare, _write_text
from .table import TabularData, format_cell

MAP_WIDTH_PX = 800
CHART_WIDTH_PX, CHART_HEIGHT_PX = 640, 400
NULL_COLOR = "#cccccc"

# ColorBrewer YlOrRd, 3 to 9 classes.
YLORRD = {
    3: ("#ffeda0", "#feb24c", "#f03b20"),
    4: ("#ffffb2", "#fecc5c", "#fd8d3c", "#e31a1c"),
    5: ("#ffffb2", "#fecc5c", "#fd8d3c", "#f03b20", "#bd0026"),
    6: ("#ffffb2", "#fed976", "#feb24c", "#fd8d3c", "#f03b20", "#bd0026"),
    7: ("#ffffb2", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#b10026"),
    8: ("#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#b10026"),
    9: ("#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#bd0026", "#800026"),
}


@dataclass(frozen=True)
class LayerStyle:
    fill: str = "#9ecae1"
    stroke: str = "#3182bd"
    width: float = 1.0
    marker_radius: float = 4.0
    choropleth: str | None = None
    classes: int = 5

    @classmethod
    def from_mapping(cls, m: Mapping | None) -> LayerStyle:
        m = dict(m or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(m) - known)
        if unknown:
            raise ParameterError(f"unknown style field(s) {unknown}; known: {sorted(known)}")
        style = cls(**m)
        if style.choropleth is not None and style.classes not in YLORRD:
            raise ParameterError(f"choropleth classes must be between 3 and 9, got {style.classes}")
        return style


def fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def quantile_breaks(values: Sequence[float], classes: int) -> list[float]:
    """Upper bounds of ``classes`` nearest-rank quantile classes (deduplicated)."""
    vals = sorted(values)
    n = len(vals)
    breaks: list[float] = []
    for k in range(1, classes + 1):
        b = vals[math.ceil(k * n / classes) - 1]
        if not breaks or b > breaks[-1]:
            breaks.append(b)
    return breaks


def class_index(v: float, breaks: Sequence[float]) -> int:
    for k, b in enumerate(breaks):
        if v <= b:
            return k
    return len(breaks) - 1


def _ring_path(ring, flip) -> str:
    pts = [flip(x, y) for x, y in ring[:-1]]
    return "M" + " L".join(f"{fmt(x)} {fmt(y)}" for x, y in pts) + " Z"


def _line_path(coords, flip) -> str:
    pts = [flip(x, y) for x, y in coords]
    return "M" + " L".join(f"{fmt(x)} {fmt(y)}" for x, y in pts)


def _point_path(p, r, flip) -> str:
    x, y = flip(*p)
    return (f"M{fmt(x - r)} {fmt(y)} a{fmt(r)} {fmt(r)} 0 1 0 {fmt(2 * r)} 0 "
            f"a{fmt(r)} {fmt(r)} 0 1 0 {fmt(-2 * r)} 0 Z")


def geometry_path(g: Geometry, r: float, flip) -> str:
    if g.is_point:
        return " ".join(_point_path(p, r, flip) for p in g.parts())
    if g.is_line:
        return " ".join(_line_path(p, flip) for p in g.parts())
    return " ".join(_ring_path(ring, flip) for poly in g.parts() for ring in poly)


def render_map_svg(layers: Sequence, out_path: str | os.PathLike, title: str | None = None) -> WrittenFiles:
    """Render ``(collection, style)`` layers, first layer at the bottom.

    Coordinates are drawn in CRS units: the viewBox is the union bounding
    box padded by 5% of its larger side, with y negated so north is up.
    """
    if not layers:
        raise EmptyInputError("map needs at least one layer")
    norm = []
    for item in layers:
        c, style = item if isinstance(item, tuple) else (item, None)
        norm.append((c, style if isinstance(style, LayerStyle) else LayerStyle.from_mapping(style)))
    boxes = [c.bounds for c, _ in norm if c.bounds is not None]
    if not boxes:
        raise EmptyInputError("map layers have an empty bounding box")
    x0, y0 = min(b[0] for b in boxes), min(b[1] for b in boxes)
    x1, y1 = max(b[2] for b in boxes), max(b[3] for b in boxes)
    span = max(x1 - x0, y1 - y0)
    pad = 0.05 * span if span > 0 else 1.0
    vx, vy, vw, vh = x0 - pad, -(y1 + pad), (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad
    unit = vw / MAP_WIDTH_PX  # CRS units per output pixel
    height_px = max(1, round(MAP_WIDTH_PX * vh / vw))

    def flip(x, y):
        return x, -y

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{MAP_WIDTH_PX}" height="{height_px}" '
        f'viewBox="{fmt(vx)} {fmt(vy)} {fmt(vw)} {fmt(vh)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="{fmt(vx)}" y="{fmt(vy)}" width="{fmt(vw)}" height="{fmt(vh)}" fill="#ffffff"/>')
    legend = None
    for li, (c, style) in enumerate(norm):
        colors = None
        if style.choropleth is not None:
            fld = style.choropleth
            if fld not in c.field_names():
                raise FieldError(f"choropleth field {fld!r} not in layer {li}")
            vals = [f.properties.get(fld) for f in c.features]
            if {value_type(v) for v in vals} - {"number", "null"}:
                raise FieldError(f"choropleth field {fld!r} is not numeric")
            nums = [v for v in vals if v is not None]
            breaks = quantile_breaks(nums, style.classes) if nums else []
            ramp = YLORRD[style.classes]
            colors = [NULL_COLOR if v is None else ramp[class_index(v, breaks)] for v in vals]
            legend = (fld, breaks, ramp, min(nums) if nums else None)
        out.append(f'<g id="layer-{li}" stroke={quoteattr(style.stroke)} stroke-width="{fmt(style.width)}" '
                   f'vector-effect="non-scaling-stroke" fill-rule="evenodd">')
        r = style.marker_radius * unit
        for k, f in enumerate(c.features):
            if f.geometry is None or f.geometry.is_empty:
                continue
            fill = "none" if f.geometry.is_line else (colors[k] if colors else style.fill)
            out.append(f'<path d="{geometry_path(f.geometry, r, flip)}" fill={quoteattr(fill)} '
                       f'vector-effect="non-scaling-stroke"/>')
        out.append("</g>")
    if legend is not None:
        out.extend(_legend(legend, vx, vy, unit))
    out.append("</svg>")
    return _save(out, out_path)


def _legend(legend, vx, vy, unit) -> list[str]:
    fld, breaks, ramp, lo = legend
    size, gap, font = 14 * unit, 4 * unit, 11 * unit
    x, y = vx + 10 * unit, vy + 10 * unit
    lines = [f'<g id="legend" font-family="sans-serif" font-size="{fmt(font)}">',
             f'<text x="{fmt(x)}" y="{fmt(y + font)}">{escape(fld)}</text>']
    y += font + gap
    prev = lo
    for k, b in enumerate(breaks):
        label = f"{format_cell(prev)} to {format_cell(b)}"
        lines.append(f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(size)}" height="{fmt(size)}" '
                     f'fill="{ramp[k]}" stroke="#333333" stroke-width="{fmt(0.5 * unit)}"/>')
        lines.append(f'<text x="{fmt(x + size + gap)}" y="{fmt(y + size - 3 * unit)}">{escape(label)}</text>')
        y += size + gap
        prev = b
    lines.append("</g>")
    return lines


def _save(lines: list[str], out_path) -> WrittenFiles:
    p = _prepare(out_path)
    if p.suffix.lower() != ".svg":
        raise ParameterError(f"render writes .svg files, got {p.suffix or '(none)'}")
    _write_text(p, "\n".join(lines) + "\n")
    return WrittenFiles([str(p)], "svg", sum(1 for ln in lines if ln.startswith(("<path", "<rect class=", "<circle class="))))


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------


def nice_step(span: float, target_ticks: int = 5) -> float:
    """Smallest 1, 2 or 5 times 10^k that splits ``span`` into at most ``target_ticks``."""
    if span <= 0:
        return 1.0
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw * (1 - 1e-12):
            return m * mag
    return 10 * mag


def nice_ticks(lo: float, hi: float, target_ticks: int = 5) -> list[float]:
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    step = nice_step(hi - lo, target_ticks)
    start = math.floor(lo / step + 1e-9) * step
    stop = math.ceil(hi / step - 1e-9) * step
    n = int(round((stop - start) / step))
    return [round(start + k * step, 12) for k in range(n + 1)]


def _tick_label(v: float, step: float) -> str:
    decimals = max(0, -math.floor(math.log10(step))) if step < 1 else 0
    s = f"{v:.{decimals}f}"
    return "0" if s.strip("-0.") == "" else s


def _numeric_column(data: TabularData, col: str) -> list:
    vals = data.column(col)
    bad = {value_type(v) for v in vals} - {"number", "null"}
    if bad:
        raise FieldError(f"column {col!r} is not numeric ({sorted(bad)})")
    return vals


def render_chart_svg(data: TabularData, kind: str, x: str, y: str, out_path: str | os.PathLike,
                     title: str | None = None) -> WrittenFiles:
    """Bar chart (categories in input order) or scatter plot."""
    kind = {"bar": "Bar", "scatter": "Scatter"}.get(str(kind).lower())
    if kind is None:
        raise ParameterError("chart kind must be Bar or Scatter")
    ys = _numeric_column(data, y)
    xs = _numeric_column(data, x) if kind == "Scatter" else data.column(x)
    W, H = CHART_WIDTH_PX, CHART_HEIGHT_PX
    left, right, top, bottom = 60, 20, 30 if title else 15, 50
    pw, ph = W - left - right, H - top - bottom
    yvals = [v for v in ys if v is not None]
    ylo = min([0.0] + yvals) if kind == "Bar" else min(yvals, default=0.0)
    yhi = max([0.0] + yvals) if kind == "Bar" else max(yvals, default=1.0)
    yt = nice_ticks(ylo, yhi)
    ystep = yt[1] - yt[0]

    def py(v):
        return top + ph - (v - yt[0]) / (yt[-1] - yt[0]) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{W / 2:g}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for t in yt:
        out.append(f'<line x1="{left}" y1="{fmt(py(t))}" x2="{left + pw}" y2="{fmt(py(t))}" stroke="#e0e0e0"/>')
        out.append(f'<text x="{left - 6}" y="{fmt(py(t) + 4)}" text-anchor="end">{_tick_label(t, ystep)}</text>')
    if kind == "Bar":
        n = len(ys)
        slot = pw / n if n else pw
        base = py(0.0)
        for k, (cat, v) in enumerate(zip(xs, ys)):
            top_y = py(v if v is not None else 0.0)
            bx = left + k * slot + slot * 0.1
            out.append(f'<rect class="bar" x="{fmt(bx)}" y="{fmt(min(top_y, base))}" width="{fmt(slot * 0.8)}" '
                       f'height="{fmt(abs(base - top_y))}" fill="#3182bd"/>')
            out.append(f'<text x="{fmt(left + (k + 0.5) * slot)}" y="{top + ph + 16}" text-anchor="middle">'
                       f'{escape(format_cell(cat))}</text>')
    else:
        pairs = [(a, b) for a, b in zip(xs, ys) if a is not None and b is not None]
        xv = [a for a, _ in pairs]
        xt = nice_ticks(min(xv, default=0.0), max(xv, default=1.0))
        xstep = xt[1] - xt[0]

        def px(v):
            return left + (v - xt[0]) / (xt[-1] - xt[0]) * pw

        for t in xt:
            out.append(f'<text x="{fmt(px(t))}" y="{top + ph + 16}" text-anchor="middle">{_tick_label(t, xstep)}</text>')
        for a, b in pairs:
            out.append(f'<circle class="marker" cx="{fmt(px(a))}" cy="{fmt(py(b))}" r="3" fill="#de2d26"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="#333333"/>')
    out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="#333333"/>')
    out.append(f'<text x="{left + pw / 2:g}" y="{H - 10}" text-anchor="middle">{escape(x)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2:g}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2:g})">{escape(y)}</text>')
    out.append("</svg>")
    return _save(out, out_path)
