"""Scene composition and SVG serialization.

A scene is a fixed-order stack of layers (background, regions, flows,
nodes, legends, map elements) built from a project document.  Composition
is a pure function of the project plus an optional selected node id;
serialization rounds coordinates half-up at a configurable number of
decimals and is byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .analytics import filter_top_n
from .classify import (
    ClassificationResult,
    classify as classify_values,
    half_up,
    ColorRamp,
    LegendAnchor,
    classed_width,
    interpolate_color,
    legend_values,
    proportional_width,
    rgb_to_hex,
    scheme_colors,
)
from .errors import EmptyDataset, InputError, UnknownNodeReference, UnresolvedJoin
from .flowpath import flow_path
from .ingest import (
    join_attributes,
    parse_attribute_csv,
    parse_flows_csv,
    parse_nodes_csv,
    parse_regions,
)
from .model import (
    FlowNetwork,
    LayerStyle,
    ProjectFile,
    RegionFeature,
    build_network,
)
from .projections import ProjectionSpec, project_point

FIT_PADDING = 0.05  # fraction of each canvas dimension kept clear per side

NO_DATA_FILL = "#d9d9d9"

LEGEND_ROW_HEIGHT = 20.0
LEGEND_TITLE_HEIGHT = 16.0
LEGEND_MARGIN = 16.0
LEGEND_GLYPH_WIDTH = 36.0

_OPACITY_DECIMALS = 9


@dataclass
class PathData:
    """Deferred path data: commands are formatted at serialization time.

    Commands: ("M", (x, y)), ("L", (x, y)), ("C", (x1, y1), (x2, y2), (x, y))
    and ("Z",).
    """

    commands: tuple

    def render(self, fmt) -> str:
        parts: list[str] = []
        for cmd in self.commands:
            op = cmd[0]
            if op == "Z":
                parts.append("Z")
            elif op == "C":
                _, c1, c2, p = cmd
                parts.append(
                    f"C{fmt(c1[0])},{fmt(c1[1])} {fmt(c2[0])},{fmt(c2[1])} {fmt(p[0])},{fmt(p[1])}"
                )
            else:
                _, p = cmd
                parts.append(f"{op}{fmt(p[0])},{fmt(p[1])}")
        return " ".join(parts)


@dataclass
class Element:
    """One SVG element; float attribute values are rounded at serialization."""

    tag: str
    attrs: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    text: str | None = None


@dataclass
class SceneDocument:
    """The composed layered vector scene."""

    width: float
    height: float
    layers: list[Element] = field(default_factory=list)

    def layer(self, layer_id: str) -> Element | None:
        for el in self.layers:
            if el.attrs.get("id") == layer_id:
                return el
        return None


@dataclass(frozen=True)
class ViewTransform:
    """Uniform map-units-to-pixels transform with a screen y-flip."""

    projection: ProjectionSpec
    scale: float
    offset_x: float
    offset_y: float

    @classmethod
    def fit(cls, projection: ProjectionSpec, bbox: tuple[float, float, float, float],
            width: float, height: float, padding: float = FIT_PADDING) -> "ViewTransform":
        minx, miny, maxx, maxy = bbox
        dx = maxx - minx
        dy = maxy - miny
        usable_w = width * (1 - 2 * padding)
        usable_h = height * (1 - 2 * padding)
        if dx > 0 and dy > 0:
            scale = min(usable_w / dx, usable_h / dy)
        elif dx > 0:
            scale = usable_w / dx
        elif dy > 0:
            scale = usable_h / dy
        else:
            scale = 1.0
        cx = (minx + maxx) / 2
        cy = (miny + maxy) / 2
        return cls(projection, scale, width / 2 - scale * cx, height / 2 + scale * cy)

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return self.offset_x + self.scale * x, self.offset_y - self.scale * y

    def project(self, lon: float, lat: float) -> tuple[float, float]:
        return self.apply(*project_point(self.projection, lon, lat))


def svg_number(value: float, decimals: int) -> str:
    """Half-up fixed rounding, trailing zeros trimmed."""
    s = str(half_up(value, decimals))
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def _opacity(value: float) -> str:
    # opacities are not coordinates: keep full precision regardless of the
    # serializer's coordinate decimals
    s = str(half_up(value, _OPACITY_DECIMALS))
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s if s not in ("", "-0") else "0"


# --------------------------------------------------------------------------
# Style resolution helpers
# --------------------------------------------------------------------------


def _scaling_for(values: list[float], style: LayerStyle):
    """Returns (width_of_value, classification-or-None) for a layer."""
    if style.scaling.mode == "proportional":
        vmin, vmax = min(values), max(values)

        def width(v: float) -> float:
            return proportional_width(v, vmin, vmax, style.width_range)

        return width, None
    result = classify_values(values, style.scaling.method, style.scaling.k,
                          style.scaling.breaks)

    def width(v: float) -> float:
        return classed_width(result.assign(v), result.k, style.width_range)

    return width, result


def _color_for(values: list[float], style: LayerStyle,
               classification: ClassificationResult | None):
    """Returns color_of_value resolving single/continuous/classified modes."""
    color = style.color
    if color.mode == "single":
        hexcode = rgb_to_hex(color.rgb)
        return lambda v: hexcode
    if color.mode == "continuous":
        vmin, vmax = min(values), max(values)
        ramp = ColorRamp("continuous", (color.rgb, color.rgb_to))
        return lambda v: rgb_to_hex(interpolate_color(v, vmin, vmax, ramp))
    # classified: reuse the scaling classes when present so width and color
    # partition identically, else classify on our own class count
    result = classification
    if result is None or result.method == "linear_minmax":
        result = classify_values(values, "jenks", color.k)
    colors = scheme_colors(color.scheme, result.k)
    return lambda v: rgb_to_hex(colors[result.assign(v)])


def _stroke_attrs(style: LayerStyle) -> dict:
    if style.stroke.width > 0:
        return {"stroke": rgb_to_hex(style.stroke.rgb), "stroke-width": style.stroke.width}
    return {"stroke": "none"}


def _numeric(value) -> float | None:
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    return None


# --------------------------------------------------------------------------
# Layer builders
# --------------------------------------------------------------------------


def _region_path(feature: RegionFeature, vt: ViewTransform) -> PathData:
    commands: list = []
    for part in feature.polygons:
        for ring in (part.exterior, *part.holes):
            pts = [vt.project(lon, lat) for lon, lat in ring]
            commands.append(("M", pts[0]))
            commands.extend(("L", p) for p in pts[1:])
            commands.append(("Z",))
    return PathData(tuple(commands))


def _regions_layer(features, vt: ViewTransform, style: LayerStyle,
                   value_field: str | None) -> list[Element]:
    values = []
    for f in features:
        v = _numeric(f.attributes.get(value_field)) if value_field else None
        values.append(v)
    present = [v for v in values if v is not None]
    color_of = None
    if present and style.color.mode != "single":
        color_of = _color_for(present, style, None)
    single = rgb_to_hex(style.color.rgb)

    out = []
    for f, v in zip(features, values):
        if style.color.mode == "single":
            fill = single
        elif v is None or color_of is None:
            fill = NO_DATA_FILL
        else:
            fill = color_of(v)
        attrs = {
            "d": _region_path(f, vt),
            "fill": fill,
            "fill-opacity": _opacity(style.opacity),
            "fill-rule": "evenodd",
            **_stroke_attrs(style),
            "data-id": f.id,
        }
        out.append(Element("path", attrs))
    return out


def _node_radii(network: FlowNetwork, style: LayerStyle,
                volume_field: str | None):
    """Radius per node id; nodes without a numeric volume get the minimum."""
    values: dict[str, float] = {}
    if volume_field:
        for n in network.nodes:
            v = _numeric(n.attributes.get(volume_field))
            if v is not None:
                values[n.id] = v
    wmin, wmax = style.width_range
    if not values:
        mid = (wmin + wmax) / 2
        return {n.id: mid for n in network.nodes}, None, {}
    width_of, classification = _scaling_for(list(values.values()), style)
    radii = {n.id: (width_of(values[n.id]) if n.id in values else wmin)
             for n in network.nodes}
    return radii, classification, values


def _nodes_layer(network: FlowNetwork, positions, radii, style: LayerStyle,
                 volume_values: dict[str, float],
                 classification: ClassificationResult | None) -> list[Element]:
    color_of = None
    if volume_values and style.color.mode != "single":
        color_of = _color_for(list(volume_values.values()), style, classification)
    single = rgb_to_hex(style.color.rgb)
    out = []
    for n in network.nodes:
        x, y = positions[n.id]
        if style.color.mode == "single" or n.id not in volume_values or color_of is None:
            fill = single
        else:
            fill = color_of(volume_values[n.id])
        attrs = {
            "cx": x,
            "cy": y,
            "r": radii[n.id],
            "fill": fill,
            "fill-opacity": _opacity(style.opacity),
            **_stroke_attrs(style),
            "data-id": n.id,
        }
        out.append(Element("circle", attrs))
    return out


def _flows_layer(flows, positions, radii, style: LayerStyle, dim_factor: float,
                 selection: str | None):
    """Returns (elements, displayed values, classification for legends)."""
    values = [f.value for f in flows]
    width_of, classification = _scaling_for(values, style)
    color_of = _color_for(values, style, classification)

    elements = []
    for f in flows:
        spec = flow_path(
            style.flow_style,
            positions[f.origin_id],
            positions[f.dest_id],
            width_of(f.value),
            radii.get(f.origin_id, 0.0),
            radii.get(f.dest_id, 0.0),
            style.traffic_rule,
        )
        if spec is None:
            continue
        opacity = style.opacity
        if selection is not None and f.origin_id != selection and f.dest_id != selection:
            opacity = dim_factor * style.opacity
        attrs = {
            "d": PathData(spec.commands),
            "fill": color_of(f.value),
            "fill-opacity": _opacity(opacity),
            **_stroke_attrs(style),
            "data-origin": f.origin_id,
            "data-dest": f.dest_id,
        }
        elements.append(Element("path", attrs))
    return elements, values, classification


# --------------------------------------------------------------------------
# Legends
# --------------------------------------------------------------------------


@dataclass
class LegendBox:
    element: Element
    width: float
    height: float


def _legend_text(x: float, y: float, label: str, size: float = 11.0) -> Element:
    return Element("text", {"x": x, "y": y, "font-family": "sans-serif",
                            "font-size": size}, text=label)


def build_legend(kind: str, anchors: tuple[LegendAnchor, ...], style: LayerStyle,
                 *, layer: str = "flows", color_of=None, width_of=None,
                 x: float = 0.0, y: float = 0.0) -> LegendBox:
    """Assemble one legend group anchored at (x, y) top-left.

    ``kind`` is ``proportional`` (min/avg/max sample glyphs) or
    ``classified`` (one labeled row per class).  ``layer`` picks the glyph
    shape: line samples for flows, circles for nodes, color boxes for
    regions.
    """
    if kind not in ("proportional", "classified"):
        raise InputError(f"unknown legend kind {kind!r}")
    children: list[Element] = []
    cursor = y
    if style.legend.title:
        cursor += LEGEND_TITLE_HEIGHT
        children.append(Element(
            "text",
            {"x": x, "y": cursor, "font-family": "sans-serif", "font-size": 12.0,
             "font-weight": "bold"},
            text=style.legend.title,
        ))
    single = rgb_to_hex(style.color.rgb)
    for anchor in anchors:
        cursor += LEGEND_ROW_HEIGHT
        mid_y = cursor - LEGEND_ROW_HEIGHT / 2 + 4
        fill = color_of(anchor.value) if color_of is not None else single
        if layer == "flows":
            w = width_of(anchor.value) if width_of is not None else style.width_range[0]
            children.append(Element("line", {
                "x1": x, "y1": mid_y, "x2": x + LEGEND_GLYPH_WIDTH, "y2": mid_y,
                "stroke": fill, "stroke-width": max(w, 0.5),
            }))
        elif layer == "nodes":
            r = width_of(anchor.value) if width_of is not None else style.width_range[0]
            children.append(Element("circle", {
                "cx": x + LEGEND_GLYPH_WIDTH / 2, "cy": mid_y,
                "r": max(r, 0.5), "fill": fill,
            }))
        else:
            children.append(Element("rect", {
                "x": x, "y": mid_y - 6, "width": LEGEND_GLYPH_WIDTH, "height": 12,
                "fill": fill,
            }))
        children.append(_legend_text(x + LEGEND_GLYPH_WIDTH + 8, mid_y + 4, anchor.label))
    group = Element("g", {"class": f"legend legend-{layer}"}, children)
    height = cursor - y
    return LegendBox(group, LEGEND_GLYPH_WIDTH + 120, height)


# --------------------------------------------------------------------------
# Map elements
# --------------------------------------------------------------------------


def _north_arrow(width: float, height: float, corner: str) -> list[Element]:
    margin = 28.0
    positions = {
        "top-left": (margin, margin),
        "top-right": (width - margin, margin),
        "bottom-left": (margin, height - margin - 20),
        "bottom-right": (width - margin, height - margin - 20),
    }
    cx, cy = positions.get(corner, positions["top-right"])
    tip = (cx, cy)
    left = (cx - 6.0, cy + 16.0)
    right = (cx + 6.0, cy + 16.0)
    pd = PathData((("M", tip), ("L", left), ("L", (cx, cy + 11.0)), ("L", right), ("Z",)))
    return [
        Element("path", {"d": pd, "fill": "#222222"}),
        Element("text", {"x": cx, "y": cy + 30.0, "font-family": "sans-serif",
                         "font-size": 11.0, "text-anchor": "middle"}, text="N"),
    ]


def _map_elements(project: ProjectFile, vt: ViewTransform) -> list[Element]:
    settings = project.map
    out: list[Element] = []
    if settings.title:
        out.append(Element("text", {
            "x": settings.width / 2, "y": 28.0, "font-family": "sans-serif",
            "font-size": 18.0, "text-anchor": "middle", "font-weight": "bold",
        }, text=settings.title))
    if settings.north_arrow:
        out.extend(_north_arrow(settings.width, settings.height, settings.north_arrow_corner))
    if settings.projection_label:
        out.append(Element("text", {
            "x": settings.width - 10.0, "y": settings.height - 8.0,
            "font-family": "sans-serif", "font-size": 10.0, "text-anchor": "end",
        }, text=settings.projection.display_name))
    for label in settings.labels:
        x, y = vt.project(label.lon, label.lat)
        out.append(Element("text", {
            "x": x, "y": y, "font-family": "sans-serif", "font-size": 11.0,
            "text-anchor": "middle", "class": "place-label",
        }, text=label.text))
    return out


# --------------------------------------------------------------------------
# Composition
# --------------------------------------------------------------------------


def _hidden(style: LayerStyle) -> bool:
    return not style.visible or (style.stroke.width == 0 and style.opacity == 0)


def compose(project: ProjectFile, selection: str | None = None) -> SceneDocument:
    """Build the layered scene for a project.

    ``selection`` highlights one node: flows not touching it render at
    ``dim_factor`` times their configured opacity.  Raises
    :class:`UnresolvedJoin` for broken joins and :class:`EmptyDataset` when
    nodes or flows are empty.
    """
    ds = project.datasets
    joins = project.joins
    nodes = parse_nodes_csv(ds.nodes_csv, joins.node_id_field,
                            joins.node_x_field, joins.node_y_field)
    flows = parse_flows_csv(ds.flows_csv, joins.flow_origin_field,
                            joins.flow_dest_field, joins.flow_value_field)
    if not nodes:
        raise EmptyDataset("node dataset has no rows")
    if not flows:
        raise EmptyDataset("flow dataset has no rows")

    regions: list[RegionFeature] = []
    if ds.regions_geojson:
        regions = parse_regions(ds.regions_geojson, joins.region_id_property)
        if ds.attributes_csv and joins.attribute_id_field and joins.region_id_property:
            table = parse_attribute_csv(ds.attributes_csv)
            result = join_attributes(regions, table, joins.region_id_property,
                                     joins.attribute_id_field)
            regions = list(result.features)

    try:
        network = build_network(nodes, flows)
    except UnknownNodeReference as exc:
        raise UnresolvedJoin(str(exc)) from exc

    settings = project.map
    projected: list[tuple[float, float]] = []
    for n in network.nodes:
        projected.append(project_point(settings.projection, n.lon, n.lat))
    for f in regions:
        for part in f.polygons:
            for ring in (part.exterior, *part.holes):
                projected.extend(project_point(settings.projection, lon, lat)
                                 for lon, lat in ring)
    xs = [p[0] for p in projected]
    ys = [p[1] for p in projected]
    vt = ViewTransform.fit(settings.projection, (min(xs), min(ys), max(xs), max(ys)),
                           settings.width, settings.height)
    positions = {n.id: vt.project(n.lon, n.lat) for n in network.nodes}

    layers: list[Element] = []

    background_children = []
    if settings.background is not None:
        background_children.append(Element("rect", {
            "x": 0.0, "y": 0.0, "width": settings.width, "height": settings.height,
            "fill": rgb_to_hex(settings.background),
            "fill-opacity": _opacity(settings.background_opacity),
        }))
    layers.append(Element("g", {"id": "background"}, background_children))

    region_elements: list[Element] = []
    region_values: list[float] = []
    region_classification = None
    if regions and project.regions_style and project.regions_style.visible:
        style = project.regions_style
        region_elements = _regions_layer(regions, vt, style, joins.region_value_field)
        if joins.region_value_field:
            region_values = [
                v for v in (_numeric(f.attributes.get(joins.region_value_field))
                            for f in regions)
                if v is not None
            ]
            if region_values and style.color.mode == "classified":
                region_classification = classify_values(region_values, "jenks", style.color.k)
    layers.append(Element("g", {"id": "regions"}, region_elements))

    radii, node_classification, node_values = _node_radii(
        network, project.nodes_style, joins.node_volume_field)

    displayed = list(network.transit_flows())
    if project.flows_style.top_n is not None:
        displayed = filter_top_n(displayed, project.flows_style.top_n)
    flow_elements: list[Element] = []
    flow_values: list[float] = []
    flow_classification = None
    if displayed and project.flows_style.visible:
        flow_elements, flow_values, flow_classification = _flows_layer(
            displayed, positions, radii, project.flows_style,
            settings.dim_factor, selection)
    layers.append(Element("g", {"id": "flows"}, flow_elements))

    node_elements: list[Element] = []
    if not _hidden(project.nodes_style):
        node_elements = _nodes_layer(network, positions, radii, project.nodes_style,
                                     node_values, node_classification)
    layers.append(Element("g", {"id": "nodes"}, node_elements))

    legends: list[Element] = []
    cursor_bottom = settings.height - LEGEND_MARGIN
    for layer_name, style, values, classification, active in (
        ("flows", project.flows_style, flow_values, flow_classification,
         bool(flow_elements)),
        ("nodes", project.nodes_style, list(node_values.values()),
         node_classification, bool(node_elements)),
        ("regions", project.regions_style, region_values, region_classification,
         bool(region_elements)),
    ):
        if not active or style is None or not values:
            continue
        if classification is not None:
            kind = "classified"
            anchors = legend_values(values, classification, style.legend.decimals)
        else:
            kind = "proportional"
            anchors = legend_values(values, "proportional", style.legend.decimals)
        width_of = None
        color_of = _color_for(values, style, classification) \
            if style.color.mode != "single" else None
        if layer_name in ("flows", "nodes"):
            width_of, _ = _scaling_for(values, style)
        box = build_legend(kind, anchors, style, layer=layer_name,
                           color_of=color_of, width_of=width_of,
                           x=LEGEND_MARGIN, y=0.0)
        cursor_bottom -= box.height + LEGEND_MARGIN / 2
        box.element.attrs["transform"] = _translate(0.0, cursor_bottom)
        legends.append(box.element)
    layers.append(Element("g", {"id": "legends"}, legends))

    layers.append(Element("g", {"id": "map-elements"}, _map_elements(project, vt)))

    return SceneDocument(settings.width, settings.height, layers)


def _translate(dx: float, dy: float) -> str:
    # transform values are not subject to coordinate rounding; keep stable text
    return f"translate({dx:g} {dy:g})"


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def _format_attr(value, fmt) -> str:
    if isinstance(value, PathData):
        return value.render(fmt)
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, int):
        return str(value)
    return str(value)


def _write_element(el: Element, fmt, out: list[str], indent: str) -> None:
    attrs = "".join(
        f' {name}="{escape(_format_attr(value, fmt), {chr(34): "&quot;"})}"'
        for name, value in el.attrs.items()
    )
    if el.children:
        out.append(f"{indent}<{el.tag}{attrs}>")
        if el.text:
            out.append(escape(el.text))
        for child in el.children:
            _write_element(child, fmt, out, indent + "  ")
        out.append(f"{indent}</{el.tag}>")
    elif el.text is not None:
        out.append(f"{indent}<{el.tag}{attrs}>{escape(el.text)}</{el.tag}>")
    else:
        out.append(f"{indent}<{el.tag}{attrs}/>")


def to_svg(scene: SceneDocument, decimals: int = 3) -> bytes:
    """Serialize a scene to a standalone SVG document.

    Coordinates round half-up at ``decimals`` (1..6); identical scenes
    serialize to identical bytes.
    """
    if not 1 <= int(decimals) <= 6:
        raise InputError(f"decimals {decimals!r} outside [1, 6]")
    decimals = int(decimals)

    def fmt(x: float) -> str:
        return svg_number(x, decimals)

    w = fmt(scene.width)
    h = fmt(scene.height)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
    ]
    for layer in scene.layers:
        _write_element(layer, fmt, lines, "  ")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_svg(project: ProjectFile, selection: str | None = None,
               decimals: int | None = None) -> bytes:
    """Compose and serialize in one step; the CLI and the HTTP service both
    go through here so their outputs are byte-identical."""
    scene = compose(project, selection)
    return to_svg(scene, decimals if decimals is not None else project.map.decimals)
