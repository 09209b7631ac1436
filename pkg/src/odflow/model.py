"""Core domain types: node/flow/region records, the assembled flow network,
layer styling and the persistable project document.

Everything here is immutable after construction and safe to share across
concurrent readers.  Node ids are compared as exact trimmed strings ("9" is
not "09"); flow values are plain decimal reals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    DuplicateNodeId,
    InputError,
    NonNumericValue,
    UnknownNodeReference,
    UnresolvedJoin,
)
from .projections import ProjectionSpec

PROJECT_FORMAT_VERSION = "1"

Point = tuple[float, float]


def canonical_key(value: Any) -> str:
    """Join-key canonicalization: exact trimmed string, ints without '.0'."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value).strip()


@dataclass(frozen=True)
class NodeRecord:
    """One origin/destination location in WGS84 degrees."""

    id: str
    lon: float
    lat: float
    attributes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise InputError("node id must be nonempty")
        if not (-180.0 <= self.lon <= 180.0):
            raise InputError(f"lon {self.lon!r} outside [-180, 180] for node {self.id!r}")
        if not (-90.0 <= self.lat <= 90.0):
            raise InputError(f"lat {self.lat!r} outside [-90, 90] for node {self.id!r}")


@dataclass(frozen=True)
class FlowRecord:
    """A directed movement quantity between two node ids.

    Raw flow data is validated nonnegative at parse time; derived flows
    (e.g. observed minus expected) may carry negative values.
    """

    origin_id: str
    dest_id: str
    value: float
    attributes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.origin_id or not self.dest_id:
            raise InputError("flow endpoints must be nonempty ids")
        if not math.isfinite(self.value):
            raise InputError(
                f"flow {self.origin_id!r}->{self.dest_id!r} value {self.value!r} must be finite"
            )

    @property
    def is_self_flow(self) -> bool:
        return self.origin_id == self.dest_id


@dataclass(frozen=True)
class PolygonRings:
    """One polygon part: exterior ring plus hole rings (no closing vertex)."""

    exterior: tuple[Point, ...]
    holes: tuple[tuple[Point, ...], ...] = ()


@dataclass(frozen=True)
class RegionFeature:
    """A polygonal region with joined attributes."""

    id: str
    polygons: tuple[PolygonRings, ...]
    attributes: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Validated, joined node/flow graph.

    ``out_strengths``/``in_strengths`` are compensated (exactly rounded)
    per-node sums over all flows including self-flows; ``total`` is the
    grand total over the same set, so the marginals and the total are
    mutually consistent.  Self-flows stay in the raw data; rendering and the
    null-model expectation sums skip them.
    """

    nodes: tuple[NodeRecord, ...]
    flows: tuple[FlowRecord, ...]
    out_strengths: Mapping[str, float]
    in_strengths: Mapping[str, float]
    total: float

    def node(self, node_id: str) -> NodeRecord:
        return self._by_id[node_id]

    @property
    def _by_id(self) -> dict[str, NodeRecord]:
        cache = getattr(self, "_by_id_cache", None)
        if cache is None:
            cache = {n.id: n for n in self.nodes}
            object.__setattr__(self, "_by_id_cache", cache)
        return cache

    def out_strength(self, node_id: str) -> float:
        return self.out_strengths[node_id]

    def in_strength(self, node_id: str) -> float:
        return self.in_strengths[node_id]

    def transit_flows(self) -> tuple[FlowRecord, ...]:
        """Flows between distinct nodes (self-flows filtered)."""
        return tuple(f for f in self.flows if not f.is_self_flow)


def _coerce_flow(row: Any, origin_field: str | None, dest_field: str | None,
                 value_field: str | None, row_no: int) -> FlowRecord:
    if isinstance(row, FlowRecord) and origin_field is None:
        return row
    source: Mapping[str, Any]
    if isinstance(row, FlowRecord):
        source = row.attributes
    elif isinstance(row, Mapping):
        source = row
    else:
        raise InputError(f"flow row {row_no} is neither a FlowRecord nor a mapping")
    for name in (origin_field, dest_field, value_field):
        if name is None:
            raise InputError("origin/dest/value field names are required for mapping rows")
        if name not in source:
            raise InputError(f"flow row {row_no} is missing field {name!r}")
    raw = source[value_field]
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise NonNumericValue(value_field, str(raw), row_no) from None
    if not math.isfinite(value) or value < 0:
        raise InputError(f"flow row {row_no}: value {raw!r} must be finite and >= 0")
    attrs = {k: v for k, v in source.items()}
    return FlowRecord(
        canonical_key(source[origin_field]),
        canonical_key(source[dest_field]),
        value,
        attrs,
    )


def build_network(nodes: Iterable[NodeRecord], flows: Iterable[Any],
                  origin_field: str | None = None, dest_field: str | None = None,
                  value_field: str | None = None) -> FlowNetwork:
    """Assemble and validate a :class:`FlowNetwork`.

    ``flows`` may be :class:`FlowRecord` objects or raw mappings; for
    mappings, the three field names select the origin/destination/value
    columns.  Flows whose endpoints are not in ``nodes`` raise
    :class:`UnknownNodeReference` listing every offending row.
    """
    node_list = tuple(nodes)
    seen: set[str] = set()
    for n in node_list:
        if n.id in seen:
            raise DuplicateNodeId(n.id)
        seen.add(n.id)

    flow_list = tuple(
        _coerce_flow(row, origin_field, dest_field, value_field, i + 1)
        for i, row in enumerate(flows)
    )

    bad = [(i + 1, f.origin_id) for i, f in enumerate(flow_list) if f.origin_id not in seen]
    bad += [(i + 1, f.dest_id) for i, f in enumerate(flow_list) if f.dest_id not in seen]
    if bad:
        raise UnknownNodeReference(sorted(bad))

    by_origin: dict[str, list[float]] = {n.id: [] for n in node_list}
    by_dest: dict[str, list[float]] = {n.id: [] for n in node_list}
    for f in flow_list:
        by_origin[f.origin_id].append(f.value)
        by_dest[f.dest_id].append(f.value)

    return FlowNetwork(
        nodes=node_list,
        flows=flow_list,
        out_strengths={k: math.fsum(v) for k, v in by_origin.items()},
        in_strengths={k: math.fsum(v) for k, v in by_dest.items()},
        total=math.fsum(f.value for f in flow_list),
    )


# --------------------------------------------------------------------------
# Layer styling
# --------------------------------------------------------------------------

RGBTuple = tuple[int, int, int]


def _rgb(value) -> RGBTuple:
    r, g, b = (int(c) for c in value)
    for c in (r, g, b):
        if not 0 <= c <= 255:
            raise InputError(f"rgb channel {c} outside [0, 255]")
    return (r, g, b)


@dataclass(frozen=True)
class ScalingSpec:
    """How magnitudes map to symbol size: linear min-max or classed."""

    mode: str = "proportional"  # proportional | classified
    method: str = "jenks"       # equal_interval | quantile | jenks | manual
    k: int = 5
    breaks: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("proportional", "classified"):
            raise InputError(f"unknown scaling mode {self.mode!r}")
        if self.mode == "classified":
            if self.method == "manual":
                if not self.breaks:
                    raise InputError("manual scaling needs breaks")
                b = tuple(float(x) for x in self.breaks)
                if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
                    raise InputError("manual breaks must be strictly increasing")
                object.__setattr__(self, "breaks", b)
                object.__setattr__(self, "k", len(b) + 1)
            elif not 2 <= self.k <= 9:
                raise InputError(f"class count {self.k} outside [2, 9]")

    def to_dict(self) -> dict:
        d: dict = {"mode": self.mode}
        if self.mode == "classified":
            d["method"] = self.method
            d["k"] = self.k
            if self.breaks is not None:
                d["breaks"] = list(self.breaks)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingSpec":
        if d.get("mode", "proportional") == "proportional":
            return cls("proportional")
        return cls(
            "classified",
            method=d.get("method", "jenks"),
            k=int(d.get("k", 5)),
            breaks=tuple(d["breaks"]) if d.get("breaks") else None,
        )


@dataclass(frozen=True)
class ColorSpec:
    """Layer coloring: one color, a two-color gradient, or a scheme."""

    mode: str = "single"  # single | continuous | classified
    rgb: RGBTuple = (0, 0, 0)
    rgb_to: RGBTuple = (0, 0, 255)
    scheme: str = "Blues"
    k: int = 5

    def __post_init__(self):
        if self.mode not in ("single", "continuous", "classified"):
            raise InputError(f"unknown color mode {self.mode!r}")
        object.__setattr__(self, "rgb", _rgb(self.rgb))
        object.__setattr__(self, "rgb_to", _rgb(self.rgb_to))

    def to_dict(self) -> dict:
        if self.mode == "single":
            return {"mode": "single", "rgb": list(self.rgb)}
        if self.mode == "continuous":
            return {"mode": "continuous", "from": list(self.rgb), "to": list(self.rgb_to)}
        return {"mode": "classified", "scheme": self.scheme, "k": self.k}

    @classmethod
    def from_dict(cls, d: dict) -> "ColorSpec":
        mode = d.get("mode", "single")
        if mode == "single":
            return cls("single", rgb=_rgb(d.get("rgb", (0, 0, 0))))
        if mode == "continuous":
            return cls("continuous", rgb=_rgb(d.get("from", (255, 255, 255))),
                       rgb_to=_rgb(d.get("to", (0, 0, 255))))
        return cls("classified", scheme=d.get("scheme", "Blues"), k=int(d.get("k", 5)))


@dataclass(frozen=True)
class StrokeSpec:
    rgb: RGBTuple = (64, 64, 64)
    width: float = 0.0

    def to_dict(self) -> dict:
        return {"rgb": list(self.rgb), "width": self.width}

    @classmethod
    def from_dict(cls, d: dict) -> "StrokeSpec":
        return cls(rgb=_rgb(d.get("rgb", (64, 64, 64))), width=float(d.get("width", 0.0)))


@dataclass(frozen=True)
class LegendSpec:
    title: str = ""
    decimals: int = 2

    def to_dict(self) -> dict:
        return {"title": self.title, "decimals": self.decimals}

    @classmethod
    def from_dict(cls, d: dict) -> "LegendSpec":
        return cls(title=str(d.get("title", "")), decimals=int(d.get("decimals", 2)))


@dataclass(frozen=True)
class LayerStyle:
    """Complete symbology for one layer.

    ``width_range`` is the flow thickness range in px for the flows layer
    and the circle radius range for the nodes layer; it is ignored for
    regions.  ``top_n`` keeps only the n largest flows.
    """

    flow_style: str = "curve_half_arrow"
    traffic_rule: str = "right"
    scaling: ScalingSpec = field(default_factory=ScalingSpec)
    width_range: tuple[float, float] = (1.0, 10.0)
    color: ColorSpec = field(default_factory=ColorSpec)
    stroke: StrokeSpec = field(default_factory=StrokeSpec)
    opacity: float = 1.0
    top_n: int | None = None
    legend: LegendSpec = field(default_factory=LegendSpec)
    visible: bool = True

    def __post_init__(self):
        from .flowpath import FLOW_STYLES

        if self.flow_style not in FLOW_STYLES:
            raise InputError(f"unknown flow style {self.flow_style!r}")
        if self.traffic_rule not in ("right", "left"):
            raise InputError(f"traffic rule must be right or left, got {self.traffic_rule!r}")
        wmin, wmax = self.width_range
        if not (wmin < wmax):
            raise InputError(f"width range {self.width_range!r} needs min < max")
        if not 0.0 <= self.opacity <= 1.0:
            raise InputError(f"opacity {self.opacity!r} outside [0, 1]")
        if self.top_n is not None and self.top_n < 1:
            raise InputError("top_n must be a positive integer")

    def to_dict(self) -> dict:
        return {
            "flow_style": self.flow_style,
            "traffic_rule": self.traffic_rule,
            "scaling": self.scaling.to_dict(),
            "width_range": list(self.width_range),
            "color": self.color.to_dict(),
            "stroke": self.stroke.to_dict(),
            "opacity": self.opacity,
            "top_n": self.top_n,
            "legend": self.legend.to_dict(),
            "visible": self.visible,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayerStyle":
        wr = d.get("width_range", [1.0, 10.0])
        return cls(
            flow_style=d.get("flow_style", "curve_half_arrow"),
            traffic_rule=d.get("traffic_rule", "right"),
            scaling=ScalingSpec.from_dict(d.get("scaling", {})),
            width_range=(float(wr[0]), float(wr[1])),
            color=ColorSpec.from_dict(d.get("color", {})),
            stroke=StrokeSpec.from_dict(d.get("stroke", {})),
            opacity=float(d.get("opacity", 1.0)),
            top_n=int(d["top_n"]) if d.get("top_n") is not None else None,
            legend=LegendSpec.from_dict(d.get("legend", {})),
            visible=bool(d.get("visible", True)),
        )


# --------------------------------------------------------------------------
# Project document
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlaceLabel:
    text: str
    lon: float
    lat: float

    def to_dict(self) -> dict:
        return {"text": self.text, "lon": self.lon, "lat": self.lat}


@dataclass(frozen=True)
class Datasets:
    """Raw dataset texts embedded in a project for exact sharing."""

    nodes_csv: str
    flows_csv: str
    regions_geojson: str | None = None
    attributes_csv: str | None = None

    def to_dict(self) -> dict:
        return {
            "nodes_csv": self.nodes_csv,
            "flows_csv": self.flows_csv,
            "regions_geojson": self.regions_geojson,
            "attributes_csv": self.attributes_csv,
        }


@dataclass(frozen=True)
class JoinSpec:
    """Field names wiring the embedded datasets together."""

    node_id_field: str
    node_x_field: str
    node_y_field: str
    flow_origin_field: str
    flow_dest_field: str
    flow_value_field: str
    node_volume_field: str | None = None
    region_id_property: str | None = None
    attribute_id_field: str | None = None
    region_value_field: str | None = None

    def to_dict(self) -> dict:
        return {
            "node_id_field": self.node_id_field,
            "node_x_field": self.node_x_field,
            "node_y_field": self.node_y_field,
            "flow_origin_field": self.flow_origin_field,
            "flow_dest_field": self.flow_dest_field,
            "flow_value_field": self.flow_value_field,
            "node_volume_field": self.node_volume_field,
            "region_id_property": self.region_id_property,
            "attribute_id_field": self.attribute_id_field,
            "region_value_field": self.region_value_field,
        }


@dataclass(frozen=True)
class MapSettings:
    projection: ProjectionSpec = field(default_factory=ProjectionSpec.mercator)
    width: float = 800.0
    height: float = 600.0
    background: RGBTuple | None = (255, 255, 255)
    background_opacity: float = 1.0
    title: str | None = None
    north_arrow: bool = False
    north_arrow_corner: str = "top-right"
    projection_label: bool = False
    labels: tuple[PlaceLabel, ...] = ()
    dim_factor: float = 0.15
    decimals: int = 3

    def to_dict(self) -> dict:
        return {
            "projection": self.projection.to_dict(),
            "width": self.width,
            "height": self.height,
            "background": list(self.background) if self.background else None,
            "background_opacity": self.background_opacity,
            "title": self.title,
            "north_arrow": self.north_arrow,
            "north_arrow_corner": self.north_arrow_corner,
            "projection_label": self.projection_label,
            "labels": [el.to_dict() for el in self.labels],
            "dim_factor": self.dim_factor,
            "decimals": self.decimals,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MapSettings":
        bg = d.get("background", [255, 255, 255])
        return cls(
            projection=ProjectionSpec.from_dict(d.get("projection", {"kind": "mercator"})),
            width=float(d.get("width", 800.0)),
            height=float(d.get("height", 600.0)),
            background=_rgb(bg) if bg is not None else None,
            background_opacity=float(d.get("background_opacity", 1.0)),
            title=d.get("title"),
            north_arrow=bool(d.get("north_arrow", False)),
            north_arrow_corner=str(d.get("north_arrow_corner", "top-right")),
            projection_label=bool(d.get("projection_label", False)),
            labels=tuple(
                PlaceLabel(str(el["text"]), float(el["lon"]), float(el["lat"]))
                for el in d.get("labels", [])
            ),
            dim_factor=float(d.get("dim_factor", 0.15)),
            decimals=int(d.get("decimals", 3)),
        )


@dataclass(frozen=True)
class ProjectFile:
    """Everything needed to reproduce a map: data, joins, styles, settings.

    Serializes to a single JSON document with a top-level ``version`` tag;
    see docs/format.md for the field reference.
    """

    datasets: Datasets
    joins: JoinSpec
    flows_style: LayerStyle
    nodes_style: LayerStyle = field(default_factory=LayerStyle)
    regions_style: LayerStyle | None = None
    map: MapSettings = field(default_factory=MapSettings)
    version: str = PROJECT_FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "datasets": self.datasets.to_dict(),
            "joins": self.joins.to_dict(),
            "layers": {
                "regions": self.regions_style.to_dict() if self.regions_style else None,
                "nodes": self.nodes_style.to_dict(),
                "flows": self.flows_style.to_dict(),
            },
            "map": self.map.to_dict(),
        }


def save_project(project: ProjectFile) -> str:
    """Serialize to canonical JSON (stable key order, 2-space indent)."""
    return json.dumps(project.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_project(text: str | bytes) -> ProjectFile:
    """Parse and validate a project JSON document."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"project file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("project file must be a JSON object")
    version = doc.get("version")
    if version != PROJECT_FORMAT_VERSION:
        raise InputError(
            f"unsupported project version {version!r} (expected {PROJECT_FORMAT_VERSION!r})"
        )
    try:
        ds = doc["datasets"]
        datasets = Datasets(
            nodes_csv=ds["nodes_csv"],
            flows_csv=ds["flows_csv"],
            regions_geojson=ds.get("regions_geojson"),
            attributes_csv=ds.get("attributes_csv"),
        )
        j = doc["joins"]
        joins = JoinSpec(
            node_id_field=j["node_id_field"],
            node_x_field=j["node_x_field"],
            node_y_field=j["node_y_field"],
            flow_origin_field=j["flow_origin_field"],
            flow_dest_field=j["flow_dest_field"],
            flow_value_field=j["flow_value_field"],
            node_volume_field=j.get("node_volume_field"),
            region_id_property=j.get("region_id_property"),
            attribute_id_field=j.get("attribute_id_field"),
            region_value_field=j.get("region_value_field"),
        )
        layers = doc["layers"]
        project = ProjectFile(
            datasets=datasets,
            joins=joins,
            flows_style=LayerStyle.from_dict(layers["flows"]),
            nodes_style=LayerStyle.from_dict(layers.get("nodes") or {}),
            regions_style=(
                LayerStyle.from_dict(layers["regions"]) if layers.get("regions") else None
            ),
            map=MapSettings.from_dict(doc.get("map", {})),
        )
    except KeyError as exc:
        raise InputError(f"project file is missing required field {exc.args[0]!r}") from None
    _validate_join_fields(project)
    return project


def _csv_header(text: str) -> list[str]:
    import csv
    import io

    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    for row in reader:
        return [c.strip() for c in row]
    return []


def _validate_join_fields(project: ProjectFile) -> None:
    """Every join field named in the file must exist in its dataset."""
    joins = project.joins
    node_header = _csv_header(project.datasets.nodes_csv)
    flow_header = _csv_header(project.datasets.flows_csv)
    checks = [
        (joins.node_id_field, node_header, "nodes_csv"),
        (joins.node_x_field, node_header, "nodes_csv"),
        (joins.node_y_field, node_header, "nodes_csv"),
        (joins.flow_origin_field, flow_header, "flows_csv"),
        (joins.flow_dest_field, flow_header, "flows_csv"),
        (joins.flow_value_field, flow_header, "flows_csv"),
    ]
    if joins.node_volume_field:
        checks.append((joins.node_volume_field, node_header, "nodes_csv"))
    if project.datasets.attributes_csv is not None and joins.attribute_id_field:
        checks.append(
            (joins.attribute_id_field, _csv_header(project.datasets.attributes_csv),
             "attributes_csv")
        )
    for name, header, where in checks:
        if name not in header:
            raise UnresolvedJoin(f"join field {name!r} not present in {where} header {header}")
