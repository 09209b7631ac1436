"""odflow: turn origin-destination flow data into layered SVG flow maps."""

from .analytics import (
    ExpectedFlowMatrix,
    NodeStats,
    expected_flows,
    filter_top_n,
    great_circle_km,
    incident_flows,
    modularity_transform,
    node_stats,
)
from .classify import (
    ClassificationResult,
    ColorRamp,
    LegendAnchor,
    classify,
    interpolate_color,
    legend_values,
    proportional_width,
)
from .errors import InputError, OdflowError
from .flowpath import ArrowConstants, PathSpec, arrow_constants, flow_path
from .ingest import (
    AttributeTable,
    JoinReport,
    JoinResult,
    join_attributes,
    parse_flows_csv,
    parse_nodes_csv,
    parse_regions,
    polygons_to_points,
)
from .model import (
    Datasets,
    FlowNetwork,
    FlowRecord,
    JoinSpec,
    LayerStyle,
    MapSettings,
    NodeRecord,
    ProjectFile,
    RegionFeature,
    build_network,
    load_project,
    save_project,
)
from .projections import ALBERS_PRESETS, ProjectionSpec, project_point, unproject_point
from .scene import SceneDocument, ViewTransform, build_legend, compose, render_svg, to_svg

__version__ = "0.1.0"

__all__ = [
    "ALBERS_PRESETS",
    "ArrowConstants",
    "AttributeTable",
    "ClassificationResult",
    "ColorRamp",
    "Datasets",
    "ExpectedFlowMatrix",
    "FlowNetwork",
    "FlowRecord",
    "InputError",
    "JoinReport",
    "JoinResult",
    "JoinSpec",
    "LayerStyle",
    "LegendAnchor",
    "MapSettings",
    "NodeRecord",
    "NodeStats",
    "OdflowError",
    "PathSpec",
    "ProjectFile",
    "ProjectionSpec",
    "RegionFeature",
    "SceneDocument",
    "ViewTransform",
    "arrow_constants",
    "build_legend",
    "build_network",
    "classify",
    "compose",
    "expected_flows",
    "filter_top_n",
    "flow_path",
    "great_circle_km",
    "incident_flows",
    "interpolate_color",
    "join_attributes",
    "legend_values",
    "load_project",
    "modularity_transform",
    "node_stats",
    "parse_flows_csv",
    "parse_nodes_csv",
    "parse_regions",
    "polygons_to_points",
    "project_point",
    "proportional_width",
    "render_svg",
    "save_project",
    "to_svg",
    "unproject_point",
]
