/**
 * JSON shapes of the project document and render protocol, mirroring the
 * engine's format reference (docs/format.md, version "1").
 */

export type Rgb = [number, number, number];

export type ScalingSpec =
  | { mode: "proportional" }
  | {
      mode: "classified";
      method: "equal_interval" | "quantile" | "jenks" | "manual";
      k: number;
      breaks?: number[] | null;
    };

export type ColorSpec =
  | { mode: "single"; rgb: Rgb }
  | { mode: "continuous"; from: Rgb; to: Rgb }
  | { mode: "classified"; scheme: string; k: number };

export interface StrokeSpec {
  rgb: Rgb;
  width: number;
}

export interface LegendSpec {
  title: string;
  decimals: number;
}

export type FlowStyleKind =
  | "curve_half_arrow"
  | "straight_half_arrow"
  | "tapered"
  | "teardrop";

export interface LayerStyle {
  flow_style: FlowStyleKind;
  traffic_rule: "right" | "left";
  scaling: ScalingSpec;
  width_range: [number, number];
  color: ColorSpec;
  stroke: StrokeSpec;
  opacity: number;
  top_n: number | null;
  legend: LegendSpec;
  visible: boolean;
}

export type ProjectionSpec =
  | { kind: "mercator" | "robinson" | "gall_peters" }
  | { kind: "albers"; preset: string }
  | { kind: "albers"; phi1: number; phi2: number; phi0: number; lam0: number };

export interface PlaceLabel {
  text: string;
  lon: number;
  lat: number;
}

export interface MapSettings {
  projection: ProjectionSpec;
  width: number;
  height: number;
  background: Rgb | null;
  background_opacity: number;
  title: string | null;
  north_arrow: boolean;
  north_arrow_corner: string;
  projection_label: boolean;
  labels: PlaceLabel[];
  dim_factor: number;
  decimals: number;
}

export interface Datasets {
  nodes_csv: string;
  flows_csv: string;
  regions_geojson: string | null;
  attributes_csv: string | null;
}

export interface JoinSpec {
  node_id_field: string;
  node_x_field: string;
  node_y_field: string;
  flow_origin_field: string;
  flow_dest_field: string;
  flow_value_field: string;
  node_volume_field: string | null;
  region_id_property: string | null;
  attribute_id_field: string | null;
  region_value_field: string | null;
}

export interface ProjectFile {
  version: "1";
  datasets: Datasets;
  joins: JoinSpec;
  layers: {
    regions: LayerStyle | null;
    nodes: LayerStyle;
    flows: LayerStyle;
  };
  map: MapSettings;
}

export interface RenderRequest {
  project?: ProjectFile;
  project_id?: string;
  selection?: string | null;
  decimals?: number | null;
}
