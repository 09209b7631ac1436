/**
 * Panel state: everything the four settings tabs edit, plus loaded
 * datasets, the current selection and the last rendered preview.
 *
 * The state always converts losslessly to a project document and back;
 * the preview on screen is whatever the service returned for the current
 * draft, never a client-side rendering.
 */

import { CsvError, parseCsv } from "./csv";
import type {
  Datasets,
  JoinSpec,
  LayerStyle,
  MapSettings,
  PlaceLabel,
  ProjectFile,
  ProjectionSpec,
} from "./types";

export type Tab = "basemap" | "regions" | "nodes" | "flows";

export const TABS: { id: Tab; label: string }[] = [
  { id: "basemap", label: "Base Map" },
  { id: "regions", label: "Regions" },
  { id: "nodes", label: "Nodes" },
  { id: "flows", label: "Flows" },
];

export interface CsvHandle {
  name: string;
  text: string;
  header: string[];
  rowCount: number;
  preview: string[][];
}

export interface GeoJsonHandle {
  name: string;
  text: string;
  properties: string[];
  featureCount: number;
}

export interface BasemapForm {
  projection: ProjectionSpec;
  width: number;
  height: number;
  background: [number, number, number] | null;
  backgroundOpacity: number;
  title: string;
  northArrow: boolean;
  northArrowCorner: string;
  projectionLabel: boolean;
  labels: PlaceLabel[];
  dimFactor: number;
  decimals: number;
}

export interface RegionsForm {
  dataset: GeoJsonHandle | null;
  attributes: CsvHandle | null;
  idProperty: string;
  attributeIdField: string;
  valueField: string;
  style: LayerStyle;
}

export interface NodesForm {
  dataset: CsvHandle | null;
  idField: string;
  xField: string;
  yField: string;
  volumeField: string;
  style: LayerStyle;
}

export interface FlowsForm {
  dataset: CsvHandle | null;
  originField: string;
  destField: string;
  valueField: string;
  style: LayerStyle;
}

export interface PanelState {
  activeTab: Tab;
  basemap: BasemapForm;
  regions: RegionsForm;
  nodes: NodesForm;
  flows: FlowsForm;
  selection: string | null;
  lastRenderSvg: string | null;
}

export function defaultFlowStyle(): LayerStyle {
  return {
    flow_style: "curve_half_arrow",
    traffic_rule: "right",
    scaling: { mode: "proportional" },
    width_range: [1, 10],
    color: { mode: "single", rgb: [0, 0, 0] },
    stroke: { rgb: [64, 64, 64], width: 0 },
    opacity: 1,
    top_n: null,
    legend: { title: "", decimals: 2 },
    visible: true,
  };
}

export function defaultNodeStyle(): LayerStyle {
  return { ...defaultFlowStyle(), width_range: [3, 9] };
}

export function defaultState(): PanelState {
  return {
    activeTab: "basemap",
    basemap: {
      projection: { kind: "mercator" },
      width: 800,
      height: 600,
      background: [255, 255, 255],
      backgroundOpacity: 1,
      title: "",
      northArrow: false,
      northArrowCorner: "top-right",
      projectionLabel: false,
      labels: [],
      dimFactor: 0.15,
      decimals: 3,
    },
    regions: {
      dataset: null,
      attributes: null,
      idProperty: "",
      attributeIdField: "",
      valueField: "",
      style: defaultFlowStyle(),
    },
    nodes: {
      dataset: null,
      idField: "",
      xField: "",
      yField: "",
      volumeField: "",
      style: defaultNodeStyle(),
    },
    flows: {
      dataset: null,
      originField: "",
      destField: "",
      valueField: "",
      style: defaultFlowStyle(),
    },
    selection: null,
    lastRenderSvg: null,
  };
}

// --------------------------------------------------------------------------
// Dataset uploads
// --------------------------------------------------------------------------

export function csvHandle(name: string, text: string): CsvHandle {
  const table = parseCsv(text);
  return {
    name,
    text,
    header: table.header,
    rowCount: table.rows.length,
    preview: table.rows.slice(0, 10),
  };
}

export function geoJsonHandle(name: string, text: string): GeoJsonHandle {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new CsvError("not valid JSON");
  }
  const fc = doc as { type?: string; features?: { properties?: object }[] };
  if (!fc || fc.type !== "FeatureCollection" || !Array.isArray(fc.features)) {
    throw new CsvError("expected a GeoJSON FeatureCollection");
  }
  const properties = new Set<string>();
  for (const feat of fc.features) {
    for (const key of Object.keys(feat.properties ?? {})) properties.add(key);
  }
  return {
    name,
    text,
    properties: [...properties],
    featureCount: fc.features.length,
  };
}

/**
 * Attach an uploaded file to a tab. CSV tabs reject GeoJSON files and vice
 * versa; the thrown error message is what the panel shows inline.
 */
export function uploadDataset(
  state: PanelState,
  tab: Tab,
  name: string,
  text: string,
  slot: "primary" | "attributes" = "primary",
): void {
  const looksLikeJson = text.trimStart().startsWith("{");
  if (tab === "regions" && slot === "primary") {
    if (!looksLikeJson) throw new CsvError("the regions layer needs a GeoJSON file");
    state.regions.dataset = geoJsonHandle(name, text);
    return;
  }
  if (looksLikeJson) {
    throw new CsvError("this tab needs a CSV file");
  }
  if (tab === "regions") {
    state.regions.attributes = csvHandle(name, text);
  } else if (tab === "nodes") {
    state.nodes.dataset = csvHandle(name, text);
  } else if (tab === "flows") {
    state.flows.dataset = csvHandle(name, text);
  } else {
    throw new CsvError("the base map tab takes no dataset");
  }
}

// --------------------------------------------------------------------------
// Completeness
// --------------------------------------------------------------------------

export function missingFields(state: PanelState, tab: Tab): string[] {
  const missing: string[] = [];
  if (tab === "basemap") return missing;
  if (tab === "regions") {
    const r = state.regions;
    if (!r.dataset) missing.push("regions GeoJSON");
    if (!r.idProperty) missing.push("region id property");
    if (r.attributes && !r.attributeIdField) missing.push("attribute join field");
    if (r.attributes && !r.valueField) missing.push("display attribute");
    return missing;
  }
  if (tab === "nodes") {
    const n = state.nodes;
    if (!n.dataset) missing.push("nodes CSV");
    if (!n.idField) missing.push("node id field");
    if (!n.xField) missing.push("X field");
    if (!n.yField) missing.push("Y field");
    return missing;
  }
  const f = state.flows;
  if (!f.dataset) missing.push("flows CSV");
  if (!f.originField) missing.push("origin id field");
  if (!f.destField) missing.push("destination id field");
  if (!f.valueField) missing.push("volume field");
  if (missingFields(state, "nodes").length > 0) missing.push("a complete Nodes tab");
  return missing;
}

export function canApply(state: PanelState, tab: Tab): boolean {
  return missingFields(state, tab).length === 0;
}

export function canRender(state: PanelState): boolean {
  return canApply(state, "nodes") && canApply(state, "flows");
}

// --------------------------------------------------------------------------
// Panel state <-> project document (lossless)
// --------------------------------------------------------------------------

export function stateToProject(state: PanelState): ProjectFile {
  if (!canRender(state)) {
    throw new Error(
      `project incomplete: ${[...missingFields(state, "nodes"), ...missingFields(state, "flows")].join(", ")}`,
    );
  }
  const withRegions = state.regions.dataset !== null;
  const datasets: Datasets = {
    nodes_csv: state.nodes.dataset!.text,
    flows_csv: state.flows.dataset!.text,
    regions_geojson: withRegions ? state.regions.dataset!.text : null,
    attributes_csv: state.regions.attributes?.text ?? null,
  };
  const joins: JoinSpec = {
    node_id_field: state.nodes.idField,
    node_x_field: state.nodes.xField,
    node_y_field: state.nodes.yField,
    flow_origin_field: state.flows.originField,
    flow_dest_field: state.flows.destField,
    flow_value_field: state.flows.valueField,
    node_volume_field: state.nodes.volumeField || null,
    region_id_property: withRegions ? state.regions.idProperty || null : null,
    attribute_id_field: state.regions.attributes
      ? state.regions.attributeIdField || null
      : null,
    region_value_field: withRegions ? state.regions.valueField || null : null,
  };
  const b = state.basemap;
  const map: MapSettings = {
    projection: b.projection,
    width: b.width,
    height: b.height,
    background: b.background,
    background_opacity: b.backgroundOpacity,
    title: b.title || null,
    north_arrow: b.northArrow,
    north_arrow_corner: b.northArrowCorner,
    projection_label: b.projectionLabel,
    labels: b.labels,
    dim_factor: b.dimFactor,
    decimals: b.decimals,
  };
  return {
    version: "1",
    datasets,
    joins,
    layers: {
      regions: withRegions ? state.regions.style : null,
      nodes: state.nodes.style,
      flows: state.flows.style,
    },
    map,
  };
}

export function projectToState(project: ProjectFile): PanelState {
  if (project.version !== "1") {
    throw new Error(`unsupported project version ${JSON.stringify(project.version)}`);
  }
  const state = defaultState();
  state.nodes.dataset = csvHandle("nodes.csv", project.datasets.nodes_csv);
  state.flows.dataset = csvHandle("flows.csv", project.datasets.flows_csv);
  if (project.datasets.regions_geojson) {
    state.regions.dataset = geoJsonHandle("regions.geojson", project.datasets.regions_geojson);
  }
  if (project.datasets.attributes_csv) {
    state.regions.attributes = csvHandle("attributes.csv", project.datasets.attributes_csv);
  }
  const j = project.joins;
  state.nodes.idField = j.node_id_field;
  state.nodes.xField = j.node_x_field;
  state.nodes.yField = j.node_y_field;
  state.nodes.volumeField = j.node_volume_field ?? "";
  state.flows.originField = j.flow_origin_field;
  state.flows.destField = j.flow_dest_field;
  state.flows.valueField = j.flow_value_field;
  state.regions.idProperty = j.region_id_property ?? "";
  state.regions.attributeIdField = j.attribute_id_field ?? "";
  state.regions.valueField = j.region_value_field ?? "";
  if (project.layers.regions) state.regions.style = project.layers.regions;
  state.nodes.style = project.layers.nodes;
  state.flows.style = project.layers.flows;
  const m = project.map;
  state.basemap = {
    projection: m.projection,
    width: m.width,
    height: m.height,
    background: m.background,
    backgroundOpacity: m.background_opacity,
    title: m.title ?? "",
    northArrow: m.north_arrow,
    northArrowCorner: m.north_arrow_corner,
    projectionLabel: m.projection_label,
    labels: m.labels,
    dimFactor: m.dim_factor,
    decimals: m.decimals,
  };
  return state;
}

export function parseProjectText(text: string): ProjectFile {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new Error("project file is not valid JSON");
  }
  const project = doc as ProjectFile;
  if (!project || typeof project !== "object" || project.version !== "1") {
    throw new Error("project file is missing the version \"1\" tag");
  }
  if (!project.datasets || !project.joins || !project.layers || !project.map) {
    throw new Error("project file is missing required sections");
  }
  return project;
}
