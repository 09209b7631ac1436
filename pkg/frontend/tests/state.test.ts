import { describe, expect, it } from "vitest";

import {
  canApply,
  canRender,
  defaultState,
  parseProjectText,
  projectToState,
  stateToProject,
  uploadDataset,
  PanelState,
} from "../src/state";
import type { ProjectFile } from "../src/types";
import { canonicalJson, firstDifference, fixture } from "./helpers";

function bananaProject(): ProjectFile {
  return JSON.parse(fixture("banana.project.json"));
}

/** Rebuild the banana draft the way a user would: uploads plus form picks. */
export function buildBananaState(): PanelState {
  const canonical = bananaProject();
  const state = defaultState();
  uploadDataset(state, "nodes", "banana_nodes.csv", canonical.datasets.nodes_csv);
  uploadDataset(state, "flows", "banana_flows.csv", canonical.datasets.flows_csv);
  uploadDataset(state, "regions", "banana_regions.geojson",
                canonical.datasets.regions_geojson!);
  uploadDataset(state, "regions", "banana_attributes.csv",
                canonical.datasets.attributes_csv!, "attributes");

  state.nodes.idField = "Country_ID";
  state.nodes.xField = "X";
  state.nodes.yField = "Y";
  state.nodes.volumeField = "Total_Flow_Tons (Imports-Exports)";
  state.flows.originField = "From_Country_ID";
  state.flows.destField = "To_Country_ID";
  state.flows.valueField = "Value";
  state.regions.idProperty = "CntryCode";
  state.regions.attributeIdField = "Country_ID";
  state.regions.valueField = "Net_Flow_Ratio";

  state.flows.style = {
    flow_style: "teardrop",
    traffic_rule: "right",
    scaling: { mode: "classified", method: "jenks", k: 4 },
    width_range: [1, 12],
    color: { mode: "classified", scheme: "YlOrRd", k: 4 },
    stroke: { rgb: [90, 90, 90], width: 0.3 },
    opacity: 0.85,
    top_n: null,
    legend: { title: "Banana trade (t)", decimals: 0 },
    visible: true,
  };
  state.nodes.style = {
    flow_style: "curve_half_arrow",
    traffic_rule: "right",
    scaling: { mode: "classified", method: "jenks", k: 3 },
    width_range: [4, 10],
    color: { mode: "single", rgb: [60, 60, 60] },
    stroke: { rgb: [255, 255, 255], width: 1 },
    opacity: 0.9,
    top_n: null,
    legend: { title: "Gross volume (t)", decimals: 0 },
    visible: true,
  };
  state.regions.style = {
    flow_style: "curve_half_arrow",
    traffic_rule: "right",
    scaling: { mode: "proportional" },
    width_range: [1, 10],
    color: { mode: "classified", scheme: "PRGn", k: 5 },
    stroke: { rgb: [120, 120, 120], width: 0.5 },
    opacity: 1,
    top_n: null,
    legend: { title: "Net flow ratio", decimals: 2 },
    visible: true,
  };
  state.basemap = {
    projection: { kind: "albers", preset: "SouthAmerica" },
    width: 800,
    height: 800,
    background: [255, 255, 255],
    backgroundOpacity: 1,
    title: "Banana trade between countries in South America in 2019",
    northArrow: true,
    northArrowCorner: "top-right",
    projectionLabel: true,
    labels: [],
    dimFactor: 0.15,
    decimals: 3,
  };
  return state;
}

describe("panel state to project document", () => {
  it("a user-built banana draft equals the canonical project", () => {
    const project = stateToProject(buildBananaState());
    const diff = firstDifference(project, bananaProject());
    expect(diff).toBeNull();
  });

  it("round-trips the canonical project losslessly", () => {
    const canonical = bananaProject();
    const state = projectToState(canonical);
    expect(canonicalJson(stateToProject(state))).toBe(canonicalJson(canonical));
  });

  it("round-trips every control through state conversion twice", () => {
    const state = buildBananaState();
    // touch the remaining control branches: continuous color, manual breaks,
    // custom labels, a different projection and corner
    state.flows.style.color = { mode: "continuous", from: [255, 255, 255], to: [10, 20, 30] };
    state.flows.style.scaling = {
      mode: "classified", method: "manual", k: 3, breaks: [100, 5000],
    };
    state.flows.style.top_n = 7;
    state.basemap.projection = { kind: "robinson" };
    state.basemap.northArrowCorner = "bottom-left";
    state.basemap.labels = [{ text: "Equator", lon: -70, lat: 0 }];
    const once = stateToProject(state);
    const twice = stateToProject(projectToState(once));
    expect(canonicalJson(twice)).toBe(canonicalJson(once));
  });

  it("omits the regions layer when no region dataset is loaded", () => {
    const state = buildBananaState();
    state.regions.dataset = null;
    state.regions.attributes = null;
    const project = stateToProject(state);
    expect(project.layers.regions).toBeNull();
    expect(project.datasets.regions_geojson).toBeNull();
    expect(project.joins.region_id_property).toBeNull();
  });
});

describe("tab completeness", () => {
  it("gates apply actions on required fields", () => {
    const state = defaultState();
    expect(canApply(state, "basemap")).toBe(true);
    expect(canApply(state, "nodes")).toBe(false);
    expect(canApply(state, "flows")).toBe(false);
    expect(canRender(state)).toBe(false);

    const full = buildBananaState();
    expect(canApply(full, "regions")).toBe(true);
    expect(canApply(full, "nodes")).toBe(true);
    expect(canApply(full, "flows")).toBe(true);
    expect(canRender(full)).toBe(true);
  });

  it("flows require the nodes tab to be complete", () => {
    const state = buildBananaState();
    state.nodes.idField = "";
    expect(canApply(state, "flows")).toBe(false);
  });

  it("stateToProject refuses incomplete drafts", () => {
    expect(() => stateToProject(defaultState())).toThrowError(/incomplete/);
  });
});

describe("project text validation", () => {
  it("rejects files without the version tag", () => {
    const doc = bananaProject() as Record<string, unknown>;
    delete doc.version;
    expect(() => parseProjectText(JSON.stringify(doc))).toThrowError(/version/);
  });

  it("rejects non-JSON", () => {
    expect(() => parseProjectText("{oops")).toThrowError(/JSON/);
  });

  it("rejects wrong file types at upload", () => {
    const state = defaultState();
    expect(() => uploadDataset(state, "nodes", "x.geojson", '{"type": "FeatureCollection"}'))
      .toThrowError(/CSV/);
    expect(() => uploadDataset(state, "regions", "x.csv", "a,b\n1,2\n"))
      .toThrowError(/GeoJSON/);
  });
});
