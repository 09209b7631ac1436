import { beforeEach, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api";
import { App } from "../src/app";
import { SettingsPanel } from "../src/panel";
import { bananaServiceStub, fixture } from "./helpers";

function makeApp(): { app: App; panel: SettingsPanel } {
  document.body.innerHTML = "";
  const panelHost = document.createElement("div");
  const previewHost = document.createElement("div");
  document.body.appendChild(panelHost);
  document.body.appendChild(previewHost);
  const stub = bananaServiceStub();
  const app = new App(new ServiceClient("http://svc", stub.fetch), previewHost);
  const panel = new SettingsPanel(panelHost, app);
  return { app, panel };
}

function options(id: string): string[] {
  const select = document.getElementById(id) as HTMLSelectElement | null;
  expect(select, id).not.toBeNull();
  return [...select!.options].map((o) => o.value).filter((v) => v !== "");
}

const NODES_CSV = () =>
  JSON.parse(fixture("banana.project.json")).datasets.nodes_csv as string;
const ATTRS_CSV = () =>
  JSON.parse(fixture("banana.project.json")).datasets.attributes_csv as string;

describe("settings panel", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("populates node field pickers from an uploaded CSV", () => {
    const { app, panel } = makeApp();
    app.state.activeTab = "nodes";
    panel.refresh();
    panel.uploadText("nodes", "banana_nodes.csv", NODES_CSV());
    const expected = ["Country", "X", "Y", "Country_ID",
                      "Total_Flow_Tons (Imports-Exports)"];
    expect(options("nodes-id-field")).toEqual(expected);
    expect(options("nodes-x-field")).toEqual(expected);
    expect(options("nodes-volume-field")).toEqual(expected);
  });

  it("rejects the wrong file type inline without touching state", () => {
    const { app, panel } = makeApp();
    app.state.activeTab = "nodes";
    panel.refresh();
    panel.uploadText("nodes", "regions.geojson", '{"type": "FeatureCollection"}');
    const error = document.querySelector(".panel-error") as HTMLElement;
    expect(error.style.display).not.toBe("none");
    expect(error.textContent).toMatch(/CSV/);
    expect(app.state.nodes.dataset).toBeNull();
  });

  it("shows parse errors with the row number", () => {
    const { panel } = makeApp();
    panel.uploadText("nodes", "bad.csv", "a,b\n1\n");
    const error = document.querySelector(".panel-error") as HTMLElement;
    expect(error.textContent).toMatch(/row 1/);
  });

  it("offers attribute join fields on the regions tab", () => {
    const { app, panel } = makeApp();
    app.state.activeTab = "regions";
    panel.refresh();
    panel.uploadText("regions", "banana_attributes.csv", ATTRS_CSV(), "attributes");
    expect(options("regions-attribute-id")).toContain("Country_ID");
    expect(options("regions-value-field")).toContain("Net_Flow_Ratio");
  });

  it("keeps apply disabled until the tab is complete", () => {
    const { app, panel } = makeApp();
    app.state.activeTab = "nodes";
    panel.refresh();
    let button = document.getElementById("apply-nodes") as HTMLButtonElement;
    expect(button.disabled).toBe(true);

    panel.uploadText("nodes", "banana_nodes.csv", NODES_CSV());
    app.state.nodes.idField = "Country_ID";
    app.state.nodes.xField = "X";
    app.state.nodes.yField = "Y";
    panel.refresh();
    button = document.getElementById("apply-nodes") as HTMLButtonElement;
    expect(button.disabled).toBe(false);
  });

  it("lists the four tabs in order", () => {
    makeApp();
    const labels = [...document.querySelectorAll(".tab-button")].map(
      (b) => b.textContent);
    expect(labels).toEqual(["Base Map", "Regions", "Nodes", "Flows"]);
  });
});
