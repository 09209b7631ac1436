/**
 * Map settings panel: four tabs (Base Map, Regions, Nodes, Flows) with
 * dataset uploads, join/field pickers, symbology and legend controls.
 * Each tab's apply button stays disabled until its required fields are
 * complete; applying re-renders through the service.
 */

import { App } from "./app";
import {
  CsvHandle,
  GeoJsonHandle,
  Tab,
  TABS,
  canApply,
  missingFields,
  uploadDataset,
} from "./state";
import type { ColorSpec, LayerStyle, ProjectionSpec, Rgb, ScalingSpec } from "./types";

export const SCHEMES = [
  "Blues", "Greens", "Greys", "Oranges", "Purples", "Reds",
  "YlOrRd", "YlGnBu", "RdBu", "PRGn", "PuOr", "Spectral",
];

const ALBERS_PRESETS = ["US", "Europe", "Africa", "SouthAmerica", "Australia", "China"];

const APPLY_LABELS: Record<Tab, string> = {
  basemap: "Apply Base Map",
  regions: "Map Regions",
  nodes: "Map Nodes",
  flows: "Map Flows",
};

function rgbToHex([r, g, b]: Rgb): string {
  const h = (c: number) => c.toString(16).padStart(2, "0");
  return `#${h(r)}${h(g)}${h(b)}`;
}

function hexToRgb(hex: string): Rgb {
  const s = hex.replace("#", "");
  return [
    parseInt(s.slice(0, 2), 16),
    parseInt(s.slice(2, 4), 16),
    parseInt(s.slice(4, 6), 16),
  ];
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function labeled(label: string, control: HTMLElement): HTMLElement {
  const row = el("label", { class: "field-row" });
  row.appendChild(el("span", {}, label));
  row.appendChild(control);
  return row;
}

export class SettingsPanel {
  private readonly sections = new Map<Tab, HTMLElement>();
  private readonly errorBox: HTMLElement;

  constructor(private readonly root: HTMLElement, private readonly app: App) {
    root.classList.add("settings-panel");
    const tabBar = el("div", { class: "tab-bar" });
    for (const tab of TABS) {
      const btn = el("button", { class: "tab-button", "data-tab": tab.id }, tab.label);
      btn.addEventListener("click", () => {
        this.app.state.activeTab = tab.id;
        this.refresh();
      });
      tabBar.appendChild(btn);
    }
    root.appendChild(tabBar);
    this.errorBox = el("div", { class: "panel-error", style: "display:none" });
    root.appendChild(this.errorBox);
    for (const tab of TABS) {
      const section = el("div", { class: "tab-section", "data-section": tab.id });
      root.appendChild(section);
      this.sections.set(tab.id, section);
    }
    this.app.onError = (msg) => this.showError(msg);
    this.refresh();
  }

  showError(message: string | null): void {
    if (message) {
      this.errorBox.textContent = message;
      this.errorBox.style.display = "block";
    } else {
      this.errorBox.style.display = "none";
    }
  }

  refresh(): void {
    for (const tab of TABS) {
      const section = this.sections.get(tab.id)!;
      section.style.display = this.app.state.activeTab === tab.id ? "block" : "none";
      section.textContent = "";
      this.buildSection(tab.id, section);
    }
    for (const btn of this.root.querySelectorAll(".tab-button")) {
      btn.classList.toggle(
        "active",
        btn.getAttribute("data-tab") === this.app.state.activeTab,
      );
    }
  }

  private applyButton(tab: Tab): HTMLElement {
    const wrap = el("div", { class: "apply-row" });
    const btn = el("button", { class: "apply-button", id: `apply-${tab}` },
                   APPLY_LABELS[tab]);
    if (!canApply(this.app.state, tab)) {
      btn.setAttribute("disabled", "disabled");
      wrap.appendChild(btn);
      wrap.appendChild(el("div", { class: "missing-note" },
                          `needs: ${missingFields(this.app.state, tab).join(", ")}`));
    } else {
      btn.addEventListener("click", () => {
        this.showError(null);
        void this.app.applyLayer(tab);
      });
      wrap.appendChild(btn);
    }
    return wrap;
  }

  private fileInput(tab: Tab, label: string, accept: string,
                    slot: "primary" | "attributes" = "primary"): HTMLElement {
    const input = el("input", {
      type: "file",
      accept,
      id: `${tab}-${slot}-file`,
    }) as HTMLInputElement;
    input.addEventListener("change", () => {
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then((text) => {
        this.uploadText(tab, file.name, text, slot);
      });
    });
    return labeled(label, input);
  }

  /** Shared by the file input and by tests: attach text as a dataset. */
  uploadText(tab: Tab, name: string, text: string,
             slot: "primary" | "attributes" = "primary"): void {
    try {
      uploadDataset(this.app.state, tab, name, text, slot);
      this.showError(null);
    } catch (err) {
      this.showError(err instanceof Error ? err.message : String(err));
    }
    this.refresh();
  }

  private picker(id: string, options: string[], value: string,
                 onChange: (v: string) => void, allowEmpty = true): HTMLSelectElement {
    const select = el("select", { id }) as HTMLSelectElement;
    if (allowEmpty) select.appendChild(el("option", { value: "" }, "(choose)"));
    for (const opt of options) {
      const o = el("option", { value: opt }, opt);
      if (opt === value) o.setAttribute("selected", "selected");
      select.appendChild(o);
    }
    select.value = value;
    select.addEventListener("change", () => {
      onChange(select.value);
      this.refresh();
    });
    return select;
  }

  private datasetSummary(handle: CsvHandle | GeoJsonHandle | null): HTMLElement {
    if (!handle) return el("div", { class: "dataset-summary empty" }, "no file loaded");
    const wrap = el("div", { class: "dataset-summary" });
    const count = "rowCount" in handle
      ? `${handle.rowCount} rows`
      : `${handle.featureCount} features`;
    wrap.appendChild(el("div", {}, `${handle.name}: ${count}`));
    if ("preview" in handle && handle.preview.length > 0) {
      const table = el("table", { class: "dataset-preview" });
      const head = el("tr");
      for (const col of handle.header) head.appendChild(el("th", {}, col));
      table.appendChild(head);
      for (const row of handle.preview.slice(0, 3)) {
        const tr = el("tr");
        for (const cell of row) tr.appendChild(el("td", {}, cell));
        table.appendChild(tr);
      }
      wrap.appendChild(table);
    }
    return wrap;
  }

  private numberInput(id: string, value: number, onChange: (v: number) => void,
                      step = "any"): HTMLInputElement {
    const input = el("input", { type: "number", id, step }) as HTMLInputElement;
    input.value = String(value);
    input.addEventListener("change", () => {
      const v = Number(input.value);
      if (Number.isFinite(v)) onChange(v);
    });
    return input;
  }

  private checkbox(id: string, value: boolean, onChange: (v: boolean) => void): HTMLInputElement {
    const input = el("input", { type: "checkbox", id }) as HTMLInputElement;
    input.checked = value;
    input.addEventListener("change", () => onChange(input.checked));
    return input;
  }

  private colorInput(id: string, value: Rgb, onChange: (v: Rgb) => void): HTMLInputElement {
    const input = el("input", { type: "color", id }) as HTMLInputElement;
    input.value = rgbToHex(value);
    input.addEventListener("change", () => onChange(hexToRgb(input.value)));
    return input;
  }

  private textInput(id: string, value: string, onChange: (v: string) => void): HTMLInputElement {
    const input = el("input", { type: "text", id }) as HTMLInputElement;
    input.value = value;
    input.addEventListener("change", () => onChange(input.value));
    return input;
  }

  // ------------------------------------------------------------------
  // Style editor shared by the three data layers
  // ------------------------------------------------------------------

  private styleEditor(prefix: string, style: LayerStyle, isFlows: boolean): HTMLElement {
    const box = el("fieldset", { class: "style-editor" });
    box.appendChild(el("legend", {}, "Symbology"));

    if (isFlows) {
      box.appendChild(labeled("Flow style", this.picker(
        `${prefix}-flow-style`,
        ["curve_half_arrow", "straight_half_arrow", "tapered", "teardrop"],
        style.flow_style,
        (v) => { style.flow_style = v as LayerStyle["flow_style"]; },
        false,
      )));
      box.appendChild(labeled("Traffic rule", this.picker(
        `${prefix}-traffic-rule`, ["right", "left"], style.traffic_rule,
        (v) => { style.traffic_rule = v as "right" | "left"; }, false,
      )));
      const topN = this.numberInput(`${prefix}-top-n`, style.top_n ?? 0, (v) => {
        style.top_n = v >= 1 ? Math.floor(v) : null;
      }, "1");
      box.appendChild(labeled("Top n flows (0 = all)", topN));
    }

    const scaling = style.scaling;
    box.appendChild(labeled("Scaling", this.picker(
      `${prefix}-scaling-mode`, ["proportional", "classified"], scaling.mode,
      (v) => {
        style.scaling = v === "proportional"
          ? { mode: "proportional" }
          : { mode: "classified", method: "jenks", k: 4, breaks: null };
      }, false,
    )));
    if (scaling.mode === "classified") {
      box.appendChild(labeled("Method", this.picker(
        `${prefix}-scaling-method`,
        ["equal_interval", "quantile", "jenks", "manual"],
        scaling.method,
        (v) => { (style.scaling as ScalingSpec & { method: string }).method = v; },
        false,
      )));
      box.appendChild(labeled("Classes", this.numberInput(
        `${prefix}-scaling-k`, scaling.k,
        (v) => { (style.scaling as ScalingSpec & { k: number }).k = Math.floor(v); },
        "1",
      )));
      if (scaling.method === "manual") {
        const breaks = this.textInput(
          `${prefix}-scaling-breaks`,
          (scaling.breaks ?? []).join(", "),
          (v) => {
            const parsed = v.split(",").map((s) => Number(s.trim()))
              .filter((n) => Number.isFinite(n));
            (style.scaling as ScalingSpec & { breaks: number[] | null }).breaks =
              parsed.length > 0 ? parsed : null;
          },
        );
        box.appendChild(labeled("Breaks (comma separated)", breaks));
      }
    }

    box.appendChild(labeled(isFlows ? "Width range (px)" : "Radius range (px)", (() => {
      const wrap = el("span", { class: "range-pair" });
      wrap.appendChild(this.numberInput(`${prefix}-width-min`, style.width_range[0],
        (v) => { style.width_range = [v, style.width_range[1]]; }));
      wrap.appendChild(this.numberInput(`${prefix}-width-max`, style.width_range[1],
        (v) => { style.width_range = [style.width_range[0], v]; }));
      return wrap;
    })()));

    const color = style.color;
    box.appendChild(labeled("Color mode", this.picker(
      `${prefix}-color-mode`, ["single", "continuous", "classified"], color.mode,
      (v) => {
        if (v === "single") style.color = { mode: "single", rgb: [0, 0, 0] };
        else if (v === "continuous") {
          style.color = { mode: "continuous", from: [255, 255, 255], to: [0, 0, 255] };
        } else style.color = { mode: "classified", scheme: "Blues", k: 4 };
      }, false,
    )));
    if (color.mode === "single") {
      box.appendChild(labeled("Color", this.colorInput(
        `${prefix}-color`, color.rgb, (v) => { (style.color as ColorSpec & { rgb: Rgb }).rgb = v; })));
    } else if (color.mode === "continuous") {
      box.appendChild(labeled("From", this.colorInput(
        `${prefix}-color-from`, color.from,
        (v) => { (style.color as ColorSpec & { from: Rgb }).from = v; })));
      box.appendChild(labeled("To", this.colorInput(
        `${prefix}-color-to`, color.to,
        (v) => { (style.color as ColorSpec & { to: Rgb }).to = v; })));
    } else {
      box.appendChild(labeled("Scheme", this.picker(
        `${prefix}-color-scheme`, SCHEMES, color.scheme,
        (v) => { (style.color as ColorSpec & { scheme: string }).scheme = v; }, false)));
      box.appendChild(labeled("Scheme classes", this.numberInput(
        `${prefix}-color-k`, color.k,
        (v) => { (style.color as ColorSpec & { k: number }).k = Math.floor(v); }, "1")));
    }

    box.appendChild(labeled("Stroke color", this.colorInput(
      `${prefix}-stroke-color`, style.stroke.rgb, (v) => { style.stroke.rgb = v; })));
    box.appendChild(labeled("Stroke width", this.numberInput(
      `${prefix}-stroke-width`, style.stroke.width, (v) => { style.stroke.width = v; })));
    box.appendChild(labeled("Fill opacity", this.numberInput(
      `${prefix}-opacity`, style.opacity, (v) => { style.opacity = Math.min(1, Math.max(0, v)); })));

    box.appendChild(labeled("Legend title", this.textInput(
      `${prefix}-legend-title`, style.legend.title, (v) => { style.legend.title = v; })));
    box.appendChild(labeled("Legend decimals", this.numberInput(
      `${prefix}-legend-decimals`, style.legend.decimals,
      (v) => { style.legend.decimals = Math.floor(v); }, "1")));
    return box;
  }

  // ------------------------------------------------------------------
  // Tab sections
  // ------------------------------------------------------------------

  private buildSection(tab: Tab, section: HTMLElement): void {
    if (tab === "basemap") this.buildBasemap(section);
    else if (tab === "regions") this.buildRegions(section);
    else if (tab === "nodes") this.buildNodes(section);
    else this.buildFlows(section);
    section.appendChild(this.applyButton(tab));
  }

  private buildBasemap(section: HTMLElement): void {
    const b = this.app.state.basemap;
    const projOptions = ["mercator", "robinson", "gall_peters",
                         ...ALBERS_PRESETS.map((p) => `albers:${p}`)];
    const current = b.projection.kind === "albers" && "preset" in b.projection
      ? `albers:${b.projection.preset}`
      : b.projection.kind;
    section.appendChild(labeled("Projection", this.picker(
      "basemap-projection", projOptions, current, (v) => {
        b.projection = v.startsWith("albers:")
          ? { kind: "albers", preset: v.split(":")[1] }
          : { kind: v as Exclude<ProjectionSpec["kind"], "albers"> };
      }, false)));
    section.appendChild(labeled("Width (px)", this.numberInput(
      "basemap-width", b.width, (v) => { b.width = v; })));
    section.appendChild(labeled("Height (px)", this.numberInput(
      "basemap-height", b.height, (v) => { b.height = v; })));
    section.appendChild(labeled("Background", this.colorInput(
      "basemap-background", b.background ?? [255, 255, 255],
      (v) => { b.background = v; })));
    section.appendChild(labeled("Background opacity", this.numberInput(
      "basemap-background-opacity", b.backgroundOpacity,
      (v) => { b.backgroundOpacity = Math.min(1, Math.max(0, v)); })));
    section.appendChild(labeled("Map title", this.textInput(
      "basemap-title", b.title, (v) => { b.title = v; })));
    section.appendChild(labeled("North arrow", this.checkbox(
      "basemap-north-arrow", b.northArrow, (v) => { b.northArrow = v; })));
    section.appendChild(labeled("North arrow corner", this.picker(
      "basemap-north-corner",
      ["top-left", "top-right", "bottom-left", "bottom-right"],
      b.northArrowCorner, (v) => { b.northArrowCorner = v; }, false)));
    section.appendChild(labeled("Projection label", this.checkbox(
      "basemap-projection-label", b.projectionLabel, (v) => { b.projectionLabel = v; })));
    section.appendChild(labeled("Dim factor", this.numberInput(
      "basemap-dim-factor", b.dimFactor, (v) => { b.dimFactor = v; })));
    section.appendChild(labeled("Coordinate decimals", this.numberInput(
      "basemap-decimals", b.decimals, (v) => { b.decimals = Math.floor(v); }, "1")));
  }

  private buildRegions(section: HTMLElement): void {
    const r = this.app.state.regions;
    section.appendChild(this.fileInput("regions", "Regions GeoJSON", ".geojson,.json"));
    section.appendChild(this.datasetSummary(r.dataset));
    section.appendChild(this.fileInput("regions", "Attribute CSV", ".csv", "attributes"));
    section.appendChild(this.datasetSummary(r.attributes));
    const props = r.dataset?.properties ?? [];
    section.appendChild(labeled("Region id property", this.picker(
      "regions-id-property", props, r.idProperty, (v) => { r.idProperty = v; })));
    const attrCols = r.attributes?.header ?? [];
    section.appendChild(labeled("Attribute join field", this.picker(
      "regions-attribute-id", attrCols, r.attributeIdField,
      (v) => { r.attributeIdField = v; })));
    section.appendChild(labeled("Display attribute", this.picker(
      "regions-value-field", [...attrCols, ...props], r.valueField,
      (v) => { r.valueField = v; })));
    section.appendChild(this.styleEditor("regions", r.style, false));
  }

  private buildNodes(section: HTMLElement): void {
    const n = this.app.state.nodes;
    section.appendChild(this.fileInput("nodes", "Nodes CSV", ".csv"));
    section.appendChild(this.datasetSummary(n.dataset));
    const cols = n.dataset?.header ?? [];
    section.appendChild(labeled("Node id field", this.picker(
      "nodes-id-field", cols, n.idField, (v) => { n.idField = v; })));
    section.appendChild(labeled("X field", this.picker(
      "nodes-x-field", cols, n.xField, (v) => { n.xField = v; })));
    section.appendChild(labeled("Y field", this.picker(
      "nodes-y-field", cols, n.yField, (v) => { n.yField = v; })));
    section.appendChild(labeled("Volume field", this.picker(
      "nodes-volume-field", cols, n.volumeField, (v) => { n.volumeField = v; })));
    section.appendChild(this.styleEditor("nodes", n.style, false));
  }

  private buildFlows(section: HTMLElement): void {
    const f = this.app.state.flows;
    section.appendChild(this.fileInput("flows", "Flows CSV", ".csv"));
    section.appendChild(this.datasetSummary(f.dataset));
    const cols = f.dataset?.header ?? [];
    section.appendChild(labeled("Origin id field", this.picker(
      "flows-origin-field", cols, f.originField, (v) => { f.originField = v; })));
    section.appendChild(labeled("Destination id field", this.picker(
      "flows-dest-field", cols, f.destField, (v) => { f.destField = v; })));
    section.appendChild(labeled("Volume field", this.picker(
      "flows-value-field", cols, f.valueField, (v) => { f.valueField = v; })));
    section.appendChild(this.styleEditor("flows", f.style, true));
  }
}
