/** Browser entry point: page scaffold, menus, panel and preview wiring. */

import { ServiceClient } from "./api";
import { App, downloadBlob } from "./app";
import { SettingsPanel } from "./panel";

const HELP_TEXT =
  "Upload a nodes CSV (id + X/Y in WGS84) and a flows CSV (origin id, " +
  "destination id, volume), pick the join fields, then use the apply " +
  "button on each tab. Regions are optional: a GeoJSON plus an attribute " +
  "CSV joined by a shared id drive the choropleth. Click a node in the " +
  "preview to highlight its flows; click empty space to clear. Save your " +
  "work from File > Project, and export the current preview as SVG or PNG.";

function serviceUrl(): string {
  const configured = (window as { ODFLOW_SERVICE_URL?: string }).ODFLOW_SERVICE_URL;
  return configured ?? "http://127.0.0.1:8008";
}

export function boot(root: HTMLElement): App {
  const layout = document.createElement("div");
  layout.className = "app-layout";
  const panelHost = document.createElement("div");
  panelHost.className = "panel-host";
  const previewHost = document.createElement("div");
  previewHost.className = "preview-host";
  const menuBar = document.createElement("div");
  menuBar.className = "menu-bar";
  root.appendChild(menuBar);
  layout.appendChild(panelHost);
  layout.appendChild(previewHost);
  root.appendChild(layout);

  const app = new App(new ServiceClient(serviceUrl()), previewHost);
  const panel = new SettingsPanel(panelHost, app);
  app.onStateChange = () => panel.refresh();

  const menu = (label: string, action: () => void) => {
    const btn = document.createElement("button");
    btn.textContent = label;
    btn.addEventListener("click", () => {
      try {
        action();
      } catch (err) {
        panel.showError(err instanceof Error ? err.message : String(err));
      }
    });
    menuBar.appendChild(btn);
  };

  menu("Save Project", () => {
    downloadBlob(new Blob([app.saveProjectText()], { type: "application/json" }),
                 "flowmap.project.json");
  });
  menu("Load Project", () => {
    const input = document.createElement("input");
    input.type = "file";
    input.accept = ".json";
    input.addEventListener("change", () => {
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then((text) =>
        app.loadProjectText(text).catch((err) =>
          panel.showError(err instanceof Error ? err.message : String(err))),
      );
    });
    input.click();
  });
  menu("Export SVG", () => downloadBlob(app.exportSvg(), "flowmap.svg"));
  menu("Export PNG", () => {
    void app.exportPng().then((blob) => downloadBlob(blob, "flowmap.png"))
      .catch((err) => panel.showError(err instanceof Error ? err.message : String(err)));
  });
  menu("Help", () => panel.showError(HELP_TEXT));

  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
