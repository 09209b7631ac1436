/**
 * Application orchestration: one state object, one service client, one
 * preview pane. Every preview comes from the service render of the
 * current draft; a newer request supersedes a pending one.
 */

import { ServiceClient } from "./api";
import { PreviewPane } from "./preview";
import {
  PanelState,
  Tab,
  canRender,
  defaultState,
  parseProjectText,
  projectToState,
  stateToProject,
} from "./state";

export class App {
  state: PanelState;
  readonly preview: PreviewPane;
  onError: (message: string) => void = () => undefined;
  onStateChange: () => void = () => undefined;
  /** Settles when the most recently started operation finishes. */
  lastOperation: Promise<void> = Promise.resolve();

  constructor(
    readonly client: ServiceClient,
    previewContainer: HTMLElement,
    state?: PanelState,
  ) {
    this.state = state ?? defaultState();
    this.preview = new PreviewPane(previewContainer, {
      onSelect: (id) => {
        this.lastOperation = this.selectNode(id);
      },
    });
  }

  /** Push the current draft through the service and swap the preview. */
  async applyLayer(_tab: Tab): Promise<void> {
    if (!canRender(this.state)) return;
    let svg: string | null;
    try {
      svg = await this.client.render({
        project: stateToProject(this.state),
        selection: this.state.selection,
      });
    } catch (err) {
      this.onError(err instanceof Error ? err.message : String(err));
      return;
    }
    if (svg === null) return; // superseded by a newer request
    this.state.lastRenderSvg = svg;
    this.preview.setSvg(svg);
    this.onStateChange();
  }

  async selectNode(nodeId: string | null): Promise<void> {
    if (this.state.selection === nodeId) return;
    this.state.selection = nodeId;
    await this.applyLayer(this.state.activeTab);
  }

  saveProjectText(): string {
    return JSON.stringify(stateToProject(this.state), null, 2);
  }

  /** Replace the whole panel state from a project file and re-render. */
  async loadProjectText(text: string): Promise<void> {
    const project = parseProjectText(text); // throws before touching state
    this.state = projectToState(project);
    this.onStateChange();
    await this.applyLayer(this.state.activeTab);
  }

  exportSvg(): Blob {
    if (!this.state.lastRenderSvg) {
      throw new Error("nothing rendered yet");
    }
    return new Blob([this.state.lastRenderSvg], { type: "image/svg+xml" });
  }

  /** Rasterize the last render at double resolution via a canvas. */
  async exportPng(scale = 2): Promise<Blob> {
    const svgText = this.state.lastRenderSvg;
    if (!svgText) throw new Error("nothing rendered yet");
    const svg = this.preview.svgElement;
    const width = Number(svg?.getAttribute("width") ?? 800);
    const height = Number(svg?.getAttribute("height") ?? 600);
    const canvas = document.createElement("canvas");
    canvas.width = width * scale;
    canvas.height = height * scale;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    const url = URL.createObjectURL(new Blob([svgText], { type: "image/svg+xml" }));
    try {
      const image = await new Promise<HTMLImageElement>((resolve, reject) => {
        const img = new Image();
        img.onload = () => resolve(img);
        img.onerror = () => reject(new Error("could not decode the SVG"));
        img.src = url;
      });
      ctx.scale(scale, scale);
      ctx.drawImage(image, 0, 0);
    } finally {
      URL.revokeObjectURL(url);
    }
    return new Promise((resolve, reject) => {
      canvas.toBlob((blob) => {
        if (blob) resolve(blob);
        else reject(new Error("PNG encoding failed"));
      }, "image/png");
    });
  }
}

export function downloadBlob(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  document.body.appendChild(a);
  a.click();
  a.remove();
  URL.revokeObjectURL(url);
}
