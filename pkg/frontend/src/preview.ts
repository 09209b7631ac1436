/**
 * Preview pane: shows the SVG the service returned, forwards node clicks
 * as selection changes, and provides zoom/pan as a pure viewport transform
 * (panning never talks to the service). Hovering flows and nodes shows a
 * tooltip read from their data attributes.
 */

export interface PreviewCallbacks {
  onSelect: (nodeId: string | null) => void;
}

export class PreviewPane {
  readonly root: HTMLElement;
  private readonly viewport: HTMLDivElement;
  private readonly tooltip: HTMLDivElement;
  private scale = 1;
  private tx = 0;
  private ty = 0;
  private dragging: { x: number; y: number } | null = null;

  constructor(container: HTMLElement, private readonly callbacks: PreviewCallbacks) {
    this.root = container;
    this.root.classList.add("preview-pane");
    this.viewport = document.createElement("div");
    this.viewport.className = "preview-viewport";
    this.tooltip = document.createElement("div");
    this.tooltip.className = "preview-tooltip";
    this.tooltip.style.display = "none";
    this.root.appendChild(this.viewport);
    this.root.appendChild(this.tooltip);
    this.bindEvents();
  }

  setSvg(svgText: string): void {
    this.viewport.innerHTML = svgText;
  }

  get svgElement(): SVGSVGElement | null {
    return this.viewport.querySelector("svg");
  }

  resetView(): void {
    this.scale = 1;
    this.tx = 0;
    this.ty = 0;
    this.applyTransform();
  }

  get transform(): { scale: number; tx: number; ty: number } {
    return { scale: this.scale, tx: this.tx, ty: this.ty };
  }

  private applyTransform(): void {
    this.viewport.style.transform =
      `translate(${this.tx}px, ${this.ty}px) scale(${this.scale})`;
    this.viewport.style.transformOrigin = "0 0";
  }

  private bindEvents(): void {
    this.root.addEventListener("click", (ev) => {
      const target = ev.target as Element | null;
      const withId = target?.closest?.("[data-id]") as Element | null;
      this.callbacks.onSelect(withId ? withId.getAttribute("data-id") : null);
    });

    this.root.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = (ev as WheelEvent).deltaY < 0 ? 1.25 : 0.8;
      this.scale = Math.min(20, Math.max(0.2, this.scale * factor));
      this.applyTransform();
    });

    this.root.addEventListener("mousedown", (ev) => {
      this.dragging = { x: (ev as MouseEvent).clientX, y: (ev as MouseEvent).clientY };
    });
    this.root.addEventListener("mousemove", (ev) => {
      const me = ev as MouseEvent;
      if (this.dragging) {
        this.tx += me.clientX - this.dragging.x;
        this.ty += me.clientY - this.dragging.y;
        this.dragging = { x: me.clientX, y: me.clientY };
        this.applyTransform();
      }
      this.updateTooltip(me);
    });
    this.root.addEventListener("mouseup", () => {
      this.dragging = null;
    });
    this.root.addEventListener("mouseleave", () => {
      this.dragging = null;
      this.tooltip.style.display = "none";
    });
  }

  private updateTooltip(ev: MouseEvent): void {
    const target = ev.target as Element | null;
    const flow = target?.closest?.("[data-origin]") as Element | null;
    const node = target?.closest?.("[data-id]") as Element | null;
    let text: string | null = null;
    if (flow) {
      text = `${flow.getAttribute("data-origin")} → ${flow.getAttribute("data-dest")}`;
    } else if (node) {
      text = node.getAttribute("data-id");
    }
    if (text) {
      this.tooltip.textContent = text;
      this.tooltip.style.display = "block";
      this.tooltip.style.left = `${ev.clientX + 12}px`;
      this.tooltip.style.top = `${ev.clientY + 12}px`;
    } else {
      this.tooltip.style.display = "none";
    }
  }
}
