/** HTTP client for the design service, with latest-wins render sequencing. */

import type { RenderRequest } from "./types";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly kind: string | null = null,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let detail = `${res.status}`;
  let kind: string | null = null;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
    if (body && typeof body.error === "string") kind = body.error;
  } catch {
    /* non-JSON error body */
  }
  throw new ServiceError(detail, res.status, kind);
}

export class ServiceClient {
  private renderSeq = 0;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async health(): Promise<boolean> {
    const res = await this.fetchImpl(`${this.baseUrl}/health`);
    return res.ok;
  }

  /**
   * Render a project. Only one render counts at a time: when a newer
   * request was issued while this one was in flight, the stale response
   * resolves to null and must be dropped by the caller.
   */
  async render(request: RenderRequest): Promise<string | null> {
    const seq = ++this.renderSeq;
    const res = await this.fetchImpl(`${this.baseUrl}/render`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (seq !== this.renderSeq) return null;
    await raiseForStatus(res);
    const text = await res.text();
    return seq === this.renderSeq ? text : null;
  }

  async storeProject(projectJson: string): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/projects`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: projectJson,
    });
    await raiseForStatus(res);
    const body = await res.json();
    return body.id as string;
  }

  async getProject(id: string): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/projects/${id}`);
    await raiseForStatus(res);
    return res.text();
  }

  async poly2points(geojson: string, idProperty: string | null): Promise<string> {
    const query = idProperty ? `?id_property=${encodeURIComponent(idProperty)}` : "";
    const res = await this.fetchImpl(`${this.baseUrl}/tools/poly2points${query}`, {
      method: "POST",
      headers: { "content-type": "application/geo+json" },
      body: geojson,
    });
    await raiseForStatus(res);
    return res.text();
  }

  async normalize(body: Record<string, unknown>): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/tools/normalize`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(res);
    return res.text();
  }
}
