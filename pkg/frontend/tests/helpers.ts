/**
 * Test helpers: fixture loading and a recorded-response service stub.
 *
 * The stub behaves like the real service for the banana sample: a render
 * request is accepted only when the posted draft is semantically equal to
 * the canonical banana project (the engine produced both fixtures), and
 * the response bytes are real engine output.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf-8");
}

/** Drop null-valued keys: the engine's loader treats null and absent the
 * same, so semantic comparison must too. */
function normalize(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(normalize);
  if (value && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as object).sort()) {
      const v = (value as Record<string, unknown>)[key];
      if (v !== null) out[key] = normalize(v);
    }
    return out;
  }
  return value;
}

export function canonicalJson(value: unknown): string {
  return JSON.stringify(normalize(value));
}

export function firstDifference(a: unknown, b: unknown, path = "$"): string | null {
  const na = normalize(a);
  const nb = normalize(b);
  return diffWalk(na, nb, path);
}

function diffWalk(a: unknown, b: unknown, path: string): string | null {
  if (Array.isArray(a) && Array.isArray(b)) {
    if (a.length !== b.length) return `${path}: length ${a.length} vs ${b.length}`;
    for (let i = 0; i < a.length; i++) {
      const d = diffWalk(a[i], b[i], `${path}[${i}]`);
      if (d) return d;
    }
    return null;
  }
  if (a && b && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    const kb = Object.keys(b as object).sort();
    if (ka.join(",") !== kb.join(",")) {
      return `${path}: keys [${ka}] vs [${kb}]`;
    }
    for (const k of ka) {
      const d = diffWalk(
        (a as Record<string, unknown>)[k],
        (b as Record<string, unknown>)[k],
        `${path}.${k}`,
      );
      if (d) return d;
    }
    return null;
  }
  if (a !== b) return `${path}: ${JSON.stringify(a)} vs ${JSON.stringify(b)}`;
  return null;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: string | null;
}

export interface ServiceStub {
  fetch: (url: string, init?: RequestInit) => Promise<Response>;
  calls: RecordedCall[];
  renderCount: () => number;
}

export function bananaServiceStub(): ServiceStub {
  const canonical = JSON.parse(fixture("banana.project.json"));
  const plain = fixture("banana.svg");
  const selected9 = fixture("banana.selected-9.svg");
  const calls: RecordedCall[] = [];

  const stub = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : null;
    calls.push({ url, method, body });

    if (url.endsWith("/health")) {
      return new Response(JSON.stringify({ status: "ok" }), {
        status: 200,
        headers: { "content-type": "application/json" },
      });
    }
    if (url.endsWith("/render") && method === "POST") {
      const req = JSON.parse(body ?? "{}");
      if (!req.project) {
        return new Response(
          JSON.stringify({ error: "InputError", detail: "missing project" }),
          { status: 400 },
        );
      }
      const diff = firstDifference(req.project, canonical);
      if (diff) {
        return new Response(
          JSON.stringify({
            error: "DraftMismatch",
            detail: `draft differs from the canonical banana project at ${diff}`,
          }),
          { status: 400 },
        );
      }
      const selection = req.selection ?? null;
      if (selection !== null && selection !== "9") {
        return new Response(
          JSON.stringify({
            error: "UnrecordedSelection",
            detail: `no recorded response for selection ${JSON.stringify(selection)}`,
          }),
          { status: 400 },
        );
      }
      return new Response(selection === "9" ? selected9 : plain, {
        status: 200,
        headers: { "content-type": "image/svg+xml" },
      });
    }
    return new Response(JSON.stringify({ error: "NotFound", detail: url }), {
      status: 404,
    });
  };

  return {
    fetch: stub,
    calls,
    renderCount: () => calls.filter((c) => c.url.endsWith("/render")).length,
  };
}

export async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}
