import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api";
import { bananaServiceStub, fixture } from "./helpers";

describe("ServiceClient", () => {
  it("returns render bodies from the service", async () => {
    const stub = bananaServiceStub();
    const client = new ServiceClient("http://svc", stub.fetch);
    const project = JSON.parse(fixture("banana.project.json"));
    const svg = await client.render({ project, selection: null });
    expect(svg).toBe(fixture("banana.svg"));
  });

  it("drops superseded renders (latest wins)", async () => {
    const resolvers: ((res: Response) => void)[] = [];
    const client = new ServiceClient("http://svc", () =>
      new Promise<Response>((resolve) => resolvers.push(resolve)));

    const first = client.render({ project_id: "a" });
    const second = client.render({ project_id: "b" });
    expect(resolvers).toHaveLength(2);
    // the older response arrives after the newer request started
    resolvers[1](new Response("SECOND", { status: 200 }));
    resolvers[0](new Response("FIRST", { status: 200 }));
    expect(await first).toBeNull();
    expect(await second).toBe("SECOND");
  });

  it("surfaces structured error details", async () => {
    const stub = bananaServiceStub();
    const client = new ServiceClient("http://svc", stub.fetch);
    const project = JSON.parse(fixture("banana.project.json"));
    project.map.width = 9999; // no recorded response for this draft
    let caught: unknown = null;
    try {
      await client.render({ project });
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(ServiceError);
    expect((caught as ServiceError).status).toBe(400);
    expect((caught as ServiceError).message).toMatch(/map\.width/);
  });

  it("reports health", async () => {
    const stub = bananaServiceStub();
    const client = new ServiceClient("http://svc", stub.fetch);
    expect(await client.health()).toBe(true);
  });
});
