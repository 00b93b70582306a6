import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(status: number, body: unknown, calls: Array<{ url: string; init?: RequestInit }>) {
  return async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: String(status),
      json: async () => body,
    } as Response;
  };
}

describe("ApiClient", () => {
  it("sends the generate body with optional seed omitted", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const client = new ApiClient("", fakeFetch(200, { layouts: [] }, calls));
    await client.generate({ components: [], relations: [] }, { samples: 3, temperature: 0.5 });
    expect(calls[0].url).toBe("/api/generate");
    const body = JSON.parse(calls[0].init?.body as string);
    expect(body).toEqual({
      graph: { components: [], relations: [] },
      samples: 3,
      temperature: 0.5,
    });
  });

  it("includes the seed when provided", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const client = new ApiClient("", fakeFetch(200, { layouts: [] }, calls));
    await client.generate({ components: [], relations: [] }, { samples: 1, temperature: 0, seed: 7 });
    expect(JSON.parse(calls[0].init?.body as string).seed).toBe(7);
  });

  it("raises ApiError with the server error envelope", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const body = { error: { code: "invalid_graph", message: "triplet references unknown instance 9" } };
    const client = new ApiClient("", fakeFetch(400, body, calls));
    await expect(
      client.generate({ components: [], relations: [] }, { samples: 1, temperature: 0 }),
    ).rejects.toMatchObject({
      code: "invalid_graph",
      status: 400,
      message: "triplet references unknown instance 9",
    });
  });

  it("fetches the vocabulary", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const vocab = { classes: [], predicates: ["left"] };
    const client = new ApiClient("http://x", fakeFetch(200, vocab, calls));
    expect(await client.vocab()).toEqual(vocab);
    expect(calls[0].url).toBe("http://x/api/vocab");
  });
});
