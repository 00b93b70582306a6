/** Typed client for the generation API. */

import type {
  GenerateOptions,
  GenerateResponse,
  GraphDocument,
  LayoutMetrics,
  VocabResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    const body = await res.json();
    if (!res.ok) {
      const err = (body as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(err?.code ?? "unknown", err?.message ?? res.statusText, res.status);
    }
    return body as T;
  }

  vocab(): Promise<VocabResponse> {
    return this.request<VocabResponse>("/api/vocab");
  }

  generate(graph: GraphDocument, options: GenerateOptions): Promise<GenerateResponse> {
    const body: Record<string, unknown> = {
      graph,
      samples: options.samples,
      temperature: options.temperature,
    };
    if (options.seed !== undefined) body.seed = options.seed;
    return this.request<GenerateResponse>("/api/generate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  metrics(graph: GraphDocument, layout: unknown): Promise<LayoutMetrics> {
    return this.request<LayoutMetrics>("/api/metrics", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ graph, layout }),
    });
  }
}
