/** Typed client for the generation API. */
export class ApiError extends Error {
    constructor(code, message, status) {
        super(message);
        this.code = code;
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (input, init) => globalThis.fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const res = await this.fetchFn(this.baseUrl + path, init);
        const body = await res.json();
        if (!res.ok) {
            const err = body.error;
            throw new ApiError(err?.code ?? "unknown", err?.message ?? res.statusText, res.status);
        }
        return body;
    }
    vocab() {
        return this.request("/api/vocab");
    }
    generate(graph, options) {
        const body = {
            graph,
            samples: options.samples,
            temperature: options.temperature,
        };
        if (options.seed !== undefined)
            body.seed = options.seed;
        return this.request("/api/generate", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    metrics(graph, layout) {
        return this.request("/api/metrics", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ graph, layout }),
        });
    }
}
