/**
 * Generation session state: current variants, the pinned comparison card,
 * and stale-response protection.
 *
 * One request is in flight at a time; each request gets a sequence number
 * and responses that lost the race (a newer edit regenerated first) are
 * dropped instead of overwriting fresher results.
 */
export class GenerationSession {
    constructor() {
        this.variants = [];
        this.pinned = null;
        this.busy = false;
        this.sequence = 0;
    }
    /**
     * Request layouts for the draft; resolves true when the response was
     * applied, false when it was superseded by a newer request.
     */
    async generate(client, graph, options) {
        this.sequence += 1;
        const token = this.sequence;
        this.busy = true;
        try {
            const response = await client.generate(graph, options);
            if (token !== this.sequence) {
                return false; // a newer edit already regenerated
            }
            this.variants = response.layouts;
            return true;
        }
        finally {
            if (token === this.sequence) {
                this.busy = false;
            }
        }
    }
    pin(index, svg) {
        const layout = this.variants[index];
        if (layout) {
            this.pinned = { layout, svg };
        }
    }
    unpin() {
        this.pinned = null;
    }
}
