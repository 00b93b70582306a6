/**
 * Generation session state: current variants, the pinned comparison card,
 * and stale-response protection.
 *
 * One request is in flight at a time; each request gets a sequence number
 * and responses that lost the race (a newer edit regenerated first) are
 * dropped instead of overwriting fresher results.
 */

import type { ApiClient } from "./api.js";
import type { GenerateOptions, GeneratedLayout, GraphDocument } from "./types.js";

export interface PinnedCard {
  layout: GeneratedLayout;
  svg: string;
}

export class GenerationSession {
  variants: GeneratedLayout[] = [];
  pinned: PinnedCard | null = null;
  busy = false;

  private sequence = 0;

  /**
   * Request layouts for the draft; resolves true when the response was
   * applied, false when it was superseded by a newer request.
   */
  async generate(
    client: Pick<ApiClient, "generate">,
    graph: GraphDocument,
    options: GenerateOptions,
  ): Promise<boolean> {
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
    } finally {
      if (token === this.sequence) {
        this.busy = false;
      }
    }
  }

  pin(index: number, svg: string): void {
    const layout = this.variants[index];
    if (layout) {
      this.pinned = { layout, svg };
    }
  }

  unpin(): void {
    this.pinned = null;
  }
}
