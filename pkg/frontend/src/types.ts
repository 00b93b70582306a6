/** Wire types shared with the generation API. */

export interface ComponentClassInfo {
  id: number;
  name: string;
  container: boolean;
}

export interface VocabResponse {
  classes: ComponentClassInfo[];
  predicates: string[];
}

export interface GraphComponent {
  id: number;
  class: string;
}

export interface GraphRelation {
  s: number;
  p: string;
  o: number;
}

/** The arrangement-graph document accepted by POST /api/generate. */
export interface GraphDocument {
  components: GraphComponent[];
  relations: GraphRelation[];
  parents?: Record<string, number>;
}

export interface LayoutBox {
  id: number;
  class: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface LayoutMetrics {
  gui_agc: number;
  cpi: number;
  ccs: number;
  alignment: number;
}

export interface GeneratedLayout {
  boxes: LayoutBox[];
  metrics: LayoutMetrics;
}

export interface GenerateResponse {
  layouts: GeneratedLayout[];
}

export interface GenerateOptions {
  samples: number;
  temperature: number;
  seed?: number;
}
