/**
 * The editable graph draft and its validation.
 *
 * Validation mirrors the server-side parser rules with identical error
 * text, so anything the editor accepts the server accepts too.
 */

import type { GraphDocument, GraphRelation } from "./types.js";

export const ROOT_ID = 0;

export interface DraftRelation {
  s: number;
  p: string;
  o: number;
}

export class GraphDraft {
  components = new Map<number, string>();
  relations: DraftRelation[] = [];
  dirty = false;
  lastResponse: unknown = null;

  private knownClasses: Set<string>;
  private knownPredicates: Set<string>;

  constructor(classNames: Iterable<string>, predicates: Iterable<string>) {
    this.knownClasses = new Set(classNames);
    this.knownPredicates = new Set(predicates);
  }

  nextId(): number {
    let id = 1;
    while (this.components.has(id)) id += 1;
    return id;
  }

  addComponent(className: string): number {
    if (!this.knownClasses.has(className)) {
      throw new Error(`unknown component class: '${className}'`);
    }
    const id = this.nextId();
    this.components.set(id, className);
    this.dirty = true;
    return id;
  }

  removeComponent(id: number): void {
    this.components.delete(id);
    this.relations = this.relations.filter((r) => r.s !== id && r.o !== id);
    this.dirty = true;
  }

  addRelation(s: number, p: string, o: number): void {
    if (s === o) throw new Error(`self-relation on instance ${s}`);
    for (const ref of [s, o]) {
      if (!this.components.has(ref)) {
        throw new Error(`triplet references unknown instance ${ref}`);
      }
    }
    if (!this.knownPredicates.has(p)) {
      throw new Error(`unknown predicate: '${p}'`);
    }
    this.relations.push({ s, p, o });
    this.dirty = true;
  }

  removeRelation(index: number): void {
    this.relations.splice(index, 1);
    this.dirty = true;
  }

  setPredicate(index: number, p: string): void {
    if (!this.knownPredicates.has(p)) {
      throw new Error(`unknown predicate: '${p}'`);
    }
    this.relations[index] = { ...this.relations[index], p };
    this.dirty = true;
  }

  /** Parent of every component: object of its `inside` relation, else ROOT. */
  parentOf(): Map<number, number> {
    const parents = new Map<number, number>();
    for (const id of this.components.keys()) parents.set(id, ROOT_ID);
    for (const r of this.relations) {
      if (r.p === "inside") parents.set(r.s, r.o);
    }
    return parents;
  }

  /** Lossless serialization to the document the server parses. */
  toDocument(): GraphDocument {
    const components = [...this.components.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([id, cls]) => ({ id, class: cls }));
    const relations: GraphRelation[] = this.relations.map((r) => ({ ...r }));
    return { components, relations };
  }

  /** Every rule the server parser enforces, with its exact message. */
  validate(): string[] {
    const errors: string[] = [];
    const ids = new Set<number>();
    for (const [id, cls] of this.components) {
      if (ids.has(id)) errors.push("duplicate instance id in graph components");
      ids.add(id);
      if (id <= 0) errors.push("instance ids must be positive integers");
      if (!this.knownClasses.has(cls)) {
        errors.push(`unknown component class: '${cls}'`);
      }
    }
    for (const r of this.relations) {
      if (r.s === r.o) errors.push(`self-relation on instance ${r.s}`);
      for (const ref of [r.s, r.o]) {
        if (!ids.has(ref)) errors.push(`triplet references unknown instance ${ref}`);
      }
      if (!this.knownPredicates.has(r.p)) {
        errors.push(`unknown predicate: '${r.p}'`);
      }
    }
    return errors;
  }
}
