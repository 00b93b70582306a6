import { describe, expect, it } from "vitest";

import { GraphDraft } from "../src/graph.js";

const CLASSES = ["CONTAINER", "BUTTON", "TEXT", "IMAGE", "TOOLBAR"];
const PREDICATES = ["left", "right", "above", "below", "inside"];

function draft(): GraphDraft {
  return new GraphDraft(CLASSES, PREDICATES);
}

describe("GraphDraft", () => {
  it("assigns increasing positive ids", () => {
    const d = draft();
    expect(d.addComponent("CONTAINER")).toBe(1);
    expect(d.addComponent("BUTTON")).toBe(2);
    d.removeComponent(1);
    expect(d.addComponent("TEXT")).toBe(1);
  });

  it("rejects unknown classes with the server's message", () => {
    expect(() => draft().addComponent("HOLOGRAM")).toThrowError(
      "unknown component class: 'HOLOGRAM'",
    );
  });

  it("rejects self edges with the server's message", () => {
    const d = draft();
    const id = d.addComponent("BUTTON");
    expect(() => d.addRelation(id, "left", id)).toThrowError(
      `self-relation on instance ${id}`,
    );
  });

  it("rejects dangling endpoints with the server's message", () => {
    const d = draft();
    const id = d.addComponent("BUTTON");
    expect(() => d.addRelation(id, "left", 9)).toThrowError(
      "triplet references unknown instance 9",
    );
  });

  it("rejects unknown predicates with the server's message", () => {
    const d = draft();
    const a = d.addComponent("BUTTON");
    const b = d.addComponent("TEXT");
    expect(() => d.addRelation(a, "behind", b)).toThrowError(
      "unknown predicate: 'behind'",
    );
  });

  it("removing a component drops its relations", () => {
    const d = draft();
    const a = d.addComponent("BUTTON");
    const b = d.addComponent("TEXT");
    const c = d.addComponent("IMAGE");
    d.addRelation(a, "left", b);
    d.addRelation(b, "above", c);
    d.removeComponent(b);
    expect(d.relations).toHaveLength(0);
    expect([...d.components.keys()]).toEqual([a, c]);
  });

  it("serializes losslessly to the schema documents", () => {
    const d = draft();
    const container = d.addComponent("CONTAINER");
    const button = d.addComponent("BUTTON");
    d.addRelation(button, "inside", container);
    expect(d.toDocument()).toEqual({
      components: [
        { id: 1, class: "CONTAINER" },
        { id: 2, class: "BUTTON" },
      ],
      relations: [{ s: 2, p: "inside", o: 1 }],
    });
  });

  it("derives parents from inside relations", () => {
    const d = draft();
    const container = d.addComponent("CONTAINER");
    const button = d.addComponent("BUTTON");
    const text = d.addComponent("TEXT");
    d.addRelation(button, "inside", container);
    const parents = d.parentOf();
    expect(parents.get(button)).toBe(container);
    expect(parents.get(text)).toBe(0);
  });

  it("validate reports every rule violation", () => {
    const d = draft();
    const a = d.addComponent("BUTTON");
    const b = d.addComponent("TEXT");
    d.relations.push({ s: a, p: "behind", o: b }); // bypass addRelation guard
    d.relations.push({ s: a, p: "left", o: 42 });
    const errors = d.validate();
    expect(errors).toContain("unknown predicate: 'behind'");
    expect(errors).toContain("triplet references unknown instance 42");
  });

  it("marks the draft dirty on every edit", () => {
    const d = draft();
    expect(d.dirty).toBe(false);
    const a = d.addComponent("BUTTON");
    expect(d.dirty).toBe(true);
    d.dirty = false;
    const b = d.addComponent("TEXT");
    d.dirty = false;
    d.addRelation(a, "left", b);
    expect(d.dirty).toBe(true);
  });
});
