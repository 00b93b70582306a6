/**
 * The editable graph draft and its validation.
 *
 * Validation mirrors the server-side parser rules with identical error
 * text, so anything the editor accepts the server accepts too.
 */
export const ROOT_ID = 0;
export class GraphDraft {
    constructor(classNames, predicates) {
        this.components = new Map();
        this.relations = [];
        this.dirty = false;
        this.lastResponse = null;
        this.knownClasses = new Set(classNames);
        this.knownPredicates = new Set(predicates);
    }
    nextId() {
        let id = 1;
        while (this.components.has(id))
            id += 1;
        return id;
    }
    addComponent(className) {
        if (!this.knownClasses.has(className)) {
            throw new Error(`unknown component class: '${className}'`);
        }
        const id = this.nextId();
        this.components.set(id, className);
        this.dirty = true;
        return id;
    }
    removeComponent(id) {
        this.components.delete(id);
        this.relations = this.relations.filter((r) => r.s !== id && r.o !== id);
        this.dirty = true;
    }
    addRelation(s, p, o) {
        if (s === o)
            throw new Error(`self-relation on instance ${s}`);
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
    removeRelation(index) {
        this.relations.splice(index, 1);
        this.dirty = true;
    }
    setPredicate(index, p) {
        if (!this.knownPredicates.has(p)) {
            throw new Error(`unknown predicate: '${p}'`);
        }
        this.relations[index] = { ...this.relations[index], p };
        this.dirty = true;
    }
    /** Parent of every component: object of its `inside` relation, else ROOT. */
    parentOf() {
        const parents = new Map();
        for (const id of this.components.keys())
            parents.set(id, ROOT_ID);
        for (const r of this.relations) {
            if (r.p === "inside")
                parents.set(r.s, r.o);
        }
        return parents;
    }
    /** Lossless serialization to the document the server parses. */
    toDocument() {
        const components = [...this.components.entries()]
            .sort((a, b) => a[0] - b[0])
            .map(([id, cls]) => ({ id, class: cls }));
        const relations = this.relations.map((r) => ({ ...r }));
        return { components, relations };
    }
    /** Every rule the server parser enforces, with its exact message. */
    validate() {
        const errors = [];
        const ids = new Set();
        for (const [id, cls] of this.components) {
            if (ids.has(id))
                errors.push("duplicate instance id in graph components");
            ids.add(id);
            if (id <= 0)
                errors.push("instance ids must be positive integers");
            if (!this.knownClasses.has(cls)) {
                errors.push(`unknown component class: '${cls}'`);
            }
        }
        for (const r of this.relations) {
            if (r.s === r.o)
                errors.push(`self-relation on instance ${r.s}`);
            for (const ref of [r.s, r.o]) {
                if (!ids.has(ref))
                    errors.push(`triplet references unknown instance ${ref}`);
            }
            if (!this.knownPredicates.has(r.p)) {
                errors.push(`unknown predicate: '${r.p}'`);
            }
        }
        return errors;
    }
}
