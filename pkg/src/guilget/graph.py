"""GUI arrangement graphs: constraint triplets over component instances.

An arrangement graph lists the components of a screen and a set of
subject-predicate-object triplets constraining their placement. Graphs are
built from ground-truth layouts for training, or written by hand (without
boxes) to drive generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from guilget.geometry import derive_predicate
from guilget.layout import ComponentInstance, LayoutTree
from guilget.vocab import Predicate, ROOT_ID, class_by_name, predicate_by_name


@dataclass(frozen=True)
class RelationTriplet:
    subject: int
    predicate: Predicate
    obj: int


@dataclass
class GuiAG:
    """Arrangement graph: components, relation triplets, and true parents.

    `parent_of` keeps every component's parent even when its `inside`
    triplet was dropped during graph reduction; top-level components map
    to the ROOT id.
    """

    components: list[ComponentInstance]
    triplets: list[RelationTriplet]
    parent_of: dict[int, int] = field(default_factory=dict)

    def component_ids(self) -> list[int]:
        return [c.instance_id for c in self.components]

    def classes_by_id(self) -> dict[int, str]:
        return {c.instance_id: c.cls.name for c in self.components}

    def unique_class_count(self) -> int:
        return len({c.cls.id for c in self.components})

    def sibling_groups(self) -> dict[int, list[int]]:
        """parent id -> list of child ids, in component order."""
        groups: dict[int, list[int]] = {}
        for comp in self.components:
            parent = self.parent_of.get(comp.instance_id, ROOT_ID)
            groups.setdefault(parent, []).append(comp.instance_id)
        return groups

    def validate(self) -> "GuiAG":
        ids = self.component_ids()
        id_set = set(ids)
        if len(ids) != len(id_set):
            raise ValueError("duplicate instance id in graph components")
        if ROOT_ID in id_set:
            raise ValueError("instance id 0 is reserved for the screen root")
        if any(i <= 0 for i in ids):
            raise ValueError("instance ids must be positive integers")
        for t in self.triplets:
            if t.subject == t.obj:
                raise ValueError(f"self-relation on instance {t.subject}")
            for ref in (t.subject, t.obj):
                if ref not in id_set:
                    raise ValueError(f"triplet references unknown instance {ref}")
        for child, parent in self.parent_of.items():
            if child not in id_set:
                raise ValueError(f"parent entry for unknown instance {child}")
            if parent != ROOT_ID and parent not in id_set:
                raise ValueError(f"unknown parent instance {parent}")
        for child in self.parent_of:
            seen = {child}
            cur = self.parent_of[child]
            while cur != ROOT_ID:
                if cur in seen:
                    raise ValueError(f"parent cycle involving instance {cur}")
                seen.add(cur)
                cur = self.parent_of.get(cur, ROOT_ID)
        return self


def build_gui_ag(layout: LayoutTree, seed: int) -> GuiAG:
    """Reduce a ground-truth layout to an arrangement graph.

    Per sibling group: one `inside` triplet toward the parent for a
    uniformly drawn child (skipped for top-level components, which are
    implicitly inside the screen), then the group is shuffled into a
    sequence and each consecutive pair contributes one directional
    triplet derived from the ground-truth boxes. Equal (layout, seed)
    always produce the identical graph.
    """
    components = layout.components()
    if not components:
        raise ValueError("no components")
    rng = np.random.default_rng(seed)
    triplets: list[RelationTriplet] = []
    boxes = {c.instance_id: c.bbox for c in components}
    for parent, children in layout.sibling_groups():
        ids = [c.instance_id for c in children]
        if parent.instance_id != ROOT_ID:
            pick = ids[int(rng.integers(len(ids)))]
            triplets.append(RelationTriplet(pick, Predicate.INSIDE, parent.instance_id))
        order = [ids[i] for i in rng.permutation(len(ids))]
        for a, b in zip(order, order[1:]):
            predicate = derive_predicate(boxes[a], boxes[b])
            triplets.append(RelationTriplet(a, predicate, b))
    return GuiAG(components, triplets, layout.parent_map()).validate()


def parse_ag(doc: dict) -> GuiAG:
    """Parse the arrangement-graph JSON schema into a validated GuiAG.

    When `parents` is absent, parents are inferred from `inside`
    relations and default to the screen root.
    """
    try:
        raw_components = doc["components"]
        raw_relations = doc.get("relations", [])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph document: missing {exc}") from exc
    components = [
        ComponentInstance(int(c["id"]), class_by_name(str(c["class"])))
        for c in raw_components
    ]
    triplets = [
        RelationTriplet(int(r["s"]), predicate_by_name(str(r["p"])), int(r["o"]))
        for r in raw_relations
    ]
    parent_of: dict[int, int] = {c.instance_id: ROOT_ID for c in components}
    for t in triplets:
        if t.predicate is Predicate.INSIDE:
            parent_of[t.subject] = t.obj
    for child, parent in (doc.get("parents") or {}).items():
        parent_of[int(child)] = int(parent)
    return GuiAG(components, triplets, parent_of).validate()


def ag_to_json(ag: GuiAG) -> dict:
    """Emit the canonical arrangement-graph document (boxes are not part of it)."""
    return {
        "components": [
            {"id": c.instance_id, "class": c.cls.name} for c in ag.components
        ],
        "relations": [
            {"s": t.subject, "p": t.predicate.value, "o": t.obj} for t in ag.triplets
        ],
        "parents": {
            str(c.instance_id): ag.parent_of.get(c.instance_id, ROOT_ID)
            for c in ag.components
        },
    }


def strip_boxes(ag: GuiAG) -> GuiAG:
    """Copy of the graph with component boxes removed (pure constraint graph)."""
    comps = [ComponentInstance(c.instance_id, c.cls, None) for c in ag.components]
    return GuiAG(comps, list(ag.triplets), dict(ag.parent_of))


def ground_truth_boxes(ag: GuiAG) -> Optional[dict[int, object]]:
    """instance id -> BBox when the graph was built from a layout, else None."""
    if any(c.bbox is None for c in ag.components):
        return None
    return {c.instance_id: c.bbox for c in ag.components}
