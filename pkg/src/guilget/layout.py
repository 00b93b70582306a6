"""Hierarchical GUI screens and their JSON wire format.

A screen is a tree of typed components with bounding boxes. On disk the
tree uses pixel bounds `[left, top, right, bottom]`; ingestion divides by
the screen size so everything downstream works in normalized units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from guilget.geometry import SCREEN_EPS, BBox
from guilget.vocab import ROOT_CLASS, ROOT_ID, ComponentClass, class_by_name


@dataclass(frozen=True)
class ComponentInstance:
    """A concrete component on a screen; bbox is absent in pure graphs."""

    instance_id: int
    cls: ComponentClass
    bbox: Optional[BBox] = None


@dataclass
class LayoutNode:
    component: ComponentInstance
    children: list["LayoutNode"] = field(default_factory=list)


@dataclass
class LayoutTree:
    """A screen: a ROOT node spanning the unit square plus nested components."""

    screen_id: str
    root: LayoutNode

    def walk(self) -> Iterator[tuple[LayoutNode, Optional[LayoutNode]]]:
        """Yield (node, parent) pairs in depth-first preorder."""
        stack: list[tuple[LayoutNode, Optional[LayoutNode]]] = [(self.root, None)]
        while stack:
            node, parent = stack.pop()
            yield node, parent
            for child in reversed(node.children):
                stack.append((child, node))

    def components(self) -> list[ComponentInstance]:
        """All non-root components in preorder."""
        return [n.component for n, p in self.walk() if p is not None]

    def parent_map(self) -> dict[int, int]:
        """instance_id -> parent instance_id for every non-root component."""
        return {
            n.component.instance_id: p.component.instance_id
            for n, p in self.walk()
            if p is not None
        }

    def sibling_groups(self) -> list[tuple[ComponentInstance, list[ComponentInstance]]]:
        """(parent, children) for every node that has children, in preorder."""
        return [
            (n.component, [c.component for c in n.children])
            for n, _ in self.walk()
            if n.children
        ]

    def unique_class_count(self) -> int:
        return len({c.cls.id for c in self.components()})


def _validate_tree(tree: LayoutTree) -> LayoutTree:
    root = tree.root.component
    if root.instance_id != ROOT_ID or root.cls != ROOT_CLASS:
        raise ValueError("layout root must be the ROOT component with id 0")
    if root.bbox != BBox(0.0, 0.0, 1.0, 1.0):
        raise ValueError("layout root must span the full screen")
    seen: set[int] = set()
    for node, parent in tree.walk():
        iid = node.component.instance_id
        if iid in seen:
            raise ValueError(f"duplicate instance id {iid}")
        seen.add(iid)
        if parent is not None and node.component.bbox is None:
            raise ValueError(f"component {iid} has no bounding box")
    return tree


def make_layout(screen_id: str, root_children: list[LayoutNode]) -> LayoutTree:
    """Assemble a validated tree under a fresh ROOT node."""
    root = LayoutNode(ComponentInstance(ROOT_ID, ROOT_CLASS, BBox(0, 0, 1, 1)), root_children)
    return _validate_tree(LayoutTree(screen_id, root))


def layout_from_json(doc: dict, *, fallback_class: Optional[str] = None) -> LayoutTree:
    """Parse the screen JSON schema into a normalized LayoutTree.

    Unknown class names are rejected unless `fallback_class` names the
    class to substitute for them.
    """
    try:
        screen_id = str(doc["screen_id"])
        width = float(doc["width"])
        height = float(doc["height"])
        root_doc = doc["root"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed layout document: missing {exc}") from exc
    if width <= 0 or height <= 0:
        raise ValueError("screen width and height must be positive")

    def parse_bounds(raw: object) -> BBox:
        if not isinstance(raw, (list, tuple)) or len(raw) != 4:
            raise ValueError(f"bounds must be [left, top, right, bottom], got {raw!r}")
        left, top, right, bottom = (float(v) for v in raw)
        if right < left or bottom < top:
            raise ValueError(f"malformed bounds {raw!r}: negative extent")
        box = BBox(left / width, top / height, (right - left) / width, (bottom - top) / height)
        if box.right > 1.0 + SCREEN_EPS or box.bottom > 1.0 + SCREEN_EPS:
            raise ValueError(f"bounds {raw!r} extend past the screen")
        return box

    def parse_class(name: str) -> ComponentClass:
        try:
            return class_by_name(name)
        except KeyError:
            if fallback_class is None:
                raise
            return class_by_name(fallback_class)

    def parse_node(node_doc: dict) -> LayoutNode:
        cls = parse_class(str(node_doc["class"]))
        comp = ComponentInstance(int(node_doc["id"]), cls, parse_bounds(node_doc["bounds"]))
        children = [parse_node(c) for c in node_doc.get("children", [])]
        return LayoutNode(comp, children)

    root_cls = class_by_name(str(root_doc["class"]))
    if root_cls != ROOT_CLASS:
        raise ValueError(f"layout root must have class ROOT, got {root_cls.name}")
    if list(root_doc["bounds"]) != [0, 0, int(width), int(height)]:
        raise ValueError("root bounds must cover the full screen")
    root = LayoutNode(
        ComponentInstance(int(root_doc["id"]), ROOT_CLASS, BBox(0.0, 0.0, 1.0, 1.0)),
        [parse_node(c) for c in root_doc.get("children", [])],
    )
    return _validate_tree(LayoutTree(screen_id, root))


def layout_to_json(tree: LayoutTree, width: int, height: int) -> dict:
    """Emit the screen JSON schema with pixel bounds."""

    def emit(node: LayoutNode) -> dict:
        comp = node.component
        box = comp.bbox
        assert box is not None
        bounds = [
            round(box.x * width),
            round(box.y * height),
            round(box.right * width),
            round(box.bottom * height),
        ]
        out = {"class": comp.cls.name, "id": comp.instance_id, "bounds": bounds}
        out["children"] = [emit(c) for c in node.children]
        return out

    return {
        "screen_id": tree.screen_id,
        "width": width,
        "height": height,
        "root": emit(tree.root),
    }
