"""Design-constraint metrics for generated layouts and grouped evaluation.

Five scores, each in [0, 1] and higher-better: child-parent inclusion
(CPI), child-child separation (CCS), component alignment, bounding-box
distribution similarity (W bbox), and the fraction of satisfied graph
relationships (GUI-AGC).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from guilget.geometry import (
    BBox,
    child_parent_loss,
    relationship_satisfied,
    sibling_overlap_loss,
)
from guilget.graph import GuiAG, build_gui_ag
from guilget.layout import LayoutTree
from guilget.vocab import ROOT_ID


@dataclass
class PlacedLayout:
    """Boxes plus parent structure: the common shape metrics operate on."""

    boxes: dict[int, BBox]
    parent_of: dict[int, int]

    @classmethod
    def from_layout(cls, tree: LayoutTree) -> "PlacedLayout":
        boxes = {c.instance_id: c.bbox for c in tree.components()}
        return cls(boxes, tree.parent_map())

    @classmethod
    def from_generated(cls, graph: GuiAG, boxes: dict[int, BBox]) -> "PlacedLayout":
        return cls(dict(boxes), dict(graph.parent_of))

    def child_parent_pairs(self) -> list[tuple[BBox, BBox]]:
        """Boxed (child, parent) pairs whose parent is a real component."""
        out = []
        for child, parent in self.parent_of.items():
            if parent != ROOT_ID and child in self.boxes and parent in self.boxes:
                out.append((self.boxes[child], self.boxes[parent]))
        return out

    def sibling_pairs(self) -> list[tuple[BBox, BBox]]:
        groups: dict[int, list[int]] = {}
        for child in sorted(self.boxes):
            groups.setdefault(self.parent_of.get(child, ROOT_ID), []).append(child)
        out = []
        for members in groups.values():
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    out.append((self.boxes[members[i]], self.boxes[members[j]]))
        return out


def cpi(layouts: Iterable[PlacedLayout]) -> float:
    """Mean contained fraction over all (child, parent) pairs; 1.0 if none."""
    losses = [
        child_parent_loss(child, parent)
        for layout in layouts
        for child, parent in layout.child_parent_pairs()
    ]
    if not losses:
        return 1.0
    return 1.0 - float(np.mean(losses))


def ccs(layouts: Iterable[PlacedLayout]) -> float:
    """Mean non-overlap over all same-parent sibling pairs; 1.0 if none."""
    losses = [
        sibling_overlap_loss(a, b)
        for layout in layouts
        for a, b in layout.sibling_pairs()
    ]
    if not losses:
        return 1.0
    return 1.0 - float(np.mean(losses))


def alignment(layouts: Iterable[PlacedLayout]) -> float:
    """Edge/center alignment score.

    Each component contributes its distance to the nearest alignment line
    (left, horizontal center, right, top, vertical center, bottom) of any
    other component in the same layout; layouts with fewer than two
    components contribute no misalignment.
    """
    total = 0.0
    n_components = 0
    for layout in layouts:
        boxes = [layout.boxes[k] for k in sorted(layout.boxes)]
        n = len(boxes)
        n_components += n
        if n < 2:
            continue
        feats = np.array(
            [
                [b.x, b.x + b.w / 2.0, b.right, b.y, b.y + b.h / 2.0, b.bottom]
                for b in boxes
            ]
        )
        dist = np.abs(feats[:, None, :] - feats[None, :, :]).min(axis=-1)
        np.fill_diagonal(dist, np.inf)
        total += float(dist.min(axis=1).sum())
    if n_components == 0:
        return 1.0
    return 1.0 - total / n_components


def wasserstein_1d(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Exact 1-D Wasserstein-1 distance between two empirical samples."""
    xs = np.sort(np.asarray(xs, dtype=np.float64))
    ys = np.sort(np.asarray(ys, dtype=np.float64))
    if xs.size == 0 or ys.size == 0:
        raise ValueError("wasserstein_1d needs non-empty samples")
    grid = np.sort(np.concatenate([xs, ys]))
    widths = np.diff(grid)
    cdf_x = np.searchsorted(xs, grid[:-1], side="right") / xs.size
    cdf_y = np.searchsorted(ys, grid[:-1], side="right") / ys.size
    return float(np.sum(np.abs(cdf_x - cdf_y) * widths))


def w_bbox(generated: Sequence[BBox], reference: Sequence[BBox]) -> float:
    """Similarity of box-property distributions: 1 - mean W1 over x, y, w, h."""
    if not generated or not reference:
        raise ValueError("w_bbox needs non-empty box sets")
    gen = np.array([[b.x, b.y, b.w, b.h] for b in generated])
    ref = np.array([[b.x, b.y, b.w, b.h] for b in reference])
    distances = [wasserstein_1d(gen[:, i], ref[:, i]) for i in range(4)]
    return 1.0 - float(np.mean(distances))


def gui_agc(pairs: Iterable[tuple[GuiAG, dict[int, BBox]]]) -> float:
    """Fraction of graph relationships realized by the boxes, per pair average."""
    scores = []
    for graph, boxes in pairs:
        if not graph.triplets:
            scores.append(1.0)
            continue
        ok = 0
        for t in graph.triplets:
            if t.subject in boxes and t.obj in boxes:
                if relationship_satisfied(boxes[t.subject], t.predicate, boxes[t.obj]):
                    ok += 1
        scores.append(ok / len(graph.triplets))
    if not scores:
        raise ValueError("gui_agc needs at least one (graph, layout) pair")
    return float(np.mean(scores))


@dataclass
class EvalReport:
    group: Optional[str]
    n_layouts: int
    cpi: float
    ccs: float
    alignment: float
    w_bbox: float
    gui_agc: float

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "n_layouts": self.n_layouts,
            "cpi": self.cpi,
            "ccs": self.ccs,
            "alignment": self.alignment,
            "w_bbox": self.w_bbox,
            "gui_agc": self.gui_agc,
        }


@dataclass
class _EvalItem:
    graph: GuiAG
    generated: dict[int, BBox]
    reference: PlacedLayout
    category: str
    complexity: int


def _report_for(group: Optional[str], items: list[_EvalItem]) -> EvalReport:
    generated_layouts = [
        PlacedLayout.from_generated(it.graph, it.generated) for it in items
    ]
    gen_boxes = [b for layout in generated_layouts for b in layout.boxes.values()]
    ref_boxes = [b for it in items for b in it.reference.boxes.values()]
    return EvalReport(
        group=group,
        n_layouts=len(items),
        cpi=cpi(generated_layouts),
        ccs=ccs(generated_layouts),
        alignment=alignment(generated_layouts),
        w_bbox=w_bbox(gen_boxes, ref_boxes),
        gui_agc=gui_agc((it.graph, it.generated) for it in items),
    )


def eval_report(
    model,
    records,
    grouping: str = "none",
    temperature: float = 0.5,
    seed: int = 0,
) -> list[EvalReport]:
    """Generate one layout per record and score it, overall and per group.

    `grouping` is one of none / category / complexity, where complexity is
    the number of unique component classes on the screen.
    """
    from guilget.model.sampling import generate_layout

    if grouping not in ("none", "category", "complexity"):
        raise ValueError(f"unknown grouping: {grouping!r}")
    items: list[_EvalItem] = []
    for idx, record in enumerate(records):
        graph_seed = int(np.random.SeedSequence([seed, idx]).generate_state(1)[0])
        graph = build_gui_ag(record.layout, graph_seed)
        boxes = generate_layout(model, graph, 1, temperature, seed=graph_seed)[0]
        items.append(
            _EvalItem(
                graph=graph,
                generated=boxes,
                reference=PlacedLayout.from_layout(record.layout),
                category=record.category,
                complexity=record.layout.unique_class_count(),
            )
        )
    reports = [_report_for(None, items)]
    if grouping != "none":
        keys = sorted(
            {it.category if grouping == "category" else str(it.complexity) for it in items}
        )
        for key in keys:
            members = [
                it
                for it in items
                if (it.category if grouping == "category" else str(it.complexity)) == key
            ]
            reports.append(_report_for(key, members))
    return reports


def report_table(reports: list[EvalReport]) -> str:
    """Plain-text table with the five metric columns."""
    header = f"{'group':<16} {'n':>5} {'CPI':>8} {'CCS':>8} {'Alignment':>10} {'W bbox':>8} {'GUI-AGC':>8}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{(r.group or 'all'):<16} {r.n_layouts:>5} {r.cpi:>8.4f} {r.ccs:>8.4f} "
            f"{r.alignment:>10.4f} {r.w_bbox:>8.4f} {r.gui_agc:>8.4f}"
        )
    return "\n".join(lines) + "\n"
