"""Screen corpus handling: ingestion, filtering, synthesis, and batching.

The synthetic grammar produces phone screens that satisfy the design
principles by construction (children strictly inside parents, disjoint
siblings, grid-aligned edges), so ground-truth metric identities hold
exactly and can serve as test oracles.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from guilget.geometry import BBox
from guilget.graph import build_gui_ag
from guilget.layout import (
    ComponentInstance,
    LayoutNode,
    LayoutTree,
    layout_from_json,
    layout_to_json,
    make_layout,
)
from guilget.model.batching import Batch, Sample, collate, prepare_sample
from guilget.model.config import ModelConfig
from guilget.vocab import class_by_name

SCREEN_W, SCREEN_H = 1440, 2560

CATEGORIES = (
    "books",
    "communication",
    "finance",
    "health",
    "music",
    "news",
    "shopping",
    "social",
    "travel",
    "weather",
)

_TOOLBAR_POOL = ("PICTOGRAM", "TEXT", "BUTTON", "LABEL")
_NAV_POOL = ("PICTOGRAM", "BUTTON")
_CONTENT_CONTAINERS = ("CONTAINER", "CARD_VIEW", "LIST_ITEM")
_WIDGET_POOL = (
    "IMAGE",
    "TEXT",
    "BUTTON",
    "LABEL",
    "TEXT_INPUT",
    "CHECK_BOX",
    "SWITCH",
    "SLIDER",
    "RADIO_BUTTON",
    "SPINNER",
    "PROGRESS_BAR",
    "PICTOGRAM",
    "MAP",
    "DATE_PICKER",
    "NUMBER_STEPPER",
)


@dataclass
class ScreenRecord:
    layout: LayoutTree
    category: str = "unknown"
    split: str = "train"


@dataclass
class SynthConfig:
    """Knobs of the synthetic screen grammar."""

    toolbar_prob: float = 0.75
    nav_prob: float = 0.75
    max_content_children: int = 6
    margin: int = 16
    gap: int = 16
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)


def parse_clay(path: str | Path, fallback_class: str | None = None) -> ScreenRecord:
    """Read one screen JSON file into a record (category comes from meta)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return ScreenRecord(layout=layout_from_json(doc, fallback_class=fallback_class))


def union_area(boxes: Sequence[BBox]) -> float:
    """Exact area of the union of axis-aligned boxes (vertical scanline)."""
    boxes = [b for b in boxes if b.w > 0 and b.h > 0]
    if not boxes:
        return 0.0
    xs = sorted({b.x for b in boxes} | {b.right for b in boxes})
    total = 0.0
    for x1, x2 in zip(xs, xs[1:]):
        intervals = sorted(
            (b.y, b.bottom) for b in boxes if b.x <= x1 and b.right >= x2
        )
        if not intervals:
            continue
        covered = 0.0
        cur_lo, cur_hi = intervals[0]
        for lo, hi in intervals[1:]:
            if lo > cur_hi:
                covered += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            else:
                cur_hi = max(cur_hi, hi)
        covered += cur_hi - cur_lo
        total += covered * (x2 - x1)
    return total


def coverage(layout: LayoutTree) -> float:
    """Fraction of the screen covered by the union of all components."""
    return union_area([c.bbox for c in layout.components()])


def filter_screens(records: Iterable[ScreenRecord], min_coverage: float = 0.25) -> list[ScreenRecord]:
    """Drop screens with too few distinct component types or low coverage."""
    kept = []
    for record in records:
        if record.layout.unique_class_count() <= 2:
            continue
        if coverage(record.layout) < min_coverage:
            continue
        kept.append(record)
    return kept


def _row_layout(
    rng: np.random.Generator,
    bounds: tuple[int, int, int, int],
    classes: Sequence[str],
    pad: int,
    gap: int,
    next_id: list[int],
) -> list[LayoutNode]:
    """Place one class per cell of a single row, left to right."""
    left, top, right, bottom = bounds
    n = len(classes)
    avail = right - left - 2 * pad - (n - 1) * gap
    cell_w = avail // n
    cell_h = bottom - top - 2 * pad
    nodes = []
    x = left + pad
    for name in classes:
        box = BBox(x / SCREEN_W, (top + pad) / SCREEN_H, cell_w / SCREEN_W, cell_h / SCREEN_H)
        nodes.append(LayoutNode(ComponentInstance(next_id[0], class_by_name(name), box)))
        next_id[0] += 1
        x += cell_w + gap
    return nodes


def _synth_screen(index: int, seed: int, cfg: SynthConfig) -> ScreenRecord:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    margin, gap = cfg.margin, cfg.gap
    next_id = [1]
    top_nodes: list[LayoutNode] = []

    has_toolbar = rng.random() < cfg.toolbar_prob
    has_nav = rng.random() < cfg.nav_prob

    content_top = margin
    content_bottom = SCREEN_H - margin

    if has_toolbar:
        h_tb = int(rng.integers(160, 257))
        toolbar_id = next_id[0]
        next_id[0] += 1
        k = int(rng.integers(1, 4))
        classes = [_TOOLBAR_POOL[i] for i in rng.permutation(len(_TOOLBAR_POOL))[:k]]
        children = _row_layout(rng, (0, 0, SCREEN_W, h_tb), classes, 24, gap, next_id)
        box = BBox(0.0, 0.0, 1.0, h_tb / SCREEN_H)
        top_nodes.append(
            LayoutNode(ComponentInstance(toolbar_id, class_by_name("TOOLBAR"), box), children)
        )
        content_top = h_tb + gap

    nav_node = None
    if has_nav:
        h_nb = int(rng.integers(160, 257))
        nav_id = next_id[0]
        next_id[0] += 1
        k = int(rng.integers(2, 5))
        name = _NAV_POOL[int(rng.integers(len(_NAV_POOL)))]
        children = _row_layout(
            rng, (0, SCREEN_H - h_nb, SCREEN_W, SCREEN_H), [name] * k, 24, gap, next_id
        )
        box = BBox(0.0, (SCREEN_H - h_nb) / SCREEN_H, 1.0, h_nb / SCREEN_H)
        nav_node = LayoutNode(
            ComponentInstance(nav_id, class_by_name("NAVIGATION_BAR"), box), children
        )
        content_bottom = SCREEN_H - h_nb - gap

    container_name = _CONTENT_CONTAINERS[int(rng.integers(len(_CONTENT_CONTAINERS)))]
    container_id = next_id[0]
    next_id[0] += 1
    k = int(rng.integers(1, cfg.max_content_children + 1))
    if not (has_toolbar or has_nav):
        k = max(k, 2)
    widget_classes = [_WIDGET_POOL[i] for i in rng.permutation(len(_WIDGET_POOL))[:k]]

    c_left, c_right = margin, SCREEN_W - margin
    rows: list[list[str]] = []
    remaining = list(widget_classes)
    while remaining:
        take_n = min(len(remaining), int(rng.integers(1, 4)))
        rows.append(remaining[:take_n])
        remaining = remaining[take_n:]
    pad = 24
    inner_h = content_bottom - content_top - 2 * pad - (len(rows) - 1) * gap
    row_h = inner_h // len(rows)
    children = []
    y = content_top + pad
    for row in rows:
        children.extend(
            _row_layout(rng, (c_left, y, c_right, y + row_h), row, 8, gap, next_id)
        )
        y += row_h + gap
    box = BBox(
        c_left / SCREEN_W,
        content_top / SCREEN_H,
        (c_right - c_left) / SCREEN_W,
        (content_bottom - content_top) / SCREEN_H,
    )
    content_node = LayoutNode(
        ComponentInstance(container_id, class_by_name(container_name), box), children
    )
    top_nodes.append(content_node)
    if nav_node is not None:
        top_nodes.append(nav_node)

    layout = make_layout(f"synth-{index:05d}", top_nodes)
    category = CATEGORIES[int(rng.integers(len(CATEGORIES)))]
    return ScreenRecord(layout=layout, category=category)


def synth_corpus(count: int, seed: int, grammar: SynthConfig | None = None) -> list[ScreenRecord]:
    """Procedurally generate screens; every one passes the corpus filters."""
    cfg = grammar or SynthConfig()
    records = [_synth_screen(i, seed, cfg) for i in range(count)]
    ratios = cfg.split_ratios
    rng = np.random.default_rng(np.random.SeedSequence([seed, 999]))
    order = rng.permutation(count)
    n_train = int(round(ratios[0] * count))
    n_val = int(round(ratios[1] * count))
    for rank, idx in enumerate(order):
        if rank < n_train:
            records[idx].split = "train"
        elif rank < n_train + n_val:
            records[idx].split = "val"
        else:
            records[idx].split = "test"
    return records


def save_dataset(records: Sequence[ScreenRecord], out_dir: str | Path) -> None:
    """Write screens/*.json plus meta.csv (screen_id, category, split)."""
    out = Path(out_dir)
    (out / "screens").mkdir(parents=True, exist_ok=True)
    with open(out / "meta.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["screen_id", "category", "split"])
        for record in records:
            sid = record.layout.screen_id
            writer.writerow([sid, record.category, record.split])
            doc = layout_to_json(record.layout, SCREEN_W, SCREEN_H)
            with open(out / "screens" / f"{sid}.json", "w", encoding="utf-8") as sf:
                json.dump(doc, sf, indent=2, sort_keys=True)
                sf.write("\n")


def load_dataset(data_dir: str | Path, fallback_class: str | None = None) -> list[ScreenRecord]:
    data = Path(data_dir)
    meta: dict[str, tuple[str, str]] = {}
    meta_path = data / "meta.csv"
    if meta_path.exists():
        with open(meta_path, "r", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                meta[row["screen_id"]] = (row["category"], row["split"])
    records = []
    for path in sorted((data / "screens").glob("*.json")):
        record = parse_clay(path, fallback_class=fallback_class)
        category, split = meta.get(record.layout.screen_id, ("unknown", "train"))
        record.category = category
        record.split = split
        records.append(record)
    return records


def build_samples(records: Sequence[ScreenRecord], config: ModelConfig, seed: int) -> list[Sample]:
    """One trainable sample per record, with a per-record graph seed."""
    samples = []
    for idx, record in enumerate(records):
        graph_seed = int(np.random.SeedSequence([seed, 2, idx]).generate_state(1)[0])
        graph = build_gui_ag(record.layout, graph_seed)
        boxes = {c.instance_id: c.bbox for c in graph.components}
        samples.append(prepare_sample(graph, config, boxes))
    return samples


def make_batches(samples: Sequence[Sample], batch_size: int, seed: int) -> list[Batch]:
    """Deterministically shuffle samples and collate fixed-size batches."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    order = rng.permutation(len(samples))
    batches = []
    for start in range(0, len(samples), batch_size):
        chunk = [samples[i] for i in order[start : start + batch_size]]
        batches.append(collate(chunk))
    return batches


def split_records(
    records: Sequence[ScreenRecord],
    ratios: tuple[float, float, float],
    seed: int,
) -> dict[str, list[ScreenRecord]]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 4]))
    order = rng.permutation(len(records))
    n_train = int(round(ratios[0] * len(records)))
    n_val = int(round(ratios[1] * len(records)))
    out = {"train": [], "val": [], "test": []}
    for rank, idx in enumerate(order):
        if rank < n_train:
            out["train"].append(records[idx])
        elif rank < n_train + n_val:
            out["val"].append(records[idx])
        else:
            out["test"].append(records[idx])
    return out


def split_and_batch(
    records: Sequence[ScreenRecord],
    ratios: tuple[float, float, float],
    batch_size: int,
    seed: int,
    config: ModelConfig | None = None,
) -> dict[str, list[Batch]]:
    """Shuffle, split, and collate records into per-split batch lists."""
    cfg = config or ModelConfig()
    splits = split_records(records, ratios, seed)
    return {
        name: make_batches(build_samples(members, cfg, seed), batch_size, seed)
        for name, members in splits.items()
        if members
    }
