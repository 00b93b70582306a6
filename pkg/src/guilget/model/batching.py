"""Collation of screens into padded training batches.

Box targets live in a standardized coordinate space: screen coordinates
are shifted/scaled from [0, 1] to [-1, 1] so the mixture prior N(0, I) is
reasonable. Predicate steps carry the (scaled) top-left disparity between
their object and subject instead of a real box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from guilget.geometry import BBox
from guilget.graph import GuiAG
from guilget.layout import LayoutTree
from guilget.model.config import ModelConfig
from guilget.nn.layers import padding_bias
from guilget.tokens import (
    TYPE_OBJECT,
    TYPE_PREDICATE,
    TYPE_SUBJECT,
    TokenSequence,
    serialize_ag,
)


def standardize(values: np.ndarray) -> np.ndarray:
    """Map screen coordinates [0, 1] -> [-1, 1]."""
    return (values - 0.5) * 2.0


def destandardize(values: np.ndarray) -> np.ndarray:
    return values / 2.0 + 0.5


@dataclass
class Sample:
    """One screen prepared for training: tokens plus target geometry."""

    tokens: TokenSequence
    target_std: np.ndarray  # (T, 4)
    pos_mask: np.ndarray  # (T,) 1.0 at subject/predicate/object steps
    size_mask: np.ndarray  # (T,) 1.0 at subject/object steps
    graph: GuiAG


@dataclass
class Batch:
    word: np.ndarray
    object_ids: np.ndarray
    relation: np.ndarray
    type_ids: np.ndarray
    parent: np.ndarray
    real: np.ndarray  # (B, T) bool, False at padding
    attn_bias: np.ndarray  # (B, 1, 1, T)
    target_std: np.ndarray  # (B, T, 4)
    prev_std: np.ndarray  # (B, T, 4) teacher-forcing input
    pos_mask: np.ndarray  # (B, T) float
    size_mask: np.ndarray  # (B, T) float
    maskable: np.ndarray  # (B, T) bool
    spans: np.ndarray  # (N_triplets, 4): batch row, subject, predicate, object
    occ_rows: np.ndarray  # (N_occ,) flat B*T index of a component occurrence
    occ_comp: np.ndarray  # (N_occ,) component table index
    comp_counts: np.ndarray  # (N_comp,) occurrences per component
    sibling_pairs: np.ndarray  # (N_cc, 2) component table indices
    child_parent_pairs: np.ndarray  # (N_cp, 2) (child, parent) table indices

    @property
    def size(self) -> int:
        return int(self.word.shape[0])

    @property
    def seq_len(self) -> int:
        return int(self.word.shape[1])

    @property
    def n_components(self) -> int:
        return int(self.comp_counts.shape[0])


def prepare_sample(layout_graph: GuiAG, config: ModelConfig, boxes: dict[int, BBox]) -> Sample:
    """Serialize a graph and attach standardized box targets per token step."""
    tokens = serialize_ag(layout_graph, config.max_seq_len, config.object_vocab)
    t_len = len(tokens)
    target = np.zeros((t_len, 4))
    pos_mask = np.zeros(t_len)
    size_mask = np.zeros(t_len)
    for s_idx, p_idx, o_idx in tokens.spans():
        sub = boxes[int(tokens.step_instance[s_idx])]
        obj = boxes[int(tokens.step_instance[o_idx])]
        for idx, box in ((s_idx, sub), (o_idx, obj)):
            target[idx] = standardize(np.array([box.x, box.y, box.w, box.h]))
            pos_mask[idx] = 1.0
            size_mask[idx] = 1.0
        # Disparity targets double like standardized coordinates do.
        target[p_idx, 0] = 2.0 * (obj.x - sub.x)
        target[p_idx, 1] = 2.0 * (obj.y - sub.y)
        pos_mask[p_idx] = 1.0
    return Sample(tokens, target, pos_mask, size_mask, layout_graph)


def sample_from_layout(layout: LayoutTree, config: ModelConfig, graph_seed: int) -> Sample:
    from guilget.graph import build_gui_ag

    graph = build_gui_ag(layout, graph_seed)
    boxes = {c.instance_id: c.bbox for c in graph.components}
    return prepare_sample(graph, config, boxes)


def collate(samples: list[Sample]) -> Batch:
    """Pad samples to a common length and precompute loss index tables."""
    b = len(samples)
    t_max = max(len(s.tokens) for s in samples)

    word = np.zeros((b, t_max), dtype=np.int64)
    obj = np.zeros((b, t_max), dtype=np.int64)
    rel = np.zeros((b, t_max), dtype=np.int64)
    typ = np.zeros((b, t_max), dtype=np.int64)
    par = np.zeros((b, t_max), dtype=np.int64)
    real = np.zeros((b, t_max), dtype=bool)
    target = np.zeros((b, t_max, 4))
    pos_mask = np.zeros((b, t_max))
    size_mask = np.zeros((b, t_max))

    spans: list[tuple[int, int, int, int]] = []
    occ_rows: list[int] = []
    occ_comp: list[int] = []
    comp_counts: list[int] = []
    comp_index: dict[tuple[int, int], int] = {}
    sibling_pairs: list[tuple[int, int]] = []
    cp_pairs: list[tuple[int, int]] = []

    for i, s in enumerate(samples):
        t_len = len(s.tokens)
        word[i, :t_len] = s.tokens.word_ids
        obj[i, :t_len] = s.tokens.object_ids
        rel[i, :t_len] = s.tokens.relationship_ids
        typ[i, :t_len] = s.tokens.type_ids
        par[i, :t_len] = s.tokens.parent_ids
        real[i, :t_len] = True
        target[i, :t_len] = s.target_std
        pos_mask[i, :t_len] = s.pos_mask
        size_mask[i, :t_len] = s.size_mask

        for s_idx, p_idx, o_idx in s.tokens.spans():
            spans.append((i, s_idx, p_idx, o_idx))

        occurrences: dict[int, list[int]] = {}
        for t in range(t_len):
            inst = int(s.tokens.step_instance[t])
            if inst >= 0:
                occurrences.setdefault(inst, []).append(t)
        for inst, steps in occurrences.items():
            comp_index[(i, inst)] = len(comp_counts)
            comp_counts.append(len(steps))
            for t in steps:
                occ_rows.append(i * t_max + t)
                occ_comp.append(comp_index[(i, inst)])

        for parent, children in s.graph.sibling_groups().items():
            present = [c for c in children if (i, c) in comp_index]
            for a_pos in range(len(present)):
                for b_pos in range(a_pos + 1, len(present)):
                    sibling_pairs.append(
                        (comp_index[(i, present[a_pos])], comp_index[(i, present[b_pos])])
                    )
            if (i, parent) in comp_index:
                for c in present:
                    cp_pairs.append((comp_index[(i, c)], comp_index[(i, parent)]))

    prev = np.zeros_like(target)
    prev[:, 1:] = target[:, :-1]
    maskable = (typ == TYPE_SUBJECT) | (typ == TYPE_PREDICATE) | (typ == TYPE_OBJECT)

    def int_rows(rows: list, width: int) -> np.ndarray:
        if rows:
            return np.asarray(rows, dtype=np.int64)
        return np.zeros((0, width), dtype=np.int64)

    return Batch(
        word=word,
        object_ids=obj,
        relation=rel,
        type_ids=typ,
        parent=par,
        real=real,
        attn_bias=padding_bias(real),
        target_std=target,
        prev_std=prev,
        pos_mask=pos_mask,
        size_mask=size_mask,
        maskable=maskable,
        spans=int_rows(spans, 4),
        occ_rows=np.asarray(occ_rows, dtype=np.int64),
        occ_comp=np.asarray(occ_comp, dtype=np.int64),
        comp_counts=np.asarray(comp_counts, dtype=np.int64),
        sibling_pairs=int_rows(sibling_pairs, 2),
        child_parent_pairs=int_rows(cp_pairs, 2),
    )
