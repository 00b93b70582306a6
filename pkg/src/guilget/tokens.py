"""Flattening arrangement graphs into the five parallel token id streams.

Each relation triplet becomes three tokens (subject, predicate, object);
triplets are separated by SEP and the whole sequence starts with CLS. The
five streams carry, per token: the word (class or predicate), the dense
object slot, the triplet number, the role within a triplet, and the dense
slot of the component's parent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from guilget.graph import GuiAG
from guilget.vocab import NUM_CLASSES, PREDICATES, Predicate, ROOT_ID

PAD, CLS, SEP, MASK = 0, 1, 2, 3

WORD_VOCAB = 4 + NUM_CLASSES + len(PREDICATES)

# Token roles (the "type of word" stream).
TYPE_SPECIAL, TYPE_SUBJECT, TYPE_PREDICATE, TYPE_OBJECT = 0, 1, 2, 3
TYPE_VOCAB = 4

DEFAULT_MAX_SEQ_LEN = 160
DEFAULT_MAX_OBJECTS = 64


def class_word_id(class_id: int) -> int:
    return 4 + class_id


def predicate_word_id(predicate: Predicate) -> int:
    return 4 + NUM_CLASSES + PREDICATES.index(predicate)


class SequenceTooLongError(ValueError):
    pass


@dataclass
class TokenSequence:
    """Five equal-length id streams plus bookkeeping for box extraction."""

    word_ids: np.ndarray
    object_ids: np.ndarray
    relationship_ids: np.ndarray
    type_ids: np.ndarray
    parent_ids: np.ndarray
    # Original instance id behind each subject/object token, -1 elsewhere.
    step_instance: np.ndarray
    # instance id -> dense slot used in the object/parent streams.
    slot_of: dict[int, int]

    def __len__(self) -> int:
        return int(self.word_ids.shape[0])

    @property
    def n_triplets(self) -> int:
        return (len(self) + 1) // 4 if len(self) > 1 else 0

    def spans(self) -> list[tuple[int, int, int]]:
        """(subject, predicate, object) token indices for each triplet."""
        return [(1 + 4 * k, 2 + 4 * k, 3 + 4 * k) for k in range(self.n_triplets)]


def serialize_ag(
    ag: GuiAG,
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN,
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> TokenSequence:
    """Flatten a graph into token streams: CLS s p o SEP s p o ...

    Dense object slots are assigned by component order (the screen root
    keeps slot 0). Raises SequenceTooLongError when the graph exceeds the
    model's sequence or instance-count limits.
    """
    slot_of = {ROOT_ID: 0}
    for comp in ag.components:
        slot_of[comp.instance_id] = len(slot_of)
    if len(slot_of) > max_objects:
        raise SequenceTooLongError(
            f"sequence too long: {len(slot_of)} instances exceeds limit {max_objects}"
        )
    n = len(ag.triplets)
    length = 4 * n if n else 1
    if length > max_seq_len:
        raise SequenceTooLongError(
            f"sequence too long: {length} tokens exceeds limit {max_seq_len}"
        )

    word = np.zeros(length, dtype=np.int64)
    obj = np.zeros(length, dtype=np.int64)
    rel = np.zeros(length, dtype=np.int64)
    typ = np.zeros(length, dtype=np.int64)
    par = np.zeros(length, dtype=np.int64)
    instance = np.full(length, -1, dtype=np.int64)

    classes = {c.instance_id: c.cls.id for c in ag.components}
    word[0] = CLS
    pos = 1
    for k, t in enumerate(ag.triplets):
        if k > 0:
            word[pos] = SEP
            pos += 1
        for role, value in (
            (TYPE_SUBJECT, t.subject),
            (TYPE_PREDICATE, t.predicate),
            (TYPE_OBJECT, t.obj),
        ):
            rel[pos] = k + 1
            typ[pos] = role
            if role == TYPE_PREDICATE:
                word[pos] = predicate_word_id(value)
            else:
                word[pos] = class_word_id(classes[value])
                obj[pos] = slot_of[value]
                par[pos] = slot_of[ag.parent_of.get(value, ROOT_ID)]
                instance[pos] = value
            pos += 1
    return TokenSequence(word, obj, rel, typ, par, instance, slot_of)
