"""Component classes and relation predicates for GUI layouts.

The default vocabulary is the 24 CLAY component categories. Classes are
split into widgets (leaf components) and spatial layouts (containers that
organize children). The screen root is a sentinel outside the vocabulary:
it never appears in arrangement graphs or token streams.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class ComponentClass:
    """A component category with a dense id and a container/widget flag."""

    id: int
    name: str
    container: bool = False


_CONTAINER_NAMES = {
    "DRAWER",
    "NAVIGATION_BAR",
    "TOOLBAR",
    "LIST_ITEM",
    "CARD_VIEW",
    "CONTAINER",
}

_CLASS_NAMES = [
    "BACKGROUND",
    "IMAGE",
    "PICTOGRAM",
    "BUTTON",
    "TEXT",
    "LABEL",
    "TEXT_INPUT",
    "MAP",
    "CHECK_BOX",
    "SWITCH",
    "PAGER_INDICATOR",
    "SLIDER",
    "RADIO_BUTTON",
    "SPINNER",
    "PROGRESS_BAR",
    "ADVERTISEMENT",
    "DRAWER",
    "NAVIGATION_BAR",
    "TOOLBAR",
    "LIST_ITEM",
    "CARD_VIEW",
    "CONTAINER",
    "DATE_PICKER",
    "NUMBER_STEPPER",
]

COMPONENT_CLASSES: tuple[ComponentClass, ...] = tuple(
    ComponentClass(i, name, name in _CONTAINER_NAMES)
    for i, name in enumerate(_CLASS_NAMES)
)

NUM_CLASSES = len(COMPONENT_CLASSES)

# Sentinel for the implicit screen node; not part of the 24-class vocabulary.
ROOT_CLASS = ComponentClass(-1, "ROOT", container=True)
ROOT_ID = 0

_BY_NAME = {c.name: c for c in COMPONENT_CLASSES}


def class_by_name(name: str) -> ComponentClass:
    """Look up a component class by name; accepts spaces for underscores."""
    key = name.strip().upper().replace(" ", "_")
    if key == ROOT_CLASS.name:
        return ROOT_CLASS
    try:
        return _BY_NAME[key]
    except KeyError:
        raise KeyError(f"unknown component class: {name!r}") from None


def class_by_id(class_id: int) -> ComponentClass:
    if not 0 <= class_id < NUM_CLASSES:
        raise KeyError(f"unknown component class id: {class_id}")
    return COMPONENT_CLASSES[class_id]


class Predicate(enum.Enum):
    """Spatial relation between a subject and an object component."""

    LEFT = "left"
    RIGHT = "right"
    ABOVE = "above"
    BELOW = "below"
    INSIDE = "inside"

    def __str__(self) -> str:
        return self.value


# "top"/"bottom" are accepted as synonyms of above/below when parsing.
_PREDICATE_ALIASES = {
    "left": Predicate.LEFT,
    "right": Predicate.RIGHT,
    "above": Predicate.ABOVE,
    "below": Predicate.BELOW,
    "top": Predicate.ABOVE,
    "bottom": Predicate.BELOW,
    "inside": Predicate.INSIDE,
}

PREDICATES: tuple[Predicate, ...] = tuple(Predicate)


def predicate_by_name(name: str) -> Predicate:
    try:
        return _PREDICATE_ALIASES[name.strip().lower()]
    except KeyError:
        raise KeyError(f"unknown predicate: {name!r}") from None
