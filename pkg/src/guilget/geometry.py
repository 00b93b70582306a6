"""Axis-aligned box geometry shared by training losses and evaluation metrics.

All coordinates are normalized screen units: x grows rightward, y grows
downward, and a full screen is the unit square. Boxes are (left, top,
width, height); widths and heights are never negative, but generated boxes
are allowed to leave the unit square.
"""

from __future__ import annotations

from dataclasses import dataclass

from guilget.vocab import Predicate

# A subject counts as inside an object when at least this fraction of its
# area overlaps the object. Strict full containment would be brittle under
# float rounding.
INSIDE_THRESHOLD = 0.95

# Slack allowed when validating that ground-truth boxes stay on screen.
SCREEN_EPS = 1e-6


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: top-left corner plus non-negative size."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.w < 0 or self.h < 0:
            raise ValueError(f"negative box size: w={self.w}, h={self.h}")

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def scaled(self, s: float) -> "BBox":
        return BBox(self.x * s, self.y * s, self.w * s, self.h * s)


def area(b: BBox) -> float:
    """Box area; zero for degenerate boxes."""
    return b.w * b.h


def intersection_area(a: BBox, b: BBox) -> float:
    """Area of the axis-aligned overlap of two boxes; 0 when disjoint."""
    iw = min(a.right, b.right) - max(a.x, b.x)
    ih = min(a.bottom, b.bottom) - max(a.y, b.y)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    return iw * ih


def _edge_area(b: BBox) -> float:
    """Area from edge differences: the same arithmetic intersections use.

    (x + w) - x is not exactly w in floats; ratios of an intersection to a
    box area must use a single convention so full containment and full
    overlap come out exactly 1.
    """
    return max(b.right - b.x, 0.0) * max(b.bottom - b.y, 0.0)


def containment_ratio(inner: BBox, outer: BBox) -> float:
    """Fraction of `inner`'s area that lies within `outer`.

    Zero-area boxes count as fully contained so that metrics stay defined
    on degenerate predictions.
    """
    a = _edge_area(inner)
    if a == 0.0:
        return 1.0
    return min(intersection_area(inner, outer) / a, 1.0)


def child_parent_loss(child: BBox, parent: BBox) -> float:
    """How far a child sticks out of its parent: 1 - contained fraction.

    0 when the child is fully inside the parent, 1 when disjoint.
    """
    return 1.0 - containment_ratio(child, parent)


def sibling_overlap_loss(c1: BBox, c2: BBox) -> float:
    """Overlap of two same-parent components relative to the smaller one.

    0 when disjoint, 1 when the smaller box is fully covered. Degenerate
    boxes overlap nothing by convention.
    """
    smaller = min(_edge_area(c1), _edge_area(c2))
    if smaller == 0.0:
        return 0.0
    return min(intersection_area(c1, c2) / smaller, 1.0)


def derive_predicate(
    subject: BBox,
    obj: BBox,
    containment_threshold: float = INSIDE_THRESHOLD,
) -> Predicate:
    """Pick the relation that best describes subject relative to object.

    Containment wins first; otherwise the dominant axis of the center
    offset decides, with exact ties (including coincident centers) broken
    toward the vertical axis.
    """
    if containment_ratio(subject, obj) >= containment_threshold:
        return Predicate.INSIDE
    sx, sy = subject.center
    ox, oy = obj.center
    dx = sx - ox
    dy = sy - oy
    if abs(dx) > abs(dy):
        return Predicate.LEFT if dx < 0 else Predicate.RIGHT
    return Predicate.ABOVE if dy <= 0 else Predicate.BELOW


def relationship_satisfied(subject: BBox, predicate: Predicate, obj: BBox) -> bool:
    """Check whether a generated pair of boxes realizes the stated relation.

    Directional predicates compare centers strictly; `inside` requires the
    containment ratio to reach the containment threshold.
    """
    if predicate is Predicate.INSIDE:
        return containment_ratio(subject, obj) >= INSIDE_THRESHOLD
    sx, sy = subject.center
    ox, oy = obj.center
    if predicate is Predicate.LEFT:
        return sx < ox
    if predicate is Predicate.RIGHT:
        return sx > ox
    if predicate is Predicate.ABOVE:
        return sy < oy
    return sy > oy
