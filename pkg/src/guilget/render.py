"""Wireframe rendering of layouts to SVG.

Output bytes are deterministic for equal input: fixed coordinate
formatting, stable component ordering (tree depth, then instance id), and
a fixed class color palette.
"""

from __future__ import annotations

from typing import Mapping
from xml.sax.saxutils import escape

from guilget.geometry import BBox
from guilget.vocab import COMPONENT_CLASSES, ROOT_ID

DEFAULT_VIEWPORT = (360, 640)

# One stable color per class id (hue-spread palette).
CLASS_COLORS: dict[str, str] = {
    cls.name: f"hsl({(i * 360 // len(COMPONENT_CLASSES))}, 55%, {'38%' if cls.container else '62%'})"
    for i, cls in enumerate(COMPONENT_CLASSES)
}


def _depth(instance: int, parent_of: Mapping[int, int]) -> int:
    depth = 0
    cur = instance
    while cur != ROOT_ID:
        cur = parent_of.get(cur, ROOT_ID)
        depth += 1
    return depth


def render_svg(
    boxes: Mapping[int, BBox],
    classes: Mapping[int, str],
    parent_of: Mapping[int, int],
    colors: Mapping[str, str] | None = None,
    viewport: tuple[int, int] = DEFAULT_VIEWPORT,
) -> str:
    """One labeled rectangle per component; parents painted under children."""
    vw, vh = viewport
    palette = colors or CLASS_COLORS
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{vw}" height="{vh}" '
        f'viewBox="0 0 {vw} {vh}">',
        f'<rect x="0" y="0" width="{vw}" height="{vh}" fill="white" stroke="#333"/>',
    ]
    order = sorted(boxes, key=lambda i: (_depth(i, parent_of), i))
    for instance in order:
        box = boxes[instance]
        name = classes[instance]
        color = palette.get(name, "hsl(0, 0%, 70%)")
        x, y = box.x * vw, box.y * vh
        w, h = box.w * vw, box.h * vh
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{color}" fill-opacity="0.35" stroke="{color}" stroke-width="1.5"/>'
        )
        label = escape(f"{name}[{instance}]")
        parts.append(
            f'<text x="{x + 3:.2f}" y="{y + 11:.2f}" font-family="monospace" '
            f'font-size="9" fill="#111">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
