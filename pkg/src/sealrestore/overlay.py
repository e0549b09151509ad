"""SVG overlay of recognised characters on a restored page.

The output is a plain SVG 1.1 document: the page image as the bottom layer,
then one rectangle per character box (optional), then one text element per
character. Each text element is anchored at its box's top-left corner with
the baseline pushed down by one font size, so the glyph sits inside the box
area rather than above it.
"""

from __future__ import annotations

import base64
import os
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote
from xml.sax.saxutils import escape, quoteattr

from .boxes import BBox
from .errors import EmptyCanvasError

SVG_NS = "http://www.w3.org/2000/svg"
XLINK_NS = "http://www.w3.org/1999/xlink"


@dataclass(frozen=True)
class OverlayStyle:
    box_color: str = "green"
    box_stroke_width: float = 2
    show_boxes: bool = True
    text_color: str = "green"
    font_size: float = 64
    font_family: str = "serif"

    def __post_init__(self):
        if not self.font_size > 0:
            raise ValueError(f"font size must be positive, got {self.font_size}")
        if self.box_stroke_width < 0:
            raise ValueError(f"stroke width must be >= 0, got {self.box_stroke_width}")


def _num(v) -> str:
    # 10.0 -> "10", 2.5 -> "2.5"; keeps goldens free of float noise
    f = float(v)
    if f.is_integer():
        return str(int(f))
    return repr(f)


def _image_href(image_path, embed: bool) -> str:
    if not embed:
        return quote(Path(image_path).as_posix(), safe="/")
    data = Path(image_path).read_bytes()
    return "data:image/png;base64," + base64.b64encode(data).decode("ascii")


def render_overlay(image_path: str | os.PathLike, image_dims: tuple[int, int], items,
                   style: OverlayStyle = OverlayStyle(), embed: bool = False) -> str:
    """Return the SVG text for ``items``, a sequence of ``(BBox, text)`` pairs.

    ``image_path`` is written as a percent-encoded URI reference (normally
    relative to where the SVG is saved); with ``embed=True`` the file is read and inlined as base64 PNG.
    """
    w, h = image_dims
    if not (w > 0 and h > 0):
        raise EmptyCanvasError(f"canvas must have positive size, got {w}x{h}")
    items = list(items)
    for box, _text in items:
        if not isinstance(box, BBox):
            raise TypeError(f"expected BBox, got {type(box).__name__}")
        if box.x >= w or box.y >= h or box.x2 <= 0 or box.y2 <= 0:
            raise ValueError(f"box {box} does not intersect the {w}x{h} canvas")

    W, H = _num(w), _num(h)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="{SVG_NS}" xmlns:xlink="{XLINK_NS}" version="1.1" '
        f'width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'  <image x="0" y="0" width="{W}" height="{H}" '
        f'xlink:href={quoteattr(_image_href(image_path, embed))}/>',
    ]
    if style.show_boxes:
        stroke = (f'fill="none" stroke={quoteattr(style.box_color)} '
                  f'stroke-width="{_num(style.box_stroke_width)}"')
        for box, _text in items:
            lines.append(
                f'  <rect x="{_num(box.x)}" y="{_num(box.y)}" '
                f'width="{_num(box.w)}" height="{_num(box.h)}" {stroke}/>'
            )
    fs = _num(style.font_size)
    font = (f'font-size="{fs}" font-family={quoteattr(style.font_family)} '
            f'fill={quoteattr(style.text_color)}')
    for box, text in items:
        lines.append(
            f'  <text x="{_num(box.x)}" y="{_num(box.y)}" dy="{fs}" {font}>'
            f'{escape(str(text))}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_overlay(path: str | os.PathLike, image_path, image_dims, items,
                  style: OverlayStyle = OverlayStyle(), embed: bool = False) -> None:
    Path(path).write_text(render_overlay(image_path, image_dims, items, style, embed),
                          encoding="utf-8")
