"""Seal-overlaid synthetic documents with ground-truth seal masks.

Seals are alpha-composited onto a clean page at random positions. A seal's
ink bounding box may overlap at most one other seal's box, so no point of
the page lies under three seals.

``make_seal_template`` and ``make_page`` produce procedural stand-ins for
scanned seals and clean pages, used by the test-suite and the ``synth``
command when no scans are given.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import ImageDraw

from .boxes import BBox
from .errors import NoTemplatesError, OutOfBoundsError, PlacementInfeasibleError
from .image_core import as_image, load_image

DEFAULT_SEALS = 10
DEFAULT_OPACITY = 0.85
WHITE_THRESHOLD = 240
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class SealTemplate:
    image: np.ndarray
    ink_mask: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.ink_mask.shape != self.image.shape[:2]:
            raise ValueError("ink mask and template image differ in size")

    @classmethod
    def from_image(cls, image: np.ndarray, white_threshold: int = WHITE_THRESHOLD,
                   name: str = "") -> "SealTemplate":
        """Ink is every pixel whose darkest channel is below ``white_threshold``."""
        image = as_image(image)
        return cls(image, image.min(axis=2) < white_threshold, name)

    @property
    def width(self) -> int:
        return self.image.shape[1]

    @property
    def height(self) -> int:
        return self.image.shape[0]

    def ink_bbox(self) -> tuple[int, int, int, int] | None:
        """``(x, y, w, h)`` of the ink pixels, or None if there are none."""
        ys, xs = np.nonzero(self.ink_mask)
        if xs.size == 0:
            return None
        x0, y0 = int(xs.min()), int(ys.min())
        return x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1


@dataclass(frozen=True)
class SealPlacement:
    template_id: int
    x: int
    y: int
    width: int
    height: int
    ink_box: BBox | None

    def to_dict(self) -> dict:
        box = self.ink_box
        return {
            "template_id": self.template_id,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
            "ink_box": None if box is None else [box.x, box.y, box.w, box.h],
        }


def load_template(path: str | os.PathLike, white_threshold: int = WHITE_THRESHOLD) -> SealTemplate:
    return SealTemplate.from_image(load_image(path), white_threshold, Path(path).stem)


def composite_seal(page: np.ndarray, tpl: SealTemplate, pos: tuple[int, int],
                   opacity: float = DEFAULT_OPACITY) -> np.ndarray:
    """Blend the template's ink pixels onto ``page`` with top-left at ``pos``.

    Each ink pixel becomes ``round((1 - opacity) * page + opacity * ink)``;
    every other pixel is left as it was.
    """
    page = as_image(page)
    if not 0.0 < opacity <= 1.0:
        raise ValueError(f"opacity must lie in (0, 1], got {opacity}")
    x, y = int(pos[0]), int(pos[1])
    ph, pw = page.shape[:2]
    if x < 0 or y < 0 or x + tpl.width > pw or y + tpl.height > ph:
        raise OutOfBoundsError(
            f"{tpl.width}x{tpl.height} seal at ({x}, {y}) does not fit a {pw}x{ph} page"
        )
    out = page.copy()
    region = out[y:y + tpl.height, x:x + tpl.width]
    ink = tpl.ink_mask
    blended = (1.0 - opacity) * region[ink].astype(np.float64) + opacity * tpl.image[ink].astype(np.float64)
    region[ink] = np.floor(blended + 0.5).astype(np.uint8)
    return out


def _boxes_overlap(a: BBox | None, b: BBox | None) -> bool:
    return a is not None and b is not None and a.intersects(b)


def generate_synthetic(page: np.ndarray, templates, n: int = DEFAULT_SEALS, seed: int = 0,
                       opacity: float = DEFAULT_OPACITY,
                       max_rejections: int = MAX_REJECTIONS):
    """Overlay ``n`` randomly placed seals on ``page``.

    Returns ``(synthetic, placements, mask)`` where ``mask`` is the union of
    the placed ink pixels. Top-left positions are uniform over the positions
    where the whole template fits. A draw is rejected if its ink box would
    overlap two placed seals, or one seal that already has an overlap
    partner; ``max_rejections`` consecutive rejections raise
    ``PlacementInfeasibleError``.
    """
    page = as_image(page)
    templates = list(templates)
    if n < 0:
        raise ValueError(f"seal count must be >= 0, got {n}")
    ph, pw = page.shape[:2]
    out = page.copy()
    mask = np.zeros((ph, pw), dtype=bool)
    if n == 0:
        return out, [], mask
    if not templates:
        raise NoTemplatesError("at least one seal template is needed")
    for i, tpl in enumerate(templates):
        if tpl.width > pw or tpl.height > ph:
            raise PlacementInfeasibleError(
                f"template {i} ({tpl.width}x{tpl.height}) is larger than the {pw}x{ph} page"
            )

    rng = np.random.default_rng(seed)
    bboxes = [t.ink_bbox() for t in templates]
    placements: list[SealPlacement] = []
    partners: list[int] = []
    for _ in range(n):
        for _attempt in range(max_rejections):
            tid = int(rng.integers(len(templates)))
            tpl = templates[tid]
            x = int(rng.integers(0, pw - tpl.width + 1))
            y = int(rng.integers(0, ph - tpl.height + 1))
            bb = bboxes[tid]
            ink_box = None if bb is None else BBox(x + bb[0], y + bb[1], bb[2], bb[3])
            hits = [j for j, p in enumerate(placements) if _boxes_overlap(ink_box, p.ink_box)]
            if len(hits) >= 2 or (len(hits) == 1 and partners[hits[0]] >= 1):
                continue
            for j in hits:
                partners[j] += 1
            partners.append(len(hits))
            placements.append(SealPlacement(tid, x, y, tpl.width, tpl.height, ink_box))
            out = composite_seal(out, tpl, (x, y), opacity)
            mask[y:y + tpl.height, x:x + tpl.width] |= tpl.ink_mask
            break
        else:
            raise PlacementInfeasibleError(
                f"could not place seal {len(placements) + 1} of {n} after {max_rejections} draws"
            )
    return out, placements, mask


# -- procedural stand-ins ---------------------------------------------------

_SS = 4  # supersampling factor for anti-aliased drawing


def _glyph_strokes(draw, rng, x0, y0, size, width, fill):
    n = int(rng.integers(3, 7))
    for _ in range(n):
        if rng.random() < 0.5:
            y = y0 + rng.uniform(0.1, 0.9) * size
            xa, xb = sorted(x0 + rng.uniform(0.05, 0.95, 2) * size)
            draw.line([(xa, y), (xb, y)], fill=fill, width=width)
        else:
            x = x0 + rng.uniform(0.1, 0.9) * size
            ya, yb = sorted(y0 + rng.uniform(0.05, 0.95, 2) * size)
            draw.line([(x, ya), (x, yb)], fill=fill, width=width)


def make_seal_template(rng: np.random.Generator | int, size: int | None = None) -> SealTemplate:
    """Render a square or round red seal on white, with carved pseudo-characters."""
    rng = np.random.default_rng(rng)
    size = int(size or rng.integers(56, 100))
    big = size * _SS
    ink = (int(rng.integers(185, 226)), int(rng.integers(25, 61)), int(rng.integers(30, 71)))
    im = PILImage.new("RGB", (big, big), (255, 255, 255))
    draw = ImageDraw.Draw(im)
    border = max(int(big * rng.uniform(0.05, 0.09)), _SS)
    round_seal = rng.random() < 0.35
    inverted = rng.random() < 0.4
    box = [border // 2, border // 2, big - border // 2 - 1, big - border // 2 - 1]
    if round_seal:
        if inverted:
            draw.ellipse(box, fill=ink)
        else:
            draw.ellipse(box, outline=ink, width=border)
    else:
        if inverted:
            draw.rectangle(box, fill=ink)
        else:
            draw.rectangle(box, outline=ink, width=border)
    cells = 2 if rng.random() < 0.7 else 1
    inner = big - 4 * border
    cell = inner / cells
    stroke = max(int(cell * rng.uniform(0.08, 0.13)), _SS)
    fill = (255, 255, 255) if inverted else ink
    for r in range(cells):
        for c in range(cells):
            _glyph_strokes(draw, rng, 2 * border + c * cell, 2 * border + r * cell, cell * 0.9, stroke, fill)
    arr = np.asarray(im.resize((size, size), PILImage.Resampling.BOX)).copy()
    # worn stamp: scattered pixels where the ink did not take
    holes = (rng.random((size, size)) < 0.03) & (arr.min(axis=2) < WHITE_THRESHOLD)
    arr[holes] = 255
    return SealTemplate.from_image(arr)


def _smooth_field(rng, h, w, cells, amplitude):
    grid = rng.normal(0.0, 1.0, (cells + 1, cells + 1)).astype(np.float32)
    img = PILImage.fromarray(grid).resize((w, h), PILImage.Resampling.BICUBIC)
    return np.asarray(img, dtype=np.float64) * amplitude


def make_page(width: int, height: int, rng: np.random.Generator | int) -> np.ndarray:
    """Render a clean aged-paper page with vertical columns of brush-like glyphs.

    Includes low-frequency tone variation, fine grain and a few faint brownish
    stains, which are the reddish non-seal regions a loose colour rule
    mistakes for seal ink.
    """
    rng = np.random.default_rng(rng)
    base = np.array([rng.uniform(226, 240), rng.uniform(214, 226), rng.uniform(188, 204)])
    tone = _smooth_field(rng, height, width, 4, 3.0)
    paper = base[None, None, :] + tone[..., None]

    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(int(rng.integers(2, 5))):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        rx, ry = rng.uniform(0.05, 0.18) * width, rng.uniform(0.05, 0.18) * height
        d = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2
        strength = rng.uniform(0.5, 1.0) * np.clip(1.2 - d, 0.0, 1.0)
        tint = np.array([0.96, 0.83, 0.76])
        paper *= 1.0 - strength[..., None] * (1.0 - tint)[None, None, :]

    # glyphs are drawn at 2x on a coverage layer, then downsampled
    ss = 2
    cov = PILImage.new("L", (width * ss, height * ss), 0)
    draw = ImageDraw.Draw(cov)
    char = int(rng.integers(26, 38))
    margin = char
    col_gap = int(char * rng.uniform(1.3, 1.6))
    x = width - margin - char
    while x > margin:
        y = margin + int(rng.integers(0, char // 2))
        col_end = height - margin - int(rng.integers(0, height // 4))
        while y + char < col_end:
            size = char * rng.uniform(0.7, 1.0)
            _brush_glyph(draw, rng, x * ss, y * ss, size * ss, ss)
            y += int(size + rng.uniform(0.15, 0.45) * char)
        x -= col_gap
    coverage = np.asarray(cov.resize((width, height), PILImage.Resampling.BOX), dtype=np.float64) / 255.0

    ink = np.array([rng.uniform(25, 50), rng.uniform(22, 42), rng.uniform(18, 36)])
    page = paper * (1.0 - coverage[..., None]) + ink[None, None, :] * coverage[..., None]
    page += rng.normal(0.0, 2.0, page.shape)
    return np.clip(np.rint(page), 0, 255).astype(np.uint8)


def _brush_glyph(draw, rng, x0, y0, size, ss):
    n = int(rng.integers(3, 8))
    for _ in range(n):
        width = int(rng.uniform(1.6, 3.6) * ss)
        pts = []
        px, py = x0 + rng.uniform(0.1, 0.9) * size, y0 + rng.uniform(0.1, 0.9) * size
        angle = rng.uniform(0, 2 * math.pi)
        length = rng.uniform(0.25, 0.7) * size
        steps = int(rng.integers(2, 5))
        for _s in range(steps + 1):
            pts.append((px, py))
            angle += rng.normal(0, 0.5)
            px = min(max(px + math.cos(angle) * length / steps, x0), x0 + size)
            py = min(max(py + math.sin(angle) * length / steps, y0), y0 + size)
        draw.line(pts, fill=255, width=width, joint="curve")
