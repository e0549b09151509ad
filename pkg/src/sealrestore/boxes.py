"""Character boxes: IoU matching, confidence filtering, cropping and file I/O.

Boxes are half-open pixel rectangles ``[x, x + w) x [y, y + h)``.

File formats
------------
Ground truth CSV
    Header ``unicode,x,y,w,h`` (an ``image_id`` column is optional; without
    it the file stem is the image id). ``unicode`` is ``U+XXXX``.
Predictions JSON lines
    One object per detection with ``image_id``, ``x``, ``y``, ``w``, ``h``,
    ``confidence`` and an optional ``unicode``. Detector and classifier
    outputs enter the toolkit this way.
"""

from __future__ import annotations

import csv
import json
import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AnnotationError, InvalidCodepointError, OutOfBoundsError
from .image_core import as_image

DEFAULT_IOU = 0.5
DEFAULT_CONFIDENCE = 0.5


@dataclass(frozen=True)
class BBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box width and height must be positive, got {self.w}x{self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    def intersects(self, other: "BBox") -> bool:
        return intersection_area(self, other) > 0


@dataclass(frozen=True)
class Detection:
    box: BBox
    confidence: float = 1.0
    label: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")
        if self.label is not None:
            check_codepoint(self.label)


@dataclass(frozen=True)
class GroundTruth:
    box: BBox
    codepoint: int

    def __post_init__(self):
        check_codepoint(self.codepoint)


@dataclass
class MatchResult:
    pairs: list[tuple[int, int, float]] = field(default_factory=list)
    unmatched_gt: list[int] = field(default_factory=list)
    unmatched_pred: list[int] = field(default_factory=list)

    @property
    def matched(self) -> int:
        return len(self.pairs)


def intersection_area(a: BBox, b: BBox) -> float:
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return float(iw * ih)


def iou(a: BBox, b: BBox) -> float:
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def match_boxes(gt, pred, threshold: float = DEFAULT_IOU) -> MatchResult:
    """Greedy one-to-one matching on descending IoU.

    Candidate pairs need IoU >= ``threshold``. Ties go to the lower ground-truth
    index, then the lower prediction index.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    gt_boxes = [g.box if isinstance(g, GroundTruth) else g for g in gt]
    pred_boxes = [p.box if isinstance(p, Detection) else p for p in pred]
    candidates = []
    for gi, gb in enumerate(gt_boxes):
        for pi, pb in enumerate(pred_boxes):
            v = iou(gb, pb)
            if v >= threshold:
                candidates.append((-v, gi, pi))
    candidates.sort()
    used_gt, used_pred = set(), set()
    pairs = []
    for neg, gi, pi in candidates:
        if gi in used_gt or pi in used_pred:
            continue
        used_gt.add(gi)
        used_pred.add(pi)
        pairs.append((gi, pi, -neg))
    return MatchResult(
        pairs=pairs,
        unmatched_gt=[i for i in range(len(gt_boxes)) if i not in used_gt],
        unmatched_pred=[i for i in range(len(pred_boxes)) if i not in used_pred],
    )


def filter_by_confidence(dets, theta: float = DEFAULT_CONFIDENCE) -> list[Detection]:
    """Keep detections scoring strictly above ``theta``, in input order."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return [d for d in dets if d.confidence > theta]


def clamp_box(box: BBox, width: int, height: int) -> tuple[int, int, int, int]:
    """Integer pixel bounds ``(x0, y0, x1, y1)`` of ``box`` clipped to the image."""
    x0 = max(int(np.floor(box.x)), 0)
    y0 = max(int(np.floor(box.y)), 0)
    x1 = min(int(np.ceil(box.x2)), width)
    y1 = min(int(np.ceil(box.y2)), height)
    if x1 <= x0 or y1 <= y0:
        raise OutOfBoundsError(f"box {box} lies outside the {width}x{height} image")
    return x0, y0, x1, y1


def crop(img: np.ndarray, box: BBox) -> np.ndarray:
    img = as_image(img)
    x0, y0, x1, y1 = clamp_box(box, img.shape[1], img.shape[0])
    return img[y0:y1, x0:x1].copy()


def check_codepoint(cp: int) -> int:
    if not isinstance(cp, (int, np.integer)) or isinstance(cp, bool):
        raise InvalidCodepointError(f"code point must be an integer, got {cp!r}")
    if not 0 <= cp <= 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise InvalidCodepointError(f"U+{int(cp):04X} is not a Unicode scalar value")
    return int(cp)


def codepoint_to_char(cp: int) -> str:
    return chr(check_codepoint(cp))


def parse_codepoint(text: str) -> int:
    s = text.strip()
    if s[:2].upper() == "U+":
        s = s[2:]
    try:
        cp = int(s, 16)
    except ValueError:
        raise InvalidCodepointError(f"not a U+XXXX code point: {text!r}") from None
    return check_codepoint(cp)


def format_codepoint(cp: int) -> str:
    return f"U+{check_codepoint(cp):04X}"


# -- file formats -----------------------------------------------------------

_GT_COLUMNS = ("unicode", "x", "y", "w", "h")


def _int_field(value, name):
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} is not a number: {value!r}") from None
    if f != int(f):
        raise ValueError(f"{name} must be an integer pixel coordinate, got {value!r}")
    return int(f)


def read_ground_truth(path: str | os.PathLike) -> dict[str, list[GroundTruth]]:
    """Read a ground-truth CSV, returning boxes grouped by image id."""
    path = Path(path)
    out: dict[str, list[GroundTruth]] = defaultdict(list)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise AnnotationError(path, 1, "empty file, expected header unicode,x,y,w,h") from None
        missing = [c for c in _GT_COLUMNS if c not in header]
        if missing:
            raise AnnotationError(path, 1, f"missing columns {missing}")
        col = {name: header.index(name) for name in header}
        for row in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            try:
                cells = {name: row[i] for name, i in col.items()}
                image_id = cells.get("image_id", "").strip() or path.stem
                out[image_id].append(
                    GroundTruth(
                        BBox(*(_int_field(cells[c], c) for c in ("x", "y", "w", "h"))),
                        parse_codepoint(cells["unicode"]),
                    )
                )
            except (IndexError, ValueError) as exc:
                raise AnnotationError(path, line, str(exc)) from None
    return dict(out)


def read_ground_truth_dir(path: str | os.PathLike) -> dict[str, list[GroundTruth]]:
    """Read one CSV or every ``*.csv`` under a directory."""
    path = Path(path)
    files = sorted(path.glob("*.csv")) if path.is_dir() else [path]
    merged: dict[str, list[GroundTruth]] = defaultdict(list)
    for f in files:
        for image_id, items in read_ground_truth(f).items():
            merged[image_id].extend(items)
    return dict(merged)


def write_ground_truth(path: str | os.PathLike, items, image_id: str | None = None) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        cols = list(_GT_COLUMNS) + (["image_id"] if image_id else [])
        writer.writerow(cols)
        for g in items:
            row = [format_codepoint(g.codepoint), g.box.x, g.box.y, g.box.w, g.box.h]
            writer.writerow(row + ([image_id] if image_id else []))


def read_predictions(path: str | os.PathLike) -> dict[str, list[Detection]]:
    """Read a predictions JSONL file, grouping detections by image id."""
    path = Path(path)
    out: dict[str, list[Detection]] = defaultdict(list)
    with path.open(encoding="utf-8") as fh:
        for line, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
                if not isinstance(obj, dict):
                    raise ValueError("record is not a JSON object")
                box = BBox(*(_int_field(obj[k], k) for k in ("x", "y", "w", "h")))
                label = obj.get("unicode")
                det = Detection(
                    box,
                    float(obj["confidence"]),
                    parse_codepoint(label) if label not in (None, "") else None,
                )
                out[str(obj["image_id"])].append(det)
            except KeyError as exc:
                raise AnnotationError(path, line, f"missing field {exc}") from None
            except (ValueError, TypeError) as exc:
                raise AnnotationError(path, line, str(exc)) from None
    return dict(out)


def detection_record(image_id: str, det: Detection) -> dict:
    rec = {
        "image_id": image_id,
        "x": det.box.x,
        "y": det.box.y,
        "w": det.box.w,
        "h": det.box.h,
        "confidence": det.confidence,
    }
    if det.label is not None:
        rec["unicode"] = format_codepoint(det.label)
    return rec


def write_predictions(path: str | os.PathLike, by_image: dict[str, list[Detection]]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for image_id, dets in by_image.items():
            for det in dets:
                fh.write(json.dumps(detection_record(image_id, det), ensure_ascii=False) + "\n")


def match_report(gt_by_image, pred_by_image, threshold: float = DEFAULT_IOU,
                 theta: float = DEFAULT_CONFIDENCE) -> dict:
    """Totals across images in the layout of a ground-truth/prediction/matched table.

    Predictions are confidence-filtered (strictly above ``theta``) before they
    are counted or matched.
    """
    total_gt = total_pred = total_matched = 0
    images = []
    for image_id in sorted(set(gt_by_image) | set(pred_by_image)):
        gt = gt_by_image.get(image_id, [])
        pred = filter_by_confidence(pred_by_image.get(image_id, []), theta)
        res = match_boxes(gt, pred, threshold)
        total_gt += len(gt)
        total_pred += len(pred)
        total_matched += res.matched
        images.append({
            "image_id": image_id,
            "ground_truth": len(gt),
            "predicted": len(pred),
            "matched": res.matched,
        })
    return {
        "iou_threshold": threshold,
        "confidence_threshold": theta,
        "ground_truth": total_gt,
        "predicted": total_pred,
        "matched": total_matched,
        "images": images,
    }
