import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import max_matching_brute, raster_iou
from sealrestore.boxes import (
    BBox,
    Detection,
    GroundTruth,
    codepoint_to_char,
    crop,
    filter_by_confidence,
    format_codepoint,
    iou,
    match_boxes,
    match_report,
    parse_codepoint,
    read_ground_truth,
    read_ground_truth_dir,
    read_predictions,
    write_ground_truth,
    write_predictions,
)
from sealrestore.errors import AnnotationError, InvalidCodepointError, OutOfBoundsError

int_boxes = st.builds(lambda x, y, w, h: (x, y, w, h),
                      st.integers(0, 20), st.integers(0, 20), st.integers(1, 10), st.integers(1, 10))


def test_iou_examples():
    a = BBox(0, 0, 10, 10)
    assert iou(a, a) == 1.0
    assert iou(a, BBox(20, 20, 5, 5)) == 0.0
    assert iou(a, BBox(5, 5, 10, 10)) == pytest.approx(25 / 175, abs=1e-12)
    assert raster_iou((0, 0, 10, 10), (5, 5, 10, 10)) == pytest.approx(25 / 175)
    assert iou(a, BBox(10, 0, 5, 5)) == 0.0  # edges touch only


@given(int_boxes, int_boxes)
def test_iou_matches_raster(a, b):
    got = iou(BBox(*a), BBox(*b))
    assert got == pytest.approx(raster_iou(a, b), abs=1e-12)
    assert got == iou(BBox(*b), BBox(*a))
    assert 0 <= got <= 1


def test_bad_box():
    with pytest.raises(ValueError):
        BBox(0, 0, 0, 5)


def test_match_identical_and_disjoint():
    boxes = [BBox(i * 20, 0, 10, 10) for i in range(4)]
    res = match_boxes(boxes, boxes)
    assert res.matched == 4 and all(v == 1.0 for _, _, v in res.pairs)
    res = match_boxes(boxes, [BBox(0, 100, 5, 5)])
    assert res.matched == 0 and res.unmatched_gt == [0, 1, 2, 3] and res.unmatched_pred == [0]


def test_match_crafted_three_by_three():
    gt = [BBox(0, 0, 10, 10), BBox(4, 0, 10, 10), BBox(30, 0, 10, 10)]
    pred = [BBox(2, 0, 10, 10), BBox(0, 0, 10, 10), BBox(31, 0, 10, 10)]
    res = match_boxes(gt, pred, 0.5)
    ious = [[iou(g, p) for p in pred] for g in gt]
    assert res.matched == max_matching_brute(ious, 0.5) == 3
    assert (0, 1, 1.0) in res.pairs


def test_match_tie_break_prefers_lower_indices():
    g = BBox(0, 0, 10, 10)
    res = match_boxes([g, g], [g, g])
    assert [(a, b) for a, b, _ in res.pairs] == [(0, 0), (1, 1)]


def test_match_threshold_validation():
    with pytest.raises(ValueError):
        match_boxes([], [], 0.0)


@settings(max_examples=150, deadline=None)
@given(st.lists(int_boxes, max_size=6), st.lists(int_boxes, max_size=6), st.sampled_from([0.3, 0.5, 0.7]))
def test_match_invariants(gt, pred, thr):
    g = [BBox(*b) for b in gt]
    p = [BBox(*b) for b in pred]
    res = match_boxes(g, p, thr)
    ious = [[iou(a, b) for b in p] for a in g]
    assert res.matched <= min(len(g), len(p))
    assert res.matched <= max_matching_brute(ious, thr)
    assert len({a for a, _, _ in res.pairs}) == res.matched
    assert all(v >= thr for _, _, v in res.pairs)
    assert sorted(res.unmatched_gt + [a for a, _, _ in res.pairs]) == list(range(len(g)))
    # one more prediction never loses a pair
    extra = match_boxes(g, p + [BBox(0, 0, 5, 5)], thr)
    assert extra.matched >= res.matched


def test_confidence_filter():
    dets = [Detection(BBox(0, 0, 1, 1), c) for c in (0.9, 0.5, 0.009)]
    assert [d.confidence for d in filter_by_confidence(dets, 0.5)] == [0.9]
    assert filter_by_confidence([], 0.5) == []
    zero = [Detection(BBox(0, 0, 1, 1), c) for c in (0.0, 0.2, 0.0, 1.0)]
    assert [d.confidence for d in filter_by_confidence(zero, 0.0)] == [0.2, 1.0]
    with pytest.raises(ValueError):
        filter_by_confidence(dets, 1.5)


@given(st.lists(st.floats(0, 1), max_size=20), st.floats(0, 1))
def test_confidence_filter_idempotent(confs, theta):
    dets = [Detection(BBox(0, 0, 1, 1), c) for c in confs]
    once = filter_by_confidence(dets, theta)
    assert filter_by_confidence(once, theta) == once


def test_crop():
    img = np.arange(4 * 4 * 3, dtype=np.uint8).reshape(4, 4, 3)
    assert np.array_equal(crop(img, BBox(0, 0, 4, 4)), img)
    assert np.array_equal(crop(img, BBox(0, 0, 2, 2)), img[:2, :2])
    assert crop(img, BBox(2, 1, 5, 2)).shape == (2, 2, 3)
    with pytest.raises(OutOfBoundsError):
        crop(img, BBox(10, 10, 2, 2))


@given(st.integers(-5, 12), st.integers(-5, 12), st.integers(1, 12), st.integers(1, 12))
def test_crop_size_bounds(x, y, w, h):
    img = np.zeros((8, 10, 3), np.uint8)
    box = BBox(x, y, w, h)
    if x >= 10 or y >= 8 or x + w <= 0 or y + h <= 0:
        with pytest.raises(OutOfBoundsError):
            crop(img, box)
        return
    out = crop(img, box)
    assert 1 <= out.shape[0] <= min(h, 8) and 1 <= out.shape[1] <= min(w, 10)


def test_codepoints():
    assert codepoint_to_char(0x5C1A) == "尚"
    assert codepoint_to_char(0x41) == "A"
    assert codepoint_to_char(0xE000) == ""
    with pytest.raises(InvalidCodepointError):
        codepoint_to_char(0xD800)
    with pytest.raises(InvalidCodepointError):
        codepoint_to_char(0x110000)
    assert parse_codepoint("U+5c1a") == 0x5C1A
    assert format_codepoint(0x41) == "U+0041"
    with pytest.raises(InvalidCodepointError):
        parse_codepoint("U+XYZ")


def test_ground_truth_round_trip(tmp_path):
    items = [GroundTruth(BBox(1, 2, 3, 4), 0x5C1A), GroundTruth(BBox(5, 6, 7, 8), 0x66F8)]
    write_ground_truth(tmp_path / "doc1.csv", items)
    assert read_ground_truth(tmp_path / "doc1.csv") == {"doc1": items}
    write_ground_truth(tmp_path / "all.csv", items, image_id="other")
    merged = read_ground_truth_dir(tmp_path)
    assert merged == {"other": items, "doc1": items}


@pytest.mark.parametrize("body,line", [
    ("unicode,x,y,w,h\nU+5C1A,1,2,3,4\nU+5C1A,1,2,x,4\n", 3),
    ("unicode,x,y,w\n", 1),
    ("unicode,x,y,w,h\nU+D800,1,2,3,4\n", 2),
    ("unicode,x,y,w,h\nU+0041,1,2,0,4\n", 2),
    ("unicode,x,y,w,h\nU+0041,1.5,2,3,4\n", 2),
    ("", 1),
])
def test_ground_truth_errors_carry_line(tmp_path, body, line):
    f = tmp_path / "bad.csv"
    f.write_text(body)
    with pytest.raises(AnnotationError) as info:
        read_ground_truth(f)
    assert info.value.line == line
    assert f"bad.csv:{line}:" in str(info.value)


def test_predictions_round_trip(tmp_path):
    by_image = {
        "a": [Detection(BBox(1, 2, 3, 4), 0.75, 0x5C1A), Detection(BBox(5, 5, 5, 5), 0.25)],
        "b": [Detection(BBox(0, 0, 9, 9), 1.0, 0x41)],
    }
    write_predictions(tmp_path / "p.jsonl", by_image)
    assert read_predictions(tmp_path / "p.jsonl") == by_image
    first = json.loads((tmp_path / "p.jsonl").read_text().splitlines()[0])
    assert first == {"image_id": "a", "x": 1, "y": 2, "w": 3, "h": 4, "confidence": 0.75, "unicode": "U+5C1A"}


@pytest.mark.parametrize("line", [
    '{"image_id": "a", "x": 1, "y": 2, "w": 3, "confidence": 0.5}',
    '{"image_id": "a", "x": 1, "y": 2, "w": 3, "h": 4, "confidence": 1.5}',
    '[1, 2]',
    'not json',
])
def test_prediction_errors(tmp_path, line):
    f = tmp_path / "p.jsonl"
    f.write_text('{"image_id": "a", "x": 1, "y": 2, "w": 3, "h": 4, "confidence": 0.5}\n\n' + line + "\n")
    with pytest.raises(AnnotationError) as info:
        read_predictions(f)
    assert info.value.line == 3


def test_match_report_counts():
    g = BBox(0, 0, 10, 10)
    gt = {"a": [GroundTruth(g, 0x41), GroundTruth(BBox(50, 50, 10, 10), 0x42)], "c": [GroundTruth(g, 0x41)]}
    pred = {
        "a": [Detection(g, 0.9), Detection(BBox(50, 50, 10, 10), 0.5)],
        "b": [Detection(g, 0.8)],
    }
    rep = match_report(gt, pred)
    assert (rep["ground_truth"], rep["predicted"], rep["matched"]) == (3, 2, 1)
    assert [r["image_id"] for r in rep["images"]] == ["a", "b", "c"]
    assert match_report(gt, gt_as_pred(gt))["matched"] == 3
    assert match_report(gt, {})["matched"] == 0


def gt_as_pred(gt):
    return {k: [Detection(g.box, 1.0, g.codepoint) for g in v] for k, v in gt.items()}
