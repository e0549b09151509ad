import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import ssim_direct
from sealrestore.errors import DimensionMismatchError, TooSmallError
from sealrestore.image_core import save_image
from sealrestore.metrics import (
    MetricsReport,
    evaluate_set,
    gaussian_window,
    mse,
    psnr,
    ssim,
)

pairs = st.tuples(st.integers(11, 20), st.integers(11, 20)).flatmap(
    lambda s: st.tuples(arrays(np.uint8, s + (3,)), arrays(np.uint8, s + (3,)))
)


def test_mse_examples():
    a = np.full((3, 4, 3), 50, np.uint8)
    assert mse(a, a) == 0
    assert mse(a, a + 16) == 256
    assert mse(np.zeros((1, 1, 3), np.uint8), np.array([[[3, 0, 0]]], np.uint8)) == 3


def test_psnr_examples():
    a = np.full((4, 4, 3), 20, np.uint8)
    assert psnr(a, a) == math.inf
    assert psnr(a, a + 16) == pytest.approx(10 * math.log10(65025 / 256), abs=1e-12)
    assert psnr(a, a + 16) == pytest.approx(24.049, abs=0.01)


def test_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        mse(np.zeros((2, 2, 3), np.uint8), np.zeros((2, 3, 3), np.uint8))
    with pytest.raises(DimensionMismatchError):
        ssim(np.zeros((12, 12)), np.zeros((12, 13)))


def test_ssim_too_small():
    with pytest.raises(TooSmallError):
        ssim(np.zeros((10, 40)), np.zeros((10, 40)))


def test_ssim_constants():
    c = np.full((12, 12), 100.0)
    assert ssim(c, c) == 1.0
    assert ssim(np.zeros((11, 11)), np.full((11, 11), 255.0)) == pytest.approx(6.5025 / 65031.5025, abs=1e-12)


def test_window():
    g = gaussian_window()
    assert g.size == 11 and g.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.array_equal(g, g[::-1]) and g.argmax() == 5


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(11, 18), st.integers(11, 18))
def test_ssim_matches_direct_sum(seed, h, w):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 255, (2, h, w))
    assert abs(ssim(a, b) - ssim_direct(a, b)) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(pairs)
def test_symmetry_and_range(p):
    a, b = p
    assert psnr(a, b) == psnr(b, a)
    ga, gb = a[..., 0].astype(float), b[..., 0].astype(float)
    assert ssim(ga, gb) == pytest.approx(ssim(gb, ga), abs=1e-12)
    assert -1 <= ssim(ga, gb) <= 1
    assert abs(ssim(ga, ga) - 1) <= 1e-9


def test_psnr_falls_as_noise_grows():
    rng = np.random.default_rng(3)
    clean = rng.integers(60, 196, (32, 32, 3)).astype(np.int64)
    noise = rng.choice([-1, 1], clean.shape)
    values = [psnr(clean.astype(np.uint8), (clean + amp * noise).astype(np.uint8)) for amp in (1, 2, 4, 8, 16, 32, 60)]
    assert all(x > y for x, y in zip(values, values[1:]))


def _write_pair(tmp_path, name, a, b):
    save_image(a, tmp_path / f"{name}_r.png")
    save_image(b, tmp_path / f"{name}_c.png")
    return name, tmp_path / f"{name}_r.png", tmp_path / f"{name}_c.png"


def test_evaluate_set(tmp_path):
    rng = np.random.default_rng(4)
    a = rng.integers(0, 200, (16, 16, 3), dtype=np.uint8)
    items = [
        _write_pair(tmp_path, "same", a, a),
        _write_pair(tmp_path, "off4", a, a + 4),
        _write_pair(tmp_path, "off16", a, a + 16),
        ("missing", tmp_path / "nope.png", tmp_path / "same_c.png"),
        _write_pair(tmp_path, "shape", a, a[:12]),
    ]
    for jobs in (1, 3):
        rep = evaluate_set(items, jobs=jobs)
        assert [s.image_id for s in rep.per_image] == ["same", "off4", "off16", "missing", "shape"]
        assert rep.inf_count == 1
        assert [f.image_id for f in rep.failures] == ["missing", "shape"]
        assert rep.mean_psnr_db == pytest.approx((psnr(a, a + 4) + psnr(a, a + 16)) / 2)
        d = json.loads(rep.to_json())
        assert d["per_image"][0]["psnr_db"] == "inf" and d["inf_psnr_count"] == 1
        lines = rep.to_csv().splitlines()
        assert lines[0] == "image_id,psnr_db,ssim" and lines[1].startswith("same,inf,1.000000")


def test_evaluate_two_tuples_use_stem(tmp_path):
    a = np.zeros((12, 12, 3), np.uint8)
    _, r, c = _write_pair(tmp_path, "x", a, a)
    assert evaluate_set([(r, c)]).per_image[0].image_id == "x_r"


def test_empty_report():
    rep = MetricsReport()
    assert rep.mean_psnr_db is None and rep.mean_ssim is None
