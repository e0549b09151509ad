import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from sealrestore.errors import DecodeError, DimensionMismatchError, ZeroDimensionError
from sealrestore.image_core import (
    as_image,
    load_image,
    load_mask,
    save_image,
    save_mask,
    to_gray,
)

images = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3)))


def test_load_red_png(tmp_path):
    Image.new("RGB", (2, 2), (255, 0, 0)).save(tmp_path / "r.png")
    img = load_image(tmp_path / "r.png")
    assert img.shape == (2, 2, 3)
    assert (img == [255, 0, 0]).all()


def test_gray_source_replicated(tmp_path):
    Image.new("L", (1, 1), 128).save(tmp_path / "g.png")
    assert load_image(tmp_path / "g.png").tolist() == [[[128, 128, 128]]]


def test_alpha_composited_over_white(tmp_path):
    Image.new("RGBA", (1, 1), (0, 0, 0, 0)).save(tmp_path / "a.png")
    assert load_image(tmp_path / "a.png").tolist() == [[[255, 255, 255]]]
    Image.new("RGBA", (1, 1), (0, 0, 0, 255)).save(tmp_path / "b.png")
    assert load_image(tmp_path / "b.png").tolist() == [[[0, 0, 0]]]


def test_jpeg_loads(tmp_path):
    Image.new("RGB", (8, 8), (10, 200, 30)).save(tmp_path / "x.jpg", quality=95)
    img = load_image(tmp_path / "x.jpg")
    assert img.shape == (8, 8, 3)
    assert np.abs(img.astype(int) - [10, 200, 30]).max() < 8


def test_truncated_file(tmp_path):
    Image.new("RGB", (32, 32), (1, 2, 3)).save(tmp_path / "t.png")
    data = (tmp_path / "t.png").read_bytes()
    (tmp_path / "t.png").write_bytes(data[: len(data) // 2])
    with pytest.raises(DecodeError):
        load_image(tmp_path / "t.png")


def test_unsupported_format(tmp_path):
    Image.new("RGB", (4, 4)).save(tmp_path / "x.bmp")
    with pytest.raises(DecodeError):
        load_image(tmp_path / "x.bmp")
    (tmp_path / "junk.png").write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_image(tmp_path / "junk.png")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.png")


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        save_image(np.zeros((1, 1, 3), np.uint8), tmp_path / "missing" / "x.png")


def test_one_pixel_png(tmp_path):
    save_image(np.array([[[1, 2, 3]]], np.uint8), tmp_path / "p.png")
    with Image.open(tmp_path / "p.png") as im:
        assert im.size == (1, 1) and im.format == "PNG"


def test_as_image_validation():
    with pytest.raises(DimensionMismatchError):
        as_image(np.zeros((4, 4)))
    with pytest.raises(ZeroDimensionError):
        as_image(np.zeros((0, 4, 3)))
    with pytest.raises(ValueError):
        as_image(np.full((2, 2, 3), 256))
    with pytest.raises(ValueError):
        as_image(np.full((2, 2, 3), 0.5))
    assert as_image(np.full((2, 2, 3), 7.0)).dtype == np.uint8


def test_mask_round_trip(tmp_path, rng):
    m = rng.random((9, 13)) < 0.3
    save_mask(m, tmp_path / "m.png")
    assert np.array_equal(load_mask(tmp_path / "m.png"), m)


def test_gray_values():
    img = np.array([[[255, 255, 255], [255, 0, 0], [0, 0, 0]]], np.uint8)
    g = to_gray(img)
    assert g.dtype == np.float64
    assert g[0, 0] == pytest.approx(255.0, abs=1e-9)
    assert g[0, 1] == pytest.approx(76.245, abs=1e-9)
    assert g[0, 2] == 0.0


@settings(max_examples=40, deadline=None)
@given(images)
def test_png_round_trip(tmp_path_factory, img):
    path = tmp_path_factory.mktemp("rt") / "x.png"
    save_image(img, path)
    assert np.array_equal(load_image(path), img)


@given(images, st.integers(0, 2), st.integers(0, 255))
def test_gray_monotone(img, channel, bump):
    raised = img.copy()
    raised[..., channel] = np.maximum(raised[..., channel], bump)
    assert (to_gray(raised) >= to_gray(img) - 1e-9).all()
