"""Pixel buffers, luma conversion and PNG/JPEG file I/O.

Images are plain numpy arrays so every module can slice and broadcast them
directly:

* colour image: ``(height, width, 3)`` ``uint8``, channels R, G, B
* seal mask: ``(height, width)`` ``bool``
* gray image: ``(height, width)`` ``float64`` in ``[0, 255]``

Coordinates are (x right, y down) with the origin at the top-left pixel, so
pixel ``(x, y)`` is ``img[y, x]``.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import DecodeError, DimensionMismatchError, ZeroDimensionError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_DECODABLE = {"PNG", "JPEG"}


def as_image(data) -> np.ndarray:
    """Validate ``data`` as an RGB image and return it as a ``uint8`` array.

    Integer or float input is accepted if every sample already lies in
    ``[0, 255]``; nothing is clipped silently.
    """
    arr = np.asarray(data)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionMismatchError(f"expected an (H, W, 3) array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ZeroDimensionError(f"image has zero extent: {arr.shape[1]}x{arr.shape[0]}")
    if arr.dtype == np.uint8:
        return arr
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise ValueError("image samples must lie in [0, 255]")
    if np.issubdtype(arr.dtype, np.floating) and not np.array_equal(arr, np.round(arr)):
        raise ValueError("float image samples must be integral")
    return arr.astype(np.uint8)


def as_mask(data, shape: tuple[int, int] | None = None) -> np.ndarray:
    mask = np.asarray(data)
    if mask.ndim != 2:
        raise DimensionMismatchError(f"expected an (H, W) mask, got shape {mask.shape}")
    if shape is not None and mask.shape != tuple(shape):
        raise DimensionMismatchError(f"mask shape {mask.shape} does not match image {tuple(shape)}")
    return mask.astype(bool, copy=False)


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def _flatten_alpha(pil: PILImage.Image) -> PILImage.Image:
    has_alpha = pil.mode in ("RGBA", "LA", "PA") or (
        pil.mode == "P" and "transparency" in pil.info
    )
    if not has_alpha:
        return pil.convert("RGB")
    rgba = pil.convert("RGBA")
    white = PILImage.new("RGBA", rgba.size, (255, 255, 255, 255))
    return PILImage.alpha_composite(white, rgba).convert("RGB")


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Decode a PNG or JPEG file into an ``(H, W, 3)`` ``uint8`` array.

    Grayscale sources are replicated across the three channels and any alpha
    channel is composited over white.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    try:
        with PILImage.open(path) as pil:
            if pil.format not in _DECODABLE:
                raise DecodeError(f"{path}: unsupported format {pil.format!r}")
            pil.load()
            rgb = _flatten_alpha(pil)
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    arr = np.asarray(rgb, dtype=np.uint8)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ZeroDimensionError(f"{path}: decoded image has zero extent")
    return arr.copy()


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write ``img`` as a lossless RGB PNG."""
    img = as_image(img)
    PILImage.fromarray(np.ascontiguousarray(img)).save(Path(path), format="PNG")


def save_mask(mask: np.ndarray, path: str | os.PathLike) -> None:
    """Write a boolean mask as a 1-bit PNG (white = seal)."""
    mask = as_mask(mask)
    PILImage.fromarray(np.ascontiguousarray(mask).astype(np.uint8) * 255).convert("1").save(Path(path), format="PNG")


def load_mask(path: str | os.PathLike) -> np.ndarray:
    img = load_image(path)
    return img[..., 0] >= 128


def to_gray(img: np.ndarray) -> np.ndarray:
    """BT.601 luma, kept in float64 (not re-quantized)."""
    img = as_image(img).astype(np.float64)
    r, g, b = LUMA_WEIGHTS
    return r * img[..., 0] + g * img[..., 1] + b * img[..., 2]
