"""Seal removal by fast-marching (Telea) inpainting.

The marching kernels come from the compiled ``_fmm_ext`` module when it is
importable and from the pure-Python ``_fmm_py`` module otherwise. Set
``SEALRESTORE_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from . import _fmm_py
from .errors import EmptyImageError
from .image_core import as_image, as_mask
from .seal_mask import RestoreParams, detect_seal_mask, dilate

log = logging.getLogger(__name__)

_BACKENDS = {"python": _fmm_py}
try:
    from . import _fmm_ext
except ImportError:  # pragma: no cover - depends on the build
    _fmm_ext = None
else:
    _BACKENDS["compiled"] = _fmm_ext

if _fmm_ext is not None and os.environ.get("SEALRESTORE_PURE") != "1":
    BACKEND = "compiled"
else:
    BACKEND = "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _kernels(backend: str | None):
    name = backend or BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}") from None


def solve_eikonal(mask: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Distance from each mask pixel to the known region, by fast marching.

    Known pixels (outside the mask) get 0. Mask pixels get the first-order
    upwind arrival time of a front starting on the known pixels that touch
    the mask, so a lone masked pixel gets 1. A mask covering the whole image
    has no front and yields ``inf`` everywhere.
    """
    mask = as_mask(mask)
    if mask.size == 0:
        return np.zeros(mask.shape)
    return _kernels(backend).eikonal(np.ascontiguousarray(mask))


def inpaint_fmm(img: np.ndarray, mask: np.ndarray, rho: float = 3.0,
                backend: str | None = None, gradient: bool = True) -> np.ndarray:
    """Return a copy of ``img`` with the ``mask`` pixels filled in.

    Pixels are filled in order of distance from the mask boundary. Each new
    value is a weighted mean over known pixels q within ``rho`` of p, where
    each q contributes its value plus a first-order gradient correction
    ``grad I(q) . (p - q)``. The weight is the product of a direction term
    (alignment of ``p - q`` with the front normal, floored at 1e-6), an
    inverse squared distance, and a level-set closeness term
    ``1 / (1 + |T(p) - T(q)|)``. All three channels share the same weights.

    With ``gradient=False`` the correction term is dropped and each q
    contributes its plain value. On large holes the correction can compound
    through already-filled pixels, so the plain variant is sometimes cleaner.

    Pixels outside the mask are returned bit-identical.
    """
    kernels = _kernels(backend)
    img = as_image(img)
    mask = as_mask(mask, img.shape[:2])
    if rho < 1:
        raise ValueError(f"inpainting radius must be >= 1, got {rho}")
    if not mask.any():
        return img.copy()
    if mask.all():
        raise EmptyImageError("mask covers the whole image; nothing to propagate from")
    return kernels.telea(np.ascontiguousarray(img), np.ascontiguousarray(mask),
                         float(rho), bool(gradient))


def restore_document(img: np.ndarray, params: RestoreParams = RestoreParams(),
                     backend: str | None = None,
                     gradient: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Detect red seals, dilate the mask and inpaint it.

    Returns ``(restored, mask)`` where ``mask`` is the dilated mask that was
    actually inpainted.
    """
    img = as_image(img)
    mask = dilate(detect_seal_mask(img, params), params.k, params.t)
    restored = inpaint_fmm(img, mask, params.rho, backend=backend, gradient=gradient)
    return restored, mask
