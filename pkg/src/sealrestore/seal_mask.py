"""Red-seal candidate detection and mask dilation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidKernelError
from .image_core import as_image, as_mask


@dataclass(frozen=True)
class RestoreParams:
    """Every knob of the seal-removal stage.

    ``tau_r`` is the minimum red intensity, ``tau_rg``/``tau_rb`` the required
    red-over-green and red-over-blue ratios, ``k``/``t`` the side and
    iteration count of the square dilation, and ``rho`` the inpainting radius.
    """

    tau_r: float = 90.0
    tau_rg: float = 1.3
    tau_rb: float = 1.3
    k: int = 3
    t: int = 1
    rho: float = 3.0

    def __post_init__(self):
        if not 0 <= self.tau_r <= 255:
            raise ValueError(f"tau_r must lie in [0, 255], got {self.tau_r}")
        if self.tau_rg < 1 or self.tau_rb < 1:
            raise ValueError("channel ratios must be >= 1")
        _check_kernel(self.k)
        if self.t < 0:
            raise ValueError(f"dilation iterations must be >= 0, got {self.t}")
        if self.rho < 1:
            raise ValueError(f"inpainting radius must be >= 1, got {self.rho}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RestoreParams":
        return cls(**{k: d[k] for k in ("tau_r", "tau_rg", "tau_rb", "k", "t", "rho") if k in d})


def _check_kernel(k) -> None:
    if int(k) != k or k < 1 or k % 2 == 0:
        raise InvalidKernelError(f"kernel side must be a positive odd integer, got {k}")


def detect_seal_mask(img: np.ndarray, params: RestoreParams = RestoreParams()) -> np.ndarray:
    """Mark pixels with R >= tau_r, R >= tau_rg*G and R >= tau_rb*B.

    All three comparisons are inclusive and done in float64 so ``tau * G`` is
    never truncated.
    """
    img = as_image(img)
    rgb = img.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    return (r >= params.tau_r) & (r >= params.tau_rg * g) & (r >= params.tau_rb * b)


def _dilate_axis(m: np.ndarray, half: int, axis: int) -> np.ndarray:
    out = m.copy()
    n = m.shape[axis]
    for s in range(1, min(half, n - 1) + 1):
        if axis == 0:
            out[s:, :] |= m[:-s, :]
            out[:-s, :] |= m[s:, :]
        else:
            out[:, s:] |= m[:, :-s]
            out[:, :-s] |= m[:, s:]
    return out


def dilate(mask: np.ndarray, k: int = 3, t: int = 1) -> np.ndarray:
    """``t``-fold binary dilation with a ``k`` x ``k`` square of ones.

    Pixels outside the image count as unset, so nothing wraps around the
    border.
    """
    _check_kernel(k)
    if t < 0:
        raise ValueError(f"dilation iterations must be >= 0, got {t}")
    m = as_mask(mask).copy()
    if t == 0 or k == 1:
        return m
    # t passes of a k-square equal one pass of a (t*(k-1)+1)-square, and the
    # square is separable into a row pass and a column pass.
    half = t * (k // 2)
    return _dilate_axis(_dilate_axis(m, half, 0), half, 1)


def mask_coverage(mask: np.ndarray) -> float:
    mask = as_mask(mask)
    if mask.size == 0:
        return 0.0
    return float(np.count_nonzero(mask)) / mask.size
