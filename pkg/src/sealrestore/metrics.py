"""PSNR / SSIM scoring and restoration reports."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatchError, SealRestoreError, TooSmallError
from .image_core import as_image, check_same_shape, load_image, to_gray

PEAK = 255.0
SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * PEAK) ** 2
SSIM_C2 = (0.03 * PEAK) ** 2

INF_SENTINEL = "inf"


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared difference over all H x W x 3 samples."""
    a, b = as_image(a), as_image(b)
    check_same_shape(a, b)
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """PSNR in dB over the joint RGB samples; ``math.inf`` for identical images."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def gaussian_window(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """1-D Gaussian taps summing to 1; the 2-D window is their outer product."""
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = g.size
    rows = sliding_window_view(x, n, axis=0) @ g
    return sliding_window_view(rows, n, axis=1) @ g


def ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError("ssim expects 2-D gray images")
    check_same_shape(a, b)
    if min(a.shape) < SSIM_WIN:
        raise TooSmallError(f"ssim needs both sides >= {SSIM_WIN}, got {a.shape[1]}x{a.shape[0]}")
    g = gaussian_window()
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a * mu_a
    var_b = _filter_valid(b * b, g) - mu_b * mu_b
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return num / den


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over every 11x11 Gaussian window (sigma 1.5) fully inside the image."""
    return float(np.mean(ssim_map(a, b)))


@dataclass
class ImageScore:
    image_id: str
    psnr_db: float | None = None
    ssim: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class MetricsReport:
    per_image: list[ImageScore] = field(default_factory=list)

    @property
    def scored(self) -> list[ImageScore]:
        return [s for s in self.per_image if s.ok]

    @property
    def inf_count(self) -> int:
        return sum(1 for s in self.scored if math.isinf(s.psnr_db))

    @property
    def failures(self) -> list[ImageScore]:
        return [s for s in self.per_image if not s.ok]

    @property
    def mean_psnr_db(self) -> float | None:
        finite = [s.psnr_db for s in self.scored if not math.isinf(s.psnr_db)]
        return float(np.mean(finite)) if finite else None

    @property
    def mean_ssim(self) -> float | None:
        vals = [s.ssim for s in self.scored]
        return float(np.mean(vals)) if vals else None

    def to_dict(self) -> dict:
        return {
            "per_image": [
                {
                    "image_id": s.image_id,
                    "psnr_db": _fmt_psnr(s.psnr_db),
                    "ssim": s.ssim,
                    **({"error": s.error} if s.error else {}),
                }
                for s in self.per_image
            ],
            "mean_psnr_db": self.mean_psnr_db,
            "mean_ssim": self.mean_ssim,
            "inf_psnr_count": self.inf_count,
            "failed_count": len(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["image_id", "psnr_db", "ssim"])
        for s in self.per_image:
            if s.ok:
                writer.writerow([s.image_id, _fmt_psnr(s.psnr_db), f"{s.ssim:.6f}"])
            else:
                writer.writerow([s.image_id, "", ""])
        return buf.getvalue()


def _fmt_psnr(v):
    if v is None:
        return None
    if math.isinf(v):
        return INF_SENTINEL
    return round(v, 6)


def score_pair(restored: np.ndarray, reference: np.ndarray, image_id: str = "") -> ImageScore:
    return ImageScore(
        image_id=image_id,
        psnr_db=psnr(restored, reference),
        ssim=ssim(to_gray(restored), to_gray(reference)),
    )


def _score_paths(item) -> ImageScore:
    if len(item) == 3:
        image_id, restored, reference = item
    else:
        restored, reference = item
        image_id = Path(restored).stem
    try:
        return score_pair(load_image(restored), load_image(reference), str(image_id))
    except (OSError, ValueError, SealRestoreError) as exc:
        return ImageScore(image_id=str(image_id), error=f"{type(exc).__name__}: {exc}")


def evaluate_set(pairs, jobs: int = 1) -> MetricsReport:
    """Score ``(restored_path, reference_path)`` pairs, keeping input order.

    A pair may also be ``(image_id, restored_path, reference_path)``. Load or
    shape errors are recorded on that item and do not stop the rest.
    """
    pairs = list(pairs)
    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_score_paths, pairs))
    else:
        scores = [_score_paths(p) for p in pairs]
    return MetricsReport(per_image=scores)
