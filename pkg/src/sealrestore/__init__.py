"""Red-seal removal and evaluation tools for scanned document pages."""

__version__ = "0.1.0"

from .boxes import (
    BBox,
    Detection,
    GroundTruth,
    MatchResult,
    codepoint_to_char,
    crop,
    filter_by_confidence,
    iou,
    match_boxes,
)
from .errors import SealRestoreError
from .image_core import load_image, save_image, to_gray
from .inpaint import BACKEND, inpaint_fmm, restore_document, solve_eikonal
from .metrics import MetricsReport, evaluate_set, mse, psnr, ssim
from .overlay import OverlayStyle, render_overlay
from .seal_mask import RestoreParams, detect_seal_mask, dilate, mask_coverage
from .synth import SealPlacement, SealTemplate, composite_seal, generate_synthetic

__all__ = [
    "BACKEND", "BBox", "Detection", "GroundTruth", "MatchResult", "MetricsReport",
    "OverlayStyle", "RestoreParams", "SealPlacement", "SealRestoreError", "SealTemplate",
    "codepoint_to_char", "composite_seal", "crop", "detect_seal_mask", "dilate",
    "evaluate_set", "filter_by_confidence", "generate_synthetic", "inpaint_fmm", "iou",
    "load_image", "mask_coverage", "match_boxes", "mse", "psnr", "render_overlay",
    "restore_document", "save_image", "solve_eikonal", "ssim", "to_gray",
]
