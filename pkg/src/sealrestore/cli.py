"""Command-line front end.

Subcommands: synth, mask, restore, eval, sweep, match, crop, overlay,
pipeline. Run ``sealrestore <command> -h`` for the flags of each one.

Exit status is 0 on success, 1 when some items failed (the rest are still
written and the failures are reported), and 2 for an invalid invocation.
Set ``SEALRESTORE_LOG`` to a logging level name (``DEBUG``, ``INFO`` ...)
to see progress messages.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .boxes import (
    DEFAULT_CONFIDENCE,
    DEFAULT_IOU,
    codepoint_to_char,
    crop,
    filter_by_confidence,
    format_codepoint,
    match_report,
    read_ground_truth_dir,
    read_predictions,
)
from .errors import SealRestoreError
from .image_core import load_image, save_image, save_mask
from .inpaint import BACKEND, restore_document
from .metrics import MetricsReport, evaluate_set, score_pair
from .overlay import OverlayStyle, render_overlay
from .seal_mask import RestoreParams, detect_seal_mask, dilate, mask_coverage
from .synth import (
    DEFAULT_OPACITY,
    DEFAULT_SEALS,
    WHITE_THRESHOLD,
    generate_synthetic,
    load_template,
    make_page,
    make_seal_template,
)

log = logging.getLogger("sealrestore")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


class UsageError(Exception):
    """Bad arguments that argparse itself cannot catch."""


# -- helpers ----------------------------------------------------------------

def _configure_logging() -> None:
    name = os.environ.get("SEALRESTORE_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def list_images(path: str | os.PathLike) -> list[Path]:
    """A single image file, or every PNG/JPEG directly inside a directory."""
    path = Path(path)
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if path.is_file():
        return [path]
    raise UsageError(f"no such file or directory: {path}")


def _gather_images(paths) -> list[Path]:
    out = []
    for p in paths:
        out.extend(list_images(p))
    if not out:
        raise UsageError("no input images found")
    return out


def _pool_map(fn, items, jobs: int):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _params_from_args(args) -> RestoreParams:
    return RestoreParams(
        tau_r=args.tau_r, tau_rg=args.tau_rg, tau_rb=args.tau_rb,
        k=args.kernel, t=args.iters, rho=args.radius,
    )


def _write_text(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _machine() -> dict:
    return {
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "python": platform.python_version(),
        "cpus": os.cpu_count(),
        "backend": BACKEND,
    }


# -- synth ------------------------------------------------------------------

def _sub_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def cmd_synth(args) -> int:
    out = Path(args.output)
    rng_templates = np.random.SeedSequence([args.seed, 1])
    if args.templates:
        templates = [load_template(p, args.white_threshold) for p in list_images(args.templates)]
    else:
        templates = [make_seal_template(np.random.default_rng(s))
                     for s in rng_templates.spawn(args.n_templates)]
    if args.pages:
        sources = [(p.stem, p) for p in list_images(args.pages)]
    else:
        sources = [(f"page_{i:03d}", None) for i in range(args.count)]
    for sub in ("synthetic", "clean", "masks", "placements"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    failures = 0
    for i, (page_id, src) in enumerate(sources):
        try:
            if src is None:
                page = make_page(args.width, args.height, _sub_seed(args.seed, 2, i))
            else:
                page = load_image(src)
            syn, placements, mask = generate_synthetic(
                page, templates, n=args.n, seed=_sub_seed(args.seed, 3, i), opacity=args.opacity,
            )
        except (OSError, SealRestoreError) as exc:
            log.error("%s: %s", page_id, exc)
            failures += 1
            continue
        save_image(syn, out / "synthetic" / f"{page_id}.png")
        save_image(page, out / "clean" / f"{page_id}.png")
        save_mask(mask, out / "masks" / f"{page_id}.png")
        record = {"image_id": page_id, "seed": args.seed, "n": args.n, "opacity": args.opacity,
                  "placements": [p.to_dict() for p in placements]}
        (out / "placements" / f"{page_id}.json").write_text(json.dumps(record, indent=2) + "\n")
        log.info("%s: placed %d seals", page_id, len(placements))
    return EXIT_PARTIAL if failures else EXIT_OK


# -- mask / restore ---------------------------------------------------------

def cmd_mask(args) -> int:
    params = _params_from_args(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)

    def work(path):
        try:
            img = load_image(path)
        except (OSError, SealRestoreError) as exc:
            return {"image_id": path.stem, "error": str(exc)}
        mask = dilate(detect_seal_mask(img, params), params.k, params.t)
        save_mask(mask, out / f"{path.stem}_mask.png")
        return {"image_id": path.stem, "mask_coverage": mask_coverage(mask)}

    rows = _pool_map(work, _gather_images(args.inputs), args.jobs)
    _emit_rows(rows, ["image_id", "mask_coverage"], args.format)
    return EXIT_PARTIAL if any("error" in r for r in rows) else EXIT_OK


def restore_file(path: Path, out: Path, params: RestoreParams, gradient: bool = True) -> dict:
    """Restore one file into ``out``; returns its summary record."""
    img = load_image(path)
    t0 = time.perf_counter()
    restored, mask = restore_document(img, params, gradient=gradient)
    seconds = time.perf_counter() - t0
    save_image(restored, out / f"{path.stem}.png")
    save_mask(mask, out / f"{path.stem}_mask.png")
    summary = {
        "image_id": path.stem,
        "source": str(path),
        "width": int(img.shape[1]),
        "height": int(img.shape[0]),
        "mask_coverage": mask_coverage(mask),
        "seconds": seconds,
        "params": params.to_dict(),
        "gradient": gradient,
        "backend": BACKEND,
    }
    (out / f"{path.stem}.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def cmd_restore(args) -> int:
    params = _params_from_args(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)

    def work(path):
        try:
            return restore_file(path, out, params, not args.no_gradient)
        except (OSError, SealRestoreError) as exc:
            log.error("%s: %s", path, exc)
            return {"image_id": path.stem, "error": str(exc)}

    rows = _pool_map(work, _gather_images(args.inputs), args.jobs)
    _emit_rows(rows, ["image_id", "mask_coverage", "seconds"], args.format)
    return EXIT_PARTIAL if any("error" in r for r in rows) else EXIT_OK


def _emit_rows(rows, columns, fmt, path: Path | None = None) -> None:
    if fmt == "json":
        _write_text(path, json.dumps(rows, indent=2) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns + ["error"])
    for r in rows:
        writer.writerow([r.get(c, "") for c in columns] + [r.get("error", "")])
    _write_text(path, buf.getvalue())


# -- eval / sweep -----------------------------------------------------------

def pair_by_stem(restored_dir, reference_dir) -> list[tuple[str, Path, Path]]:
    """Match images in two directories by file stem, in sorted order."""
    refs = {p.stem: p for p in list_images(reference_dir)}
    pairs = []
    for p in list_images(restored_dir):
        if p.stem in refs:
            pairs.append((p.stem, p, refs[p.stem]))
        else:
            log.warning("%s: no reference image, skipped", p.name)
    if not pairs:
        raise UsageError(f"no images in {restored_dir} have a counterpart in {reference_dir}")
    return pairs


def _emit_report(report: MetricsReport, fmt: str, path: Path | None) -> None:
    _write_text(path, report.to_json() + "\n" if fmt == "json" else report.to_csv())


def cmd_eval(args) -> int:
    report = evaluate_set(pair_by_stem(args.restored, args.reference), jobs=args.jobs)
    _emit_report(report, args.format, Path(args.output) if args.output else None)
    for f in report.failures:
        log.error("%s: %s", f.image_id, f.error)
    return EXIT_PARTIAL if report.failures else EXIT_OK


@dataclass(frozen=True)
class SweepGrid:
    """Cells of a threshold sweep: every ``tau_r`` crossed with every ratio.

    Each ratio is used for both ``tau_rg`` and ``tau_rb``; ``k``, ``t`` and
    ``rho`` stay fixed at ``base``.
    """

    tau_r: tuple = (80.0, 90.0)
    ratios: tuple = (1.2, 1.3, 1.4, 1.5)
    base: RestoreParams = RestoreParams()

    def __post_init__(self):
        if not self.tau_r or not self.ratios:
            raise ValueError("sweep grid needs at least one tau_r and one ratio")
        if any(r < 1 for r in self.ratios):
            raise ValueError("ratios must be >= 1")

    def cells(self) -> list[RestoreParams]:
        return [replace(self.base, tau_r=float(tr), tau_rg=float(r), tau_rb=float(r))
                for tr in self.tau_r for r in self.ratios]


@dataclass
class SweepRow:
    tau_r: float | None
    ratio: float | None
    report: MetricsReport

    @property
    def mean_psnr_db(self):
        return self.report.mean_psnr_db

    @property
    def mean_ssim(self):
        return self.report.mean_ssim


@dataclass
class SweepResult:
    baseline: SweepRow
    rows: list[SweepRow] = field(default_factory=list)

    def best(self) -> SweepRow:
        """The restored cell with the highest mean PSNR (first one on ties)."""
        def key(row):
            v = row.mean_psnr_db
            return -math.inf if v is None else v
        return max(self.rows, key=key)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau_r", "tau_rg", "tau_rb", "psnr_db", "ssim"])
        for row in [self.baseline] + self.rows:
            cfg = ["--"] * 3 if row.tau_r is None else [_g(row.tau_r), _g(row.ratio), _g(row.ratio)]
            writer.writerow(cfg + [_fmt(row.mean_psnr_db, 4), _fmt(row.mean_ssim, 6)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        def cell(row):
            return {"tau_r": row.tau_r, "tau_rg": row.ratio, "tau_rb": row.ratio,
                    "psnr_db": row.mean_psnr_db, "ssim": row.mean_ssim,
                    "inf_psnr_count": row.report.inf_count}
        best = self.best()
        return {"baseline": cell(self.baseline), "cells": [cell(r) for r in self.rows],
                "best": {"tau_r": best.tau_r, "ratio": best.ratio, "psnr_db": best.mean_psnr_db}}


def _g(v) -> str:
    return f"{v:g}"


def _fmt(v, digits) -> str:
    return "" if v is None else f"{v:.{digits}f}"


def run_sweep(pairs, grid: SweepGrid = SweepGrid(), jobs: int = 1,
              gradient: bool = True) -> SweepResult:
    """Evaluate every grid cell on in-memory ``(image_id, synthetic, clean)`` triples.

    The baseline row scores the synthetic images against the clean ones with
    no restoration at all.
    """
    pairs = list(pairs)

    def score_all(fn) -> MetricsReport:
        def one(item):
            image_id, syn, clean = item
            return score_pair(fn(syn), clean, image_id)
        return MetricsReport(per_image=_pool_map(one, pairs, jobs))

    result = SweepResult(baseline=SweepRow(None, None, score_all(lambda syn: syn)))
    for params in grid.cells():
        t0 = time.perf_counter()
        report = score_all(lambda syn, p=params: restore_document(syn, p, gradient=gradient)[0])
        log.info("cell tau_r=%g ratio=%g: %.3f dB (%.1f s)", params.tau_r, params.tau_rg,
                 report.mean_psnr_db or float("nan"), time.perf_counter() - t0)
        result.rows.append(SweepRow(params.tau_r, params.tau_rg, report))
    return result


def cmd_sweep(args) -> int:
    if args.suite:
        syn_dir, clean_dir = Path(args.suite) / "synthetic", Path(args.suite) / "clean"
    elif args.synthetic and args.clean:
        syn_dir, clean_dir = Path(args.synthetic), Path(args.clean)
    else:
        raise UsageError("give --suite DIR or both --synthetic and --clean")
    triples = []
    failures = 0
    for image_id, syn_path, clean_path in pair_by_stem(syn_dir, clean_dir):
        try:
            triples.append((image_id, load_image(syn_path), load_image(clean_path)))
        except (OSError, SealRestoreError) as exc:
            log.error("%s: %s", image_id, exc)
            failures += 1
    if not triples:
        raise UsageError("no loadable image pairs")
    base = _params_from_args(args)
    grid = SweepGrid(tuple(args.tau_r_values), tuple(args.ratio_values), base)
    result = run_sweep(triples, grid, jobs=args.jobs, gradient=not args.no_gradient)
    out = Path(args.output) if args.output else None
    if args.format == "json":
        _write_text(out, json.dumps(result.to_dict(), indent=2) + "\n")
    else:
        _write_text(out, result.to_csv())
    best = result.best()
    print(f"best: tau_r={_g(best.tau_r)} ratio={_g(best.ratio)} "
          f"psnr={best.mean_psnr_db:.4f} dB ssim={best.mean_ssim:.6f}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


# -- match / crop / overlay -------------------------------------------------

def _read_predictions_or_empty(path):
    return read_predictions(path) if path else {}


def cmd_match(args) -> int:
    gt = read_ground_truth_dir(args.gt)
    pred = _read_predictions_or_empty(args.pred)
    report = match_report(gt, pred, threshold=args.iou, theta=args.conf)
    out = Path(args.output) if args.output else None
    if args.format == "json":
        _write_text(out, json.dumps(report, indent=2) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["image_id", "ground_truth", "predicted", "matched"])
        for row in report["images"]:
            writer.writerow([row["image_id"], row["ground_truth"], row["predicted"], row["matched"]])
        writer.writerow(["total", report["ground_truth"], report["predicted"], report["matched"]])
        _write_text(out, buf.getvalue())
    return EXIT_OK


def _crop_name(image_id: str, k: int, det) -> str:
    label = format_codepoint(det.label).replace("+", "") if det.label is not None else "none"
    return f"{image_id}_{k:04d}_{label}.png"


def write_crops(img: np.ndarray, image_id: str, dets, out: Path) -> list[dict]:
    """Save one PNG per detection and return a record per crop."""
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for k, det in enumerate(dets):
        name = _crop_name(image_id, k, det)
        save_image(crop(img, det.box), out / name)
        records.append({
            "file": name,
            "box": [det.box.x, det.box.y, det.box.w, det.box.h],
            "confidence": det.confidence,
            "unicode": None if det.label is None else format_codepoint(det.label),
        })
    return records


def cmd_crop(args) -> int:
    img = load_image(args.image)
    image_id = args.image_id or Path(args.image).stem
    dets = filter_by_confidence(read_predictions(args.pred).get(image_id, []), args.conf)
    records = write_crops(img, image_id, dets, Path(args.output))
    print(json.dumps({"image_id": image_id, "crops": records}, indent=2, ensure_ascii=False))
    return EXIT_OK


def _style_from_args(args) -> OverlayStyle:
    return OverlayStyle(
        box_color=args.box_color, box_stroke_width=args.stroke_width,
        show_boxes=not args.hide_boxes, text_color=args.text_color,
        font_size=args.font_size, font_family=args.font_family,
    )


def _overlay_items(dets):
    return [(d.box, codepoint_to_char(d.label)) for d in dets if d.label is not None]


def cmd_overlay(args) -> int:
    image = Path(args.image)
    img = load_image(image)
    image_id = args.image_id or image.stem
    dets = filter_by_confidence(read_predictions(args.pred).get(image_id, []), args.conf)
    out = Path(args.output)
    href = os.path.relpath(image.resolve(), out.resolve().parent)
    svg = render_overlay(image if args.embed else href, (img.shape[1], img.shape[0]),
                         _overlay_items(dets), _style_from_args(args), embed=args.embed)
    _write_text(out, svg)
    return EXIT_OK


# -- pipeline ---------------------------------------------------------------

@dataclass
class PipelineConfig:
    input_dir: str
    output_dir: str
    predictions: str | None = None
    ground_truth: str | None = None
    params: RestoreParams = RestoreParams()
    confidence: float = DEFAULT_CONFIDENCE
    iou: float = DEFAULT_IOU
    style: OverlayStyle = OverlayStyle()
    embed: bool = False
    gradient: bool = True

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise UsageError(f"confidence threshold must lie in [0, 1], got {self.confidence}")

    def check_paths(self) -> None:
        inp = Path(self.input_dir).resolve()
        out = Path(self.output_dir).resolve()
        if inp == out or inp in out.parents or out in inp.parents:
            raise UsageError("output directory must be separate from the input directory")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.to_dict()
        d["style"] = asdict(self.style)
        for key in ("input_dir", "predictions", "ground_truth"):
            if d[key] is not None:
                d[key] = str(Path(d[key]).resolve())
        return d

    @classmethod
    def from_dict(cls, d: dict, output_dir: str | None = None) -> "PipelineConfig":
        return cls(
            input_dir=d["input_dir"],
            output_dir=output_dir or d["output_dir"],
            predictions=d.get("predictions"),
            ground_truth=d.get("ground_truth"),
            params=RestoreParams.from_dict(d.get("params", {})),
            confidence=d.get("confidence", DEFAULT_CONFIDENCE),
            iou=d.get("iou", DEFAULT_IOU),
            style=OverlayStyle(**d.get("style", {})),
            embed=d.get("embed", False),
            gradient=d.get("gradient", True),
        )


def _pipeline_image(path: Path, cfg: PipelineConfig, preds: dict) -> dict:
    out = Path(cfg.output_dir)
    image_id = path.stem
    rec = {"image_id": image_id, "source": str(path.resolve())}
    try:
        img = load_image(path)
    except (OSError, SealRestoreError) as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
        return rec
    t0 = time.perf_counter()
    restored, mask = restore_document(img, cfg.params, gradient=cfg.gradient)
    rec["seconds"] = time.perf_counter() - t0
    rec["mask_coverage"] = mask_coverage(mask)
    restored_path = out / "restored" / f"{image_id}.png"
    save_image(restored, restored_path)
    save_mask(mask, out / "masks" / f"{image_id}.png")
    rec["restored"] = restored_path.relative_to(out).as_posix()
    rec["mask"] = f"masks/{image_id}.png"

    all_dets = preds.get(image_id, [])
    dets = filter_by_confidence(all_dets, cfg.confidence)
    rec["detections"] = len(all_dets)
    rec["crops"] = []
    if dets:
        crops = write_crops(restored, image_id, dets, out / "crops" / image_id)
        for c in crops:
            c["file"] = f"crops/{image_id}/{c['file']}"
        rec["crops"] = crops
    items = _overlay_items(dets)
    rec["overlay"] = None
    if items:
        svg_path = out / "overlays" / f"{image_id}.svg"
        svg_path.parent.mkdir(parents=True, exist_ok=True)
        href = restored_path if cfg.embed else f"../restored/{image_id}.png"
        svg_path.write_text(render_overlay(href, (img.shape[1], img.shape[0]), items,
                                           cfg.style, embed=cfg.embed), encoding="utf-8")
        rec["overlay"] = svg_path.relative_to(out).as_posix()
    return rec


def run_pipeline(cfg: PipelineConfig, jobs: int = 1) -> dict:
    """Restore, crop and overlay every image of ``cfg.input_dir``.

    Writes go only under ``cfg.output_dir``; ``manifest.json`` there records
    the configuration, per-image results and timings. Passing that manifest
    back through ``PipelineConfig.from_dict`` repeats the run.
    """
    cfg.check_paths()
    images = list_images(cfg.input_dir)
    preds = read_predictions(cfg.predictions) if cfg.predictions else {}
    out = Path(cfg.output_dir)
    for sub in ("restored", "masks"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    known = {p.stem for p in images}
    for image_id in sorted(set(preds) - known):
        log.warning("predictions for %s have no matching input image", image_id)

    t0 = time.perf_counter()
    records = _pool_map(lambda p: _pipeline_image(p, cfg, preds), images, jobs)
    manifest = {
        "tool": "sealrestore",
        "version": __version__,
        "config": cfg.to_dict(),
        "images": records,
        "failed": [r["image_id"] for r in records if "error" in r],
        "total_seconds": time.perf_counter() - t0,
        "machine": _machine(),
    }
    if cfg.ground_truth:
        gt = read_ground_truth_dir(cfg.ground_truth)
        manifest["match"] = match_report(gt, preds, threshold=cfg.iou, theta=cfg.confidence)
    files = []
    for r in records:
        for key in ("restored", "mask", "overlay"):
            if r.get(key):
                files.append(r[key])
        files.extend(c["file"] for c in r.get("crops", []))
    manifest["files"] = sorted(files)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n",
                                       encoding="utf-8")
    return manifest


def cmd_pipeline(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            recorded = json.load(fh)
        cfg = PipelineConfig.from_dict(recorded.get("config", recorded), args.output)
    else:
        if not args.input or not args.output:
            raise UsageError("pipeline needs --input and --output (or --config)")
        cfg = PipelineConfig(
            input_dir=args.input, output_dir=args.output, predictions=args.pred,
            ground_truth=args.gt, params=_params_from_args(args), confidence=args.conf,
            iou=args.iou, style=_style_from_args(args), embed=args.embed,
            gradient=not args.no_gradient,
        )
    manifest = run_pipeline(cfg, jobs=args.jobs)
    for image_id in manifest["failed"]:
        log.error("%s failed; see manifest", image_id)
    return EXIT_PARTIAL if manifest["failed"] else EXIT_OK


# -- argument parsing -------------------------------------------------------

def _add_restore_flags(p) -> None:
    d = RestoreParams()
    g = p.add_argument_group("seal removal")
    g.add_argument("--tau-r", type=float, default=d.tau_r, help="minimum red intensity (default %(default)s)")
    g.add_argument("--tau-rg", type=float, default=d.tau_rg, help="minimum R/G ratio (default %(default)s)")
    g.add_argument("--tau-rb", type=float, default=d.tau_rb, help="minimum R/B ratio (default %(default)s)")
    g.add_argument("--kernel", type=int, default=d.k, help="dilation square side, odd (default %(default)s)")
    g.add_argument("--iters", type=int, default=d.t, help="dilation passes, 0 disables (default %(default)s)")
    g.add_argument("--radius", type=float, default=d.rho, help="inpainting radius in pixels (default %(default)s)")
    g.add_argument("--no-gradient", action="store_true",
                   help="drop the first-order gradient correction when inpainting")


def _add_jobs(p) -> None:
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker threads (default: logical cores)")


def _add_format(p) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_conf(p) -> None:
    p.add_argument("--conf", type=float, default=DEFAULT_CONFIDENCE,
                   help="keep detections scoring strictly above this (default %(default)s)")


def _add_style_flags(p) -> None:
    d = OverlayStyle()
    g = p.add_argument_group("overlay style")
    g.add_argument("--box-color", default=d.box_color)
    g.add_argument("--stroke-width", type=float, default=d.box_stroke_width)
    g.add_argument("--hide-boxes", action="store_true")
    g.add_argument("--text-color", default=d.text_color)
    g.add_argument("--font-size", type=float, default=d.font_size)
    g.add_argument("--font-family", default=d.font_family)
    g.add_argument("--embed", action="store_true", help="inline the page image as base64")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sealrestore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="overlay seals on clean pages")
    p.add_argument("--pages", help="directory of clean page images (default: procedural pages)")
    p.add_argument("--templates", help="directory of seal images (default: procedural seals)")
    p.add_argument("--count", type=int, default=20, help="procedural pages to make")
    p.add_argument("--width", type=int, default=480)
    p.add_argument("--height", type=int, default=640)
    p.add_argument("--n-templates", type=int, default=8, help="procedural seals to make")
    p.add_argument("--n", type=int, default=DEFAULT_SEALS, help="seals per page")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--opacity", type=float, default=DEFAULT_OPACITY)
    p.add_argument("--white-threshold", type=int, default=WHITE_THRESHOLD)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("mask", help="write seal masks")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    _add_restore_flags(p)
    _add_jobs(p)
    _add_format(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("restore", help="remove seals from images")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    _add_restore_flags(p)
    _add_jobs(p)
    _add_format(p)
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("eval", help="PSNR/SSIM of restored images against references")
    p.add_argument("--restored", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("-o", "--output")
    _add_jobs(p)
    _add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="score a grid of detection thresholds")
    p.add_argument("--suite", help="directory written by `synth` (synthetic/ and clean/)")
    p.add_argument("--synthetic")
    p.add_argument("--clean")
    p.add_argument("--tau-r-values", type=float, nargs="+", default=[80.0, 90.0])
    p.add_argument("--ratio-values", type=float, nargs="+", default=[1.2, 1.3, 1.4, 1.5])
    p.add_argument("-o", "--output")
    _add_restore_flags(p)
    _add_jobs(p)
    _add_format(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("match", help="count IoU matches between ground truth and predictions")
    p.add_argument("--gt", required=True, help="ground-truth CSV or directory of CSVs")
    p.add_argument("--pred", help="predictions JSONL")
    p.add_argument("--iou", type=float, default=DEFAULT_IOU)
    p.add_argument("-o", "--output")
    _add_conf(p)
    _add_format(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("crop", help="cut confident detections out of an image")
    p.add_argument("--image", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--image-id", help="id used in the predictions (default: file stem)")
    p.add_argument("-o", "--output", required=True)
    _add_conf(p)
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("overlay", help="render labelled boxes over an image as SVG")
    p.add_argument("--image", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--image-id")
    p.add_argument("-o", "--output", required=True)
    _add_conf(p)
    _add_style_flags(p)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("pipeline", help="restore, crop and overlay a directory of pages")
    p.add_argument("--input")
    p.add_argument("-o", "--output")
    p.add_argument("--pred")
    p.add_argument("--gt")
    p.add_argument("--iou", type=float, default=DEFAULT_IOU)
    p.add_argument("--config", help="manifest.json of an earlier run to repeat")
    _add_restore_flags(p)
    _add_conf(p)
    _add_style_flags(p)
    _add_jobs(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sealrestore {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, SealRestoreError, FileNotFoundError) as exc:
        # bad parameters or unreadable inputs named on the command line
        print(f"sealrestore {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
