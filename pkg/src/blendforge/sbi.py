"""Deterministic self-blended-image synthesis.

A pseudo-fake is made from a single real face: the image is duplicated
into a source and a target copy, one copy is color-jittered, the source is
slightly rescaled and translated, and the two are alpha-blended through a
deformed, softened convex-hull mask. The result contains blending
artifacts but no generative fingerprints, and regenerating from the
recorded parameter draw reproduces it bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .geometry import (
    LandmarkSet,
    Mask,
    convex_hull,
    elastic_deform_mask,
    rasterize_polygon,
    soften_mask,
    _wrap_mask,
)
from .image import (
    ColorJitter,
    ImageBuffer,
    apply_color_jitter,
    load_image,
    sample_bilinear,
    save_image,
    _wrap,
)
from .blending import alpha_blend
from .manifest import Label, Manifest, SampleRecord
from .seeding import derive_seed
from .util import ordered_map

__all__ = [
    "ColorJitterRanges",
    "SbiParams",
    "SbiDraw",
    "SbiSample",
    "generate_sbi",
    "apply_sbi_draw",
    "generate_sbi_batch",
]


def _check_range(name: str, lo: float, hi: float) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise InvalidParameterError(f"{name} range ({lo}, {hi}) is empty or invalid")


@dataclass(frozen=True)
class ColorJitterRanges:
    """Per-field sampling bounds for the source/target color jitter."""

    brightness: tuple[float, float] = (-0.3, 0.3)
    contrast: tuple[float, float] = (-0.3, 0.3)
    hue: tuple[float, float] = (-18.0, 18.0)
    saturation: tuple[float, float] = (-0.3, 0.3)

    def __post_init__(self):
        for name in ("brightness", "contrast", "hue", "saturation"):
            _check_range(name, *getattr(self, name))


@dataclass(frozen=True)
class SbiParams:
    """Sampling ranges for one pseudo-fake draw.

    ``mask_blur_sigma`` may include 0; a drawn sigma of exactly 0 keeps the
    mask hard (no softening). ``blend_ratios`` is the discrete set the
    final mask is scaled by.
    """

    jitter: ColorJitterRanges = ColorJitterRanges()
    resize_frac: tuple[float, float] = (0.95, 1.05)
    translate_px: tuple[float, float] = (-8.0, 8.0)
    deform_amplitude: tuple[float, float] = (0.0, 6.0)
    deform_field_sigma: float = 8.0
    mask_blur_sigma: tuple[float, float] = (3.0, 15.0)
    blend_ratios: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)

    def __post_init__(self):
        _check_range("resize_frac", *self.resize_frac)
        _check_range("translate_px", *self.translate_px)
        _check_range("deform_amplitude", *self.deform_amplitude)
        _check_range("mask_blur_sigma", *self.mask_blur_sigma)
        if self.resize_frac[0] <= 0.0:
            raise InvalidParameterError("resize fractions must be positive")
        if self.deform_amplitude[0] < 0.0:
            raise InvalidParameterError("deform amplitude must be non-negative")
        if self.mask_blur_sigma[0] < 0.0:
            raise InvalidParameterError("mask blur sigma must be non-negative")
        if self.deform_field_sigma <= 0.0:
            raise InvalidParameterError("deform field sigma must be positive")
        if not self.blend_ratios:
            raise InvalidParameterError("blend_ratios must be non-empty")
        if any(not 0.0 < r <= 1.0 for r in self.blend_ratios):
            raise InvalidParameterError("blend ratios must lie in (0, 1]")

    @classmethod
    def from_dict(cls, doc: dict) -> "SbiParams":
        """Build from a plain mapping (parameter files, binding calls)."""
        doc = dict(doc)
        jitter = doc.pop("jitter", None)
        kwargs = {
            key: tuple(value) if isinstance(value, (list, tuple)) else value
            for key, value in doc.items()
        }
        try:
            if jitter is not None:
                kwargs["jitter"] = ColorJitterRanges(
                    **{k: tuple(v) for k, v in dict(jitter).items()}
                )
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidParameterError(f"bad SBI parameter mapping: {exc}") from None


@dataclass(frozen=True)
class SbiDraw:
    """One concrete parameter draw; replaying it is bit-exact."""

    jittered_copy: str  # "source" or "target"
    jitter: ColorJitter
    resize_frac: float
    translate: tuple[float, float]
    deform_amplitude: float
    deform_field_sigma: float
    deform_seed: int
    mask_sigma: float
    blend_ratio: float

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["jitter"] = asdict(self.jitter)
        doc["translate"] = list(self.translate)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SbiDraw":
        return cls(
            jittered_copy=doc["jittered_copy"],
            jitter=ColorJitter(**doc["jitter"]),
            resize_frac=float(doc["resize_frac"]),
            translate=(float(doc["translate"][0]), float(doc["translate"][1])),
            deform_amplitude=float(doc["deform_amplitude"]),
            deform_field_sigma=float(doc["deform_field_sigma"]),
            deform_seed=int(doc["deform_seed"]),
            mask_sigma=float(doc["mask_sigma"]),
            blend_ratio=float(doc["blend_ratio"]),
        )


@dataclass(frozen=True)
class SbiSample:
    image: ImageBuffer
    mask_used: Mask
    draw: SbiDraw
    seed: int
    source_id: str = ""


def _draw_params(params: SbiParams, rng: np.random.Generator) -> SbiDraw:
    # Fixed draw order; changing it would break seed reproducibility.
    jittered_copy = "source" if rng.random() < 0.5 else "target"
    jitter = ColorJitter(
        brightness_delta=float(rng.uniform(*params.jitter.brightness)),
        contrast_delta=float(rng.uniform(*params.jitter.contrast)),
        hue_shift=float(rng.uniform(*params.jitter.hue)),
        saturation_delta=float(rng.uniform(*params.jitter.saturation)),
    )
    resize_frac = float(rng.uniform(*params.resize_frac))
    translate = (
        float(rng.uniform(*params.translate_px)),
        float(rng.uniform(*params.translate_px)),
    )
    amplitude = float(rng.uniform(*params.deform_amplitude))
    deform_seed = int(rng.integers(0, 2**63))
    mask_sigma = float(rng.uniform(*params.mask_blur_sigma))
    ratio = float(params.blend_ratios[int(rng.integers(0, len(params.blend_ratios)))])
    return SbiDraw(
        jittered_copy=jittered_copy,
        jitter=jitter,
        resize_frac=resize_frac,
        translate=translate,
        deform_amplitude=amplitude,
        deform_field_sigma=params.deform_field_sigma,
        deform_seed=deform_seed,
        mask_sigma=mask_sigma,
        blend_ratio=ratio,
    )


def _warp_scale_translate(
    img: ImageBuffer, scale: float, tx: float, ty: float
) -> ImageBuffer:
    """Scale about the image center, then translate; clamp-to-edge padding.

    Identity parameters return the input bit-exact.
    """
    if scale == 1.0 and tx == 0.0 and ty == 0.0:
        return img
    h, w = img.height, img.width
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys)
    src_x = (gx - cx - tx) / scale + cx
    src_y = (gy - cy - ty) / scale + cy
    warped = sample_bilinear(img.data, src_x, src_y)
    return _wrap(np.clip(warped, 0.0, 1.0))


def apply_sbi_draw(
    real: ImageBuffer, landmarks: LandmarkSet, draw: SbiDraw
) -> tuple[ImageBuffer, Mask]:
    """Deterministically realize a parameter draw into (pseudo-fake, mask)."""
    source = target = real
    if draw.jittered_copy == "source":
        source = apply_color_jitter(source, draw.jitter)
    else:
        target = apply_color_jitter(target, draw.jitter)
    source = _warp_scale_translate(
        source, draw.resize_frac, draw.translate[0], draw.translate[1]
    )
    hull = convex_hull(landmarks)
    mask = rasterize_polygon(hull, real.width, real.height)
    mask = elastic_deform_mask(
        mask, draw.deform_seed, draw.deform_amplitude, draw.deform_field_sigma
    )
    if draw.mask_sigma > 0.0:
        mask = soften_mask(mask, draw.mask_sigma)
    if draw.blend_ratio != 1.0:
        mask = _wrap_mask(mask.data * draw.blend_ratio)
    fake = alpha_blend(source, target, mask)
    return fake, mask


def generate_sbi(
    real: ImageBuffer,
    landmarks: LandmarkSet,
    params: SbiParams,
    seed: int,
    source_id: str = "",
) -> SbiSample:
    """Sample a parameter draw from ``seed`` and realize it.

    The input is expected to be an already face-cropped frame (the batch
    pipeline crops to 224x224 beforehand).
    """
    rng = np.random.default_rng(seed)
    draw = _draw_params(params, rng)
    fake, mask = apply_sbi_draw(real, landmarks, draw)
    return SbiSample(image=fake, mask_used=mask, draw=draw, seed=seed, source_id=source_id)


def generate_sbi_batch(
    manifest_in: Manifest,
    landmarks_by_frame: dict[str, LandmarkSet],
    params: SbiParams,
    base_seed: int,
    out_dir: str | Path,
    threads: int = 1,
) -> Manifest:
    """One pseudo-fake per real record; emits PNGs, per-sample parameter
    sidecars, and a manifest pairing each fake with its source real (1:1).

    Landmarks are looked up by frame filename; records without landmarks
    are skipped and listed in the manifest metadata. Per-sample seeds are
    ``derive_seed(base_seed, "<video_id>#<frame_idx>")``, so neither batch
    order nor ``threads`` affects the output bytes; only generation runs
    in parallel, writes stay ordered.
    """
    out_dir = Path(out_dir)
    fake_dir = out_dir / "fake"
    fake_dir.mkdir(parents=True, exist_ok=True)

    reals = [rec for rec in manifest_in.records if rec.label is Label.REAL]

    def make(rec: SampleRecord):
        source_id = f"{rec.video_id}#{rec.frame_idx}"
        lm = landmarks_by_frame.get(Path(rec.path).name)
        if lm is None:
            return rec, None
        seed = derive_seed(base_seed, source_id)
        return rec, generate_sbi(load_image(rec.path), lm, params, seed, source_id)

    results = ordered_map(make, reals, threads)

    records: list[SampleRecord] = []
    skipped: list[dict] = []
    for rec, sample in results:
        if sample is None:
            skipped.append(
                {
                    "source_id": f"{rec.video_id}#{rec.frame_idx}",
                    "reason": "missing landmarks",
                }
            )
            continue
        stem = f"{rec.video_id}_{rec.frame_idx:05d}"
        fake_path = fake_dir / f"{stem}_sbi.png"
        save_image(sample.image, fake_path)
        sidecar = {
            "seed": sample.seed,
            "source_id": sample.source_id,
            "draw": sample.draw.to_dict(),
        }
        (fake_dir / f"{stem}_sbi.params.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        records.append(rec)
        records.append(
            SampleRecord(
                path=str(fake_path),
                label=Label.FAKE,
                video_id=f"sbi/{rec.video_id}",
                frame_idx=rec.frame_idx,
                source_tag="sbi",
                seed=sample.seed,
            )
        )
    metadata = {
        "generator": "sbi",
        "base_seed": base_seed,
        "params": asdict(params),
        "skipped": skipped,
    }
    return Manifest(tuple(records), metadata)
