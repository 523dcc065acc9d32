"""Real-on-Real brightness probes.

A probe "fake" is a real frame whose facial region (convex hull of its
landmarks) is brightened by a factor delta and pasted back onto the
original background through a hard or Gaussian-softened mask. Its control
"real" is the same frame globally brightened so that both images have
exactly the same mean intensity, isolating the compositing boundary as
the only distinguishing signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blending import alpha_blend
from .errors import InvalidParameterError
from .geometry import LandmarkSet, Mask, convex_hull, rasterize_polygon, soften_mask
from .image import ImageBuffer, adjust_brightness, load_image, save_image
from .manifest import Label, Manifest, SampleRecord
from .util import ordered_map

__all__ = [
    "ProbeSpec",
    "ProbePair",
    "probe_mask",
    "matched_brightness_delta",
    "generate_probe_pair",
    "generate_probe_dataset",
]

DEFAULT_DELTAS = tuple(round(0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class ProbeSpec:
    """Probe sweep configuration: brightness steps and mask sharpness."""

    deltas: tuple[float, ...] = DEFAULT_DELTAS
    mask_mode: str = "hard"
    mask_sigma: float = 7.0
    seed: int = 0

    def __post_init__(self):
        if not self.deltas:
            raise InvalidParameterError("deltas must be non-empty")
        if any(not 0.0 <= d <= 1.0 for d in self.deltas):
            raise InvalidParameterError("probe deltas must lie in [0, 1]")
        if self.mask_mode not in ("hard", "soft"):
            raise InvalidParameterError(
                f"mask_mode must be 'hard' or 'soft', got {self.mask_mode!r}"
            )
        if self.mask_mode == "soft" and not self.mask_sigma > 0.0:
            raise InvalidParameterError("soft mask sigma must be positive")


@dataclass(frozen=True)
class ProbePair:
    fake: ImageBuffer
    matched_real: ImageBuffer
    delta: float
    region_fraction: float
    matched_delta: float


def probe_mask(
    landmarks: LandmarkSet,
    width: int,
    height: int,
    mode: str = "hard",
    sigma: float = 7.0,
) -> Mask:
    """Convex-hull facial mask; softened with a Gaussian when ``mode`` is
    "soft"."""
    if mode not in ("hard", "soft"):
        raise InvalidParameterError(f"mask mode must be 'hard' or 'soft', got {mode!r}")
    mask = rasterize_polygon(convex_hull(landmarks), width, height)
    if mode == "soft":
        mask = soften_mask(mask, sigma)
    return mask


def matched_brightness_delta(img: ImageBuffer, target_mean: float) -> float:
    """Global brightness delta whose clamped application matches a mean.

    Closed form when no clamping binds; otherwise a bisection on the
    monotone mean-vs-delta curve. ``target_mean`` must be reachable, i.e.
    at least the image mean.
    """
    base = float(img.data.mean())
    if base == 0.0 or target_mean <= base:
        return 0.0
    guess = target_mean / base - 1.0
    if float(img.data.max()) * (1.0 + guess) <= 1.0:
        return guess  # nothing clamps, the linear solution is exact

    def mean_at(delta: float) -> float:
        return float(np.clip(img.data * (1.0 + delta), 0.0, 1.0).mean())

    lo, hi = 0.0, guess
    while mean_at(hi) < target_mean and hi < 1e6:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        err = mean_at(mid) - target_mean
        if abs(err) <= 1e-12:
            return mid
        if err < 0.0:
            lo = mid
        else:
            hi = mid
    return hi if abs(mean_at(hi) - target_mean) <= abs(mean_at(lo) - target_mean) else lo


def generate_probe_pair(
    img: ImageBuffer,
    landmarks: LandmarkSet,
    delta: float,
    mode: str = "hard",
    sigma: float = 7.0,
) -> ProbePair:
    """One (fake, brightness-matched real) probe pair.

    ``fake = alpha_blend(brighten(img, delta), img, mask)``; the matched
    real is globally brightened so both means agree. With ``delta=0`` and a
    hard mask both outputs are bit-identical to the source. No other
    processing (compression, augmentation) is applied.
    """
    if not 0.0 <= delta <= 1.0:
        raise InvalidParameterError("probe delta must lie in [0, 1]")
    mask = probe_mask(landmarks, img.width, img.height, mode, sigma)
    fake = alpha_blend(adjust_brightness(img, delta), img, mask)
    matched_delta = matched_brightness_delta(img, float(fake.data.mean()))
    matched_real = adjust_brightness(img, matched_delta)
    return ProbePair(
        fake=fake,
        matched_real=matched_real,
        delta=delta,
        region_fraction=float((mask.data > 0.0).mean()),
        matched_delta=matched_delta,
    )


def _subset_name(delta: float, mode: str) -> str:
    return f"delta_{int(round(delta * 100)):03d}_{mode}"


def generate_probe_dataset(
    manifest_in: Manifest,
    landmarks_by_frame: dict[str, LandmarkSet],
    spec: ProbeSpec,
    out_dir: str | Path,
    threads: int = 1,
) -> Manifest:
    """Emit one sub-dataset per delta under ``out_dir``.

    Each sub-directory ``delta_<percent>_<hard|soft>`` holds ``fake/`` and
    ``real/`` PNGs plus its own manifest; the returned manifest covers the
    whole sweep. Frames without landmarks are skipped with a reason in the
    metadata. Output is deterministic in (inputs, spec) and independent of
    ``threads``, which only parallelizes pair generation.
    """
    out_dir = Path(out_dir)
    all_records: list[SampleRecord] = []
    skipped: list[dict] = []
    reals = [rec for rec in manifest_in.records if rec.label is Label.REAL]
    for delta in spec.deltas:
        subset = _subset_name(delta, spec.mask_mode)
        fake_dir = out_dir / subset / "fake"
        real_dir = out_dir / subset / "real"
        fake_dir.mkdir(parents=True, exist_ok=True)
        real_dir.mkdir(parents=True, exist_ok=True)

        def make(rec: SampleRecord):
            lm = landmarks_by_frame.get(Path(rec.path).name)
            if lm is None:
                return rec, None
            return rec, generate_probe_pair(
                load_image(rec.path), lm, delta, spec.mask_mode, spec.mask_sigma
            )

        subset_records: list[SampleRecord] = []
        for rec, pair in ordered_map(make, reals, threads):
            if pair is None:
                skipped.append(
                    {
                        "source_id": f"{rec.video_id}#{rec.frame_idx}",
                        "subset": subset,
                        "reason": "missing landmarks",
                    }
                )
                continue
            stem = f"{rec.video_id}_{rec.frame_idx:05d}"
            fake_path = fake_dir / f"{stem}.png"
            real_path = real_dir / f"{stem}.png"
            save_image(pair.fake, fake_path)
            save_image(pair.matched_real, real_path)
            prefix = f"{subset}/{rec.video_id}"
            subset_records.append(
                SampleRecord(
                    path=str(fake_path),
                    label=Label.FAKE,
                    video_id=f"{prefix}#fake",
                    frame_idx=rec.frame_idx,
                    source_tag=f"probe-{spec.mask_mode}",
                    seed=spec.seed,
                )
            )
            subset_records.append(
                SampleRecord(
                    path=str(real_path),
                    label=Label.REAL,
                    video_id=f"{prefix}#real",
                    frame_idx=rec.frame_idx,
                    source_tag=f"probe-{spec.mask_mode}-control",
                    seed=spec.seed,
                )
            )
        subset_metadata = {
            "generator": "probes",
            "delta": delta,
            "mask_mode": spec.mask_mode,
            "mask_sigma": spec.mask_sigma if spec.mask_mode == "soft" else 0.0,
            "seed": spec.seed,
        }
        Manifest(tuple(subset_records), subset_metadata).save(
            out_dir / subset / "manifest.json"
        )
        all_records.extend(subset_records)
    metadata = {
        "generator": "probes",
        "deltas": list(spec.deltas),
        "mask_mode": spec.mask_mode,
        "mask_sigma": spec.mask_sigma if spec.mask_mode == "soft" else 0.0,
        "seed": spec.seed,
        "skipped": skipped,
    }
    return Manifest(tuple(all_records), metadata)
