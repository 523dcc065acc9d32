"""Deterministic synthetic face-like fixtures.

Real face footage cannot ship with the toolkit, so tests and demos run on
procedurally generated portraits: a smooth background gradient, mild
band-limited texture, and a soft elliptical face region with a few
blurred features. Intensities stay at or below 0.5 so brightness probes up
to +100% never clamp. Landmarks trace the face ellipse, giving the hull
pipeline a realistic region to work with.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import LandmarkSet, save_landmarks
from .image import ImageBuffer, gaussian_blur_planes, save_image, _wrap
from .manifest import Label, Manifest, SampleRecord
from .seeding import derive_seed

__all__ = ["make_face_image", "make_face_landmarks", "write_fixture_corpus"]


def make_face_landmarks(
    center: tuple[float, float],
    axes: tuple[float, float],
    n_points: int = 17,
    image_ref: str = "",
) -> LandmarkSet:
    """Keypoints on an ellipse boundary (face outline order)."""
    cx, cy = center
    ax, ay = axes
    angles = np.linspace(0.0, 2.0 * math.pi, n_points, endpoint=False)
    points = [(cx + ax * math.cos(a), cy + ay * math.sin(a)) for a in angles]
    return LandmarkSet(points, image_ref=image_ref)


def make_face_image(
    seed: int, size: int = 224, texture_amp: float = 0.012
) -> tuple[ImageBuffer, LandmarkSet]:
    """One synthetic portrait plus its face-outline landmarks."""
    rng = np.random.default_rng(seed)
    h = w = size
    ys, xs = np.meshgrid(
        np.linspace(0.0, 1.0, h), np.linspace(0.0, 1.0, w), indexing="ij"
    )

    planes = np.empty((3, h, w))
    for c in range(3):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        wave = np.cos(
            2.0 * math.pi * rng.uniform(0.4, 1.0) * (xs * math.cos(angle) + ys * math.sin(angle))
            + phase
        )
        planes[c] = 0.24 + 0.07 * wave + rng.uniform(-0.03, 0.03)

    # Band-limited texture; keeps the seam detector's background energy
    # nonzero without introducing sharp edges of its own.
    texture = gaussian_blur_planes(rng.standard_normal((3, h, w)), 1.6)
    planes += texture_amp * texture / max(float(np.abs(texture).std()), 1e-9)

    cx = w * rng.uniform(0.46, 0.54)
    cy = h * rng.uniform(0.46, 0.54)
    ax = w * rng.uniform(0.24, 0.30)
    ay = h * rng.uniform(0.30, 0.36)

    gy, gx = np.meshgrid(np.arange(h) + 0.5, np.arange(w) + 0.5, indexing="ij")
    ellipse = (((gx - cx) / ax) ** 2 + ((gy - cy) / ay) ** 2 <= 1.0).astype(np.float64)
    face_soft = gaussian_blur_planes(ellipse, 5.0)
    tint = rng.uniform(0.03, 0.07, size=3)
    planes += tint[:, None, None] * face_soft

    # Eyes and mouth: small soft dark blobs inside the face.
    for fx, fy, radius, depth in (
        (-0.35, -0.25, 0.10, 0.10),
        (0.35, -0.25, 0.10, 0.10),
        (0.0, 0.45, 0.16, 0.07),
    ):
        bx, by = cx + fx * ax, cy + fy * ay
        blob = (((gx - bx) / (radius * ax)) ** 2 + ((gy - by) / (radius * ay * 1.6)) ** 2) <= 1.0
        planes -= depth * gaussian_blur_planes(blob.astype(np.float64), 3.0)

    planes = np.clip(planes, 0.02, 0.5)
    img = _wrap(np.ascontiguousarray(planes))
    landmarks = make_face_landmarks((cx, cy), (ax, ay))
    return img, landmarks


def write_fixture_corpus(
    out_dir: str | Path,
    n_videos: int = 10,
    frames_per_video: int = 1,
    size: int = 224,
    seed: int = 7,
) -> tuple[Path, Path]:
    """Write a PNG corpus with landmarks and a manifest of real samples.

    Returns (manifest_path, landmarks_path). Fully deterministic in the
    arguments.
    """
    out_dir = Path(out_dir)
    frames_dir = out_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    records = []
    landmark_map = {}
    for v in range(n_videos):
        video_id = f"vid{v:03d}"
        for f in range(frames_per_video):
            frame_seed = derive_seed(seed, f"{video_id}#{f}")
            img, lm = make_face_image(frame_seed, size=size)
            name = f"{video_id}_{f:05d}.png"
            save_image(img, frames_dir / name)
            landmark_map[name] = lm
            records.append(
                SampleRecord(
                    path=str(frames_dir / name),
                    label=Label.REAL,
                    video_id=video_id,
                    frame_idx=f,
                    source_tag="synthetic",
                )
            )
    manifest = Manifest(
        tuple(records),
        {"generator": "synthetic", "seed": seed, "size": size},
    )
    manifest_path = out_dir / "manifest.json"
    landmarks_path = out_dir / "landmarks.json"
    manifest.save(manifest_path)
    save_landmarks(landmark_map, landmarks_path)
    return manifest_path, landmarks_path
