"""Landmark ingestion, convex-hull face masks, mask deformation/softening,
and the crop geometry of the preprocessing pipeline.

Coordinates are in source-image pixels with pixel centers at integer+0.5.
Hull orientation follows the cross-product convention (positive cross =
counter-clockwise), independent of whether the y axis is drawn up or down.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

from .errors import (
    DegenerateGeometryError,
    InvalidParameterError,
    ShapeMismatchError,
)
from .image import ImageBuffer, _resize_planes, _clip01, _wrap, gaussian_blur_planes, sample_bilinear

__all__ = [
    "Mask",
    "LandmarkSet",
    "FaceBox",
    "convex_hull",
    "rasterize_polygon",
    "soften_mask",
    "elastic_deform_mask",
    "landmarks_face_box",
    "expand_and_crop",
    "load_landmarks",
    "save_landmarks",
    "load_mask",
    "save_mask",
]


class Mask:
    """Immutable single-channel raster with float64 values in [0, 1]."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"expected (h, w) mask, got shape {np.shape(data)}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidParameterError("mask dimensions must be positive")
        if not np.isfinite(arr).all():
            raise InvalidParameterError("mask values must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidParameterError("mask values must lie in [0, 1]")
        if arr is data or arr.base is not None:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def is_hard(self) -> bool:
        """True when every value is exactly 0 or 1."""
        d = self.data
        return bool(((d == 0.0) | (d == 1.0)).all())

    def __repr__(self) -> str:  # pragma: no cover
        kind = "hard" if self.is_hard else "soft"
        return f"Mask({self.width}x{self.height}, {kind})"


def _wrap_mask(arr: np.ndarray) -> Mask:
    m = object.__new__(Mask)
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    object.__setattr__(m, "data", arr)
    return m


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered facial keypoints in pixel coordinates.

    Requires at least 3 non-collinear finite points. Points outside the
    image are allowed; :meth:`outside_bounds` reports them.
    """

    points: tuple[tuple[float, float], ...]
    image_ref: str = ""

    def __init__(self, points, image_ref: str = ""):
        pts = tuple((float(x), float(y)) for x, y in points)
        if len(pts) < 3:
            raise DegenerateGeometryError(
                f"need at least 3 landmarks, got {len(pts)}"
            )
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in pts):
            raise InvalidParameterError("landmark coordinates must be finite")
        if all(_cross(pts[0], pts[1], p) == 0.0 for p in pts[2:]):
            raise DegenerateGeometryError("landmarks are collinear")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "image_ref", str(image_ref))

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.float64)

    def outside_bounds(self, width: int, height: int) -> list[int]:
        """Indices of points falling outside a width x height raster."""
        return [
            i
            for i, (x, y) in enumerate(self.points)
            if not (0.0 <= x < width and 0.0 <= y < height)
        ]


@dataclass(frozen=True)
class FaceBox:
    """Axis-aligned face bounding box; may extend beyond the image."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.x0, self.y0, self.x1, self.y1))):
            raise InvalidParameterError("box coordinates must be finite")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DegenerateGeometryError(
                f"degenerate box ({self.x0}, {self.y0}, {self.x1}, {self.y1})"
            )


# ---------------------------------------------------------------------------
# Convex hull (monotone chain)

def convex_hull(landmarks) -> np.ndarray:
    """Counter-clockwise convex hull of a point set.

    Accepts a :class:`LandmarkSet` or any (n, 2) point sequence. Duplicate
    points and collinear boundary points are removed; the result is a
    (k, 3<=k) x 2 array of strictly convex vertices.
    """
    if isinstance(landmarks, LandmarkSet):
        pts = landmarks.points
    else:
        pts = [(float(x), float(y)) for x, y in np.asarray(landmarks, dtype=np.float64)]
    pts = sorted(set(pts))
    if len(pts) < 3:
        raise DegenerateGeometryError("hull needs at least 3 distinct points")

    def build(seq):
        chain: list[tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateGeometryError("all points are collinear")
    return np.array(hull, dtype=np.float64)


# ---------------------------------------------------------------------------
# Rasterization

def rasterize_polygon(polygon, width: int, height: int) -> Mask:
    """Hard mask of a simple CCW polygon: 1 where the pixel center lies
    strictly inside or on the boundary (even-odd rule per center).
    """
    poly = np.asarray(polygon, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise DegenerateGeometryError("polygon needs at least 3 vertices")
    if width < 1 or height < 1:
        raise InvalidParameterError("raster dimensions must be positive")

    cx = np.arange(width, dtype=np.float64) + 0.5
    cy = np.arange(height, dtype=np.float64) + 0.5
    px = cx[None, :]
    py = cy[:, None]

    crossings = np.zeros((height, width), dtype=np.int64)
    on_edge = np.zeros((height, width), dtype=bool)
    eps = 1e-9
    n = poly.shape[0]
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        # Even-odd ray cast toward +x.
        straddles = (y1 > py) != (y2 > py)
        if straddles.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            crossings += straddles & (px < x_int)
        # Boundary inclusion: distance from center to the segment.
        ex, ey = x2 - x1, y2 - y1
        seg_len2 = ex * ex + ey * ey
        if seg_len2 == 0.0:
            continue
        tproj = ((px - x1) * ex + (py - y1) * ey) / seg_len2
        cross = (px - x1) * ey - (py - y1) * ex
        on_edge |= (
            (np.abs(cross) <= eps * math.sqrt(seg_len2))
            & (tproj >= -eps)
            & (tproj <= 1.0 + eps)
        )

    inside = (crossings % 2 == 1) | on_edge
    return _wrap_mask(inside.astype(np.float64))


# ---------------------------------------------------------------------------
# Mask transforms

def soften_mask(mask: Mask, sigma: float) -> Mask:
    """Gaussian-blur a mask plane; values stay in [0, 1]."""
    return _wrap_mask(np.clip(gaussian_blur_planes(mask.data, sigma), 0.0, 1.0))


def elastic_deform_mask(
    mask: Mask, seed: int, amplitude: float, field_sigma: float
) -> Mask:
    """Warp a mask by a smooth random displacement field.

    The field is white Gaussian noise blurred by ``field_sigma`` and
    rescaled so its largest displacement magnitude equals ``amplitude``
    pixels; the mask is then resampled bilinearly (backward warp,
    clamp-to-edge). Deterministic in ``seed``; ``amplitude=0`` returns the
    input unchanged.
    """
    if amplitude < 0 or not math.isfinite(amplitude):
        raise InvalidParameterError("amplitude must be non-negative")
    if amplitude == 0.0:
        return mask
    h, w = mask.data.shape
    rng = np.random.default_rng(seed)
    field = gaussian_blur_planes(rng.standard_normal((2, h, w)), field_sigma)
    magnitude = float(np.hypot(field[0], field[1]).max())
    if magnitude > 0.0:
        field = field * (amplitude / magnitude)
    ys, xs = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    warped = sample_bilinear(mask.data, xs + field[0], ys + field[1])
    return _wrap_mask(np.clip(warped, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Crop geometry

def landmarks_face_box(landmarks: LandmarkSet) -> FaceBox:
    """Axis-aligned bounding box of a landmark set."""
    pts = landmarks.as_array()
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    return FaceBox(float(x0), float(y0), float(x1), float(y1))


def expand_and_crop(
    img: ImageBuffer, box: FaceBox, margin: float = 1.3, out_size: int = 224
) -> ImageBuffer:
    """Scale a box about its center by ``margin``, clamp to the image, crop,
    and resize the crop to ``out_size`` x ``out_size``.
    """
    if margin <= 0 or not math.isfinite(margin):
        raise InvalidParameterError("margin must be positive")
    if out_size < 1:
        raise InvalidParameterError("output size must be positive")
    cx = (box.x0 + box.x1) / 2.0
    cy = (box.y0 + box.y1) / 2.0
    half_w = (box.x1 - box.x0) / 2.0 * margin
    half_h = (box.y1 - box.y0) / 2.0 * margin
    x0 = max(0, int(math.floor(max(cx - half_w, 0.0))))
    y0 = max(0, int(math.floor(max(cy - half_h, 0.0))))
    x1 = min(img.width, int(math.ceil(min(cx + half_w, float(img.width)))))
    y1 = min(img.height, int(math.ceil(min(cy + half_h, float(img.height)))))
    if x1 - x0 < 1 or y1 - y0 < 1:
        raise DegenerateGeometryError("crop box degenerate after clamping")
    crop = img.data[:, y0:y1, x0:x1]
    return _wrap(_clip01(_resize_planes(crop, out_size, out_size)))


# ---------------------------------------------------------------------------
# File formats

def load_landmarks(path: str | Path) -> dict[str, LandmarkSet]:
    """Read a landmark JSON file: {"frames": {"<filename>": [[x, y], ...]}}."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    frames = doc.get("frames")
    if not isinstance(frames, dict):
        raise InvalidParameterError(f"{path}: missing 'frames' mapping")
    return {
        name: LandmarkSet(points, image_ref=name) for name, points in frames.items()
    }


def save_landmarks(landmarks: dict[str, LandmarkSet], path: str | Path) -> None:
    doc = {
        "frames": {
            name: [[x, y] for x, y in lm.points]
            for name, lm in sorted(landmarks.items())
        }
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_mask(mask: Mask, path: str | Path) -> None:
    """Write an 8-bit grayscale PNG; values quantize via round(255*x)."""
    arr8 = np.rint(mask.data * 255.0).astype(np.uint8)
    _PILImage.fromarray(arr8, mode="L").save(Path(path), format="PNG")


def load_mask(path: str | Path) -> Mask:
    with _PILImage.open(Path(path)) as pil:
        arr = np.asarray(pil.convert("L"), dtype=np.float64) / 255.0
    return _wrap_mask(np.ascontiguousarray(arr))
