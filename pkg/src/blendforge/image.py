"""Floating-point RGB raster type and the pixel-level primitives.

Images are planar ``(3, height, width)`` float64 arrays with samples in
``[0, 1]``. Every public operation clamps its result back into that range
and returns a new buffer; inputs are never mutated. Identity parameters
(zero brightness delta, unit resize, all-zero jitter) short-circuit so
that no-op transforms are bit-exact, which the dataset generators rely on
for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

from .errors import InvalidParameterError, ShapeMismatchError

__all__ = [
    "ImageBuffer",
    "ColorJitter",
    "adjust_brightness",
    "gaussian_blur",
    "gaussian_blur_planes",
    "resize_bilinear",
    "sample_bilinear",
    "apply_color_jitter",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "load_image",
    "save_image",
]


class ImageBuffer:
    """Immutable planar RGB raster, float64 samples in [0, 1].

    ``data`` has shape ``(3, height, width)``, is C-contiguous and marked
    read-only, so instances are safe to share across threads.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] != 3:
            raise ShapeMismatchError(
                f"expected planar (3, h, w) array, got shape {np.shape(data)}"
            )
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise InvalidParameterError("image dimensions must be positive")
        if not np.isfinite(arr).all():
            raise InvalidParameterError("image samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidParameterError("image samples must lie in [0, 1]")
        if arr is data or arr.base is not None:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return 3

    @classmethod
    def from_interleaved(cls, hwc: np.ndarray) -> "ImageBuffer":
        """Build from an (h, w, 3) interleaved array."""
        hwc = np.asarray(hwc, dtype=np.float64)
        if hwc.ndim != 3 or hwc.shape[2] != 3:
            raise ShapeMismatchError(
                f"expected interleaved (h, w, 3) array, got shape {hwc.shape}"
            )
        return cls(np.moveaxis(hwc, 2, 0))

    def to_interleaved(self) -> np.ndarray:
        """Return a writable (h, w, 3) copy."""
        return np.ascontiguousarray(np.moveaxis(self.data, 0, 2))

    def __repr__(self) -> str:  # pragma: no cover
        return f"ImageBuffer({self.width}x{self.height})"


def _wrap(planes: np.ndarray) -> ImageBuffer:
    """Wrap a freshly computed, already-valid planar array without copying."""
    img = object.__new__(ImageBuffer)
    planes = np.ascontiguousarray(planes, dtype=np.float64)
    planes.flags.writeable = False
    object.__setattr__(img, "data", planes)
    return img


def _clip01(planes: np.ndarray) -> np.ndarray:
    return np.clip(planes, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Brightness

def adjust_brightness(img: ImageBuffer, delta: float) -> ImageBuffer:
    """Scale every sample by ``1 + delta`` and clamp to [0, 1].

    ``delta=0`` returns a bit-identical image. Positive deltas brighten
    (``delta=1`` doubles intensities before clamping), negative darken.
    """
    if not math.isfinite(delta):
        raise InvalidParameterError("brightness delta must be finite")
    if delta == 0.0:
        return img
    return _wrap(_clip01(img.data * (1.0 + delta)))


# ---------------------------------------------------------------------------
# Gaussian blur

def _gaussian_kernel(sigma: float) -> np.ndarray:
    if not (sigma > 0.0) or not math.isfinite(sigma):
        raise InvalidParameterError(f"blur sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (xs / sigma) ** 2)
    return k / k.sum()


def _convolve_axis(planes: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    # Fixed-order accumulation keeps results bit-reproducible across runs.
    radius = (kernel.size - 1) // 2
    pad = [(0, 0)] * planes.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(planes, pad, mode="edge")
    n = planes.shape[axis]
    out = np.zeros_like(planes)
    index = [slice(None)] * planes.ndim
    for i, w in enumerate(kernel):
        index[axis] = slice(i, i + n)
        out += w * padded[tuple(index)]
    return out


def gaussian_blur_planes(planes: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur over the trailing (h, w) axes of an array.

    Kernel radius is ``ceil(3*sigma)``; borders use clamp-to-edge
    replication. Works on any ``(..., h, w)`` float stack.
    """
    kernel = _gaussian_kernel(sigma)
    planes = np.asarray(planes, dtype=np.float64)
    out = _convolve_axis(planes, kernel, planes.ndim - 1)
    return _convolve_axis(out, kernel, planes.ndim - 2)


def gaussian_blur(img: ImageBuffer, sigma: float) -> ImageBuffer:
    """Blur each channel with a normalized 1-D Gaussian applied separably."""
    return _wrap(_clip01(gaussian_blur_planes(img.data, sigma)))


# ---------------------------------------------------------------------------
# Resampling

def _bilinear_1d_setup(n_in: int, coords: np.ndarray):
    coords = np.clip(coords, 0.0, float(n_in - 1))
    i0 = np.floor(coords).astype(np.intp)
    frac = coords - i0
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, frac


def sample_bilinear(planes: np.ndarray, xq: np.ndarray, yq: np.ndarray) -> np.ndarray:
    """Sample ``(..., h, w)`` planes at float coordinates with edge clamping.

    ``xq``/``yq`` share a common shape; the result has the planes' leading
    axes followed by that shape. Integer coordinates reproduce the source
    samples exactly.
    """
    h, w = planes.shape[-2:]
    x0, x1, fx = _bilinear_1d_setup(w, np.asarray(xq, dtype=np.float64))
    y0, y1, fy = _bilinear_1d_setup(h, np.asarray(yq, dtype=np.float64))
    top = (1.0 - fx) * planes[..., y0, x0] + fx * planes[..., y0, x1]
    bottom = (1.0 - fx) * planes[..., y1, x0] + fx * planes[..., y1, x1]
    return (1.0 - fy) * top + fy * bottom


def _resize_planes(planes: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    in_h, in_w = planes.shape[-2:]
    # Half-pixel-center mapping: dst center i+0.5 pulls from src (i+0.5)*scale.
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    x0, x1, fx = _bilinear_1d_setup(in_w, xs)
    y0, y1, fy = _bilinear_1d_setup(in_h, ys)
    rows_top = planes[..., y0, :]
    rows_bottom = planes[..., y1, :]
    rows = (1.0 - fy)[:, None] * rows_top + fy[:, None] * rows_bottom
    out = (1.0 - fx) * rows[..., x0] + fx * rows[..., x1]
    return out


def resize_bilinear(img: ImageBuffer, out_w: int, out_h: int) -> ImageBuffer:
    """Resize with bilinear interpolation and half-pixel-center mapping."""
    if out_w < 1 or out_h < 1:
        raise InvalidParameterError(
            f"target dimensions must be positive, got {out_w}x{out_h}"
        )
    return _wrap(_clip01(_resize_planes(img.data, out_w, out_h)))


# ---------------------------------------------------------------------------
# Color space and jitter

def rgb_to_hsv(img: "ImageBuffer | np.ndarray") -> np.ndarray:
    """Convert RGB in [0,1] to a (3, h, w) HSV raster, hue in degrees.

    Accepts an :class:`ImageBuffer` or raw (3, h, w) planes. The result is
    a plain raster (hue exceeds 1), inverted by :func:`hsv_to_rgb`.
    """
    planes = img.data if isinstance(img, ImageBuffer) else np.asarray(img)
    r, g, b = planes[0], planes[1], planes[2]
    maxc = planes.max(axis=0)
    minc = planes.min(axis=0)
    chroma = maxc - minc
    safe_chroma = np.where(chroma == 0.0, 1.0, chroma)
    hue = np.zeros_like(maxc)
    is_r = (maxc == r) & (chroma > 0)
    is_g = (maxc == g) & (chroma > 0) & ~is_r
    is_b = (chroma > 0) & ~is_r & ~is_g
    hue = np.where(is_r, ((g - b) / safe_chroma) % 6.0, hue)
    hue = np.where(is_g, (b - r) / safe_chroma + 2.0, hue)
    hue = np.where(is_b, (r - g) / safe_chroma + 4.0, hue)
    hue *= 60.0
    sat = np.where(maxc > 0.0, chroma / np.where(maxc == 0.0, 1.0, maxc), 0.0)
    return np.stack([hue, sat, maxc])


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Inverse of :func:`rgb_to_hsv`; returns (3, h, w) RGB in [0, 1]."""
    hue, sat, val = hsv[0], hsv[1], hsv[2]
    hp = (hue % 360.0) / 60.0
    chroma = val * sat
    x = chroma * (1.0 - np.abs(hp % 2.0 - 1.0))
    zero = np.zeros_like(chroma)
    sector = np.floor(hp).astype(np.intp) % 6
    r1 = np.choose(sector, [chroma, x, zero, zero, x, chroma])
    g1 = np.choose(sector, [x, chroma, chroma, x, zero, zero])
    b1 = np.choose(sector, [zero, zero, x, chroma, chroma, x])
    m = val - chroma
    return np.stack([r1 + m, g1 + m, b1 + m])


@dataclass(frozen=True)
class ColorJitter:
    """Photometric jitter: brightness/contrast scales, hue rotation,
    saturation scale.

    The multiplicative deltas must lie in [-1, 1]; hue_shift is an angle in
    degrees (applied modulo 360). The narrower default sampling ranges used
    for pseudo-fake generation live in :class:`blendforge.sbi.SbiParams`.
    """

    brightness_delta: float = 0.0
    contrast_delta: float = 0.0
    hue_shift: float = 0.0
    saturation_delta: float = 0.0

    def __post_init__(self):
        for name in ("brightness_delta", "contrast_delta", "saturation_delta"):
            v = getattr(self, name)
            if not math.isfinite(v) or not -1.0 <= v <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [-1, 1], got {v}")
        if not math.isfinite(self.hue_shift):
            raise InvalidParameterError("hue_shift must be finite")

    @property
    def is_identity(self) -> bool:
        return (
            self.brightness_delta == 0.0
            and self.contrast_delta == 0.0
            and self.hue_shift == 0.0
            and self.saturation_delta == 0.0
        )


_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def apply_color_jitter(img: ImageBuffer, jitter: ColorJitter) -> ImageBuffer:
    """Apply brightness, then contrast about the mean luminance, then
    hue/saturation through an RGB<->HSV round trip.

    Stages whose delta is zero are skipped, so all-zero jitter returns the
    input bit-exact.
    """
    if jitter.is_identity:
        return img
    planes = img.data
    if jitter.brightness_delta != 0.0:
        planes = _clip01(planes * (1.0 + jitter.brightness_delta))
    if jitter.contrast_delta != 0.0:
        pivot = float(np.tensordot(_LUMA_WEIGHTS, planes, axes=1).mean())
        planes = _clip01((planes - pivot) * (1.0 + jitter.contrast_delta) + pivot)
    if jitter.hue_shift != 0.0 or jitter.saturation_delta != 0.0:
        hsv = rgb_to_hsv(planes)
        hsv[0] = (hsv[0] + jitter.hue_shift) % 360.0
        hsv[1] = np.clip(hsv[1] * (1.0 + jitter.saturation_delta), 0.0, 1.0)
        planes = _clip01(hsv_to_rgb(hsv))
    return _wrap(planes)


# ---------------------------------------------------------------------------
# PNG I/O (8-bit RGB; quantization happens only at the file boundary)

def save_image(img: ImageBuffer, path: str | Path) -> None:
    """Write an 8-bit RGB PNG; samples quantize via round(255*x)."""
    arr8 = np.rint(img.data * 255.0).astype(np.uint8)
    _PILImage.fromarray(np.moveaxis(arr8, 0, 2), mode="RGB").save(Path(path), format="PNG")


def load_image(path: str | Path) -> ImageBuffer:
    """Read an RGB PNG into float samples via x/255."""
    with _PILImage.open(Path(path)) as pil:
        arr = np.asarray(pil.convert("RGB"), dtype=np.float64) / 255.0
    return _wrap(np.ascontiguousarray(np.moveaxis(arr, 2, 0)))
