"""In-process array interface to the blendforge toolkit.

Exposes generation and compositing over plain ``(h, w, 3)`` float arrays
in [0, 1] (interleaved layout, the host-ecosystem convention) so ML
dataloaders can synthesize samples without file round-trips. Each call
converts once at the boundary, never mutates its inputs, and produces
results bit-identical to the core library for the same inputs and seeds.

Errors are the core exception types; match on their stable ``.code``
strings (for example ``"degenerate-geometry"``). The heavy kernels are
vectorized array operations that release the interpreter lock, so
dataloader workers scale.
"""

from __future__ import annotations

import numpy as np

import blendforge as _core
from blendforge import (
    ImageBuffer,
    LandmarkSet,
    Mask,
    SbiParams,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "generate_sbi",
    "probe_pair",
    "alpha_blend",
    "poisson_blend",
    "laplacian_blend",
]


def _image_in(array) -> ImageBuffer:
    return ImageBuffer.from_interleaved(np.asarray(array, dtype=np.float64))


def _image_out(img: ImageBuffer) -> np.ndarray:
    return img.to_interleaved()


def _mask_in(array) -> Mask:
    return Mask(np.asarray(array, dtype=np.float64))


def generate_sbi(
    image: np.ndarray,
    landmarks,
    seed: int,
    params: dict | None = None,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Self-blended pseudo-fake from an (h, w, 3) array and landmark pairs.

    Returns ``(fake, mask, param_record)`` where ``fake`` is (h, w, 3),
    ``mask`` is (h, w), and ``param_record`` is a JSON-serializable dict
    with the seed and the full parameter draw; replaying the draw through
    the core library reproduces ``fake`` bit-exactly.
    """
    sbi_params = SbiParams() if params is None else SbiParams.from_dict(params)
    sample = _core.generate_sbi(
        _image_in(image), LandmarkSet(landmarks), sbi_params, seed
    )
    record = {"seed": sample.seed, "draw": sample.draw.to_dict()}
    return _image_out(sample.image), sample.mask_used.data.copy(), record


def probe_pair(
    image: np.ndarray,
    landmarks,
    delta: float,
    mode: str = "hard",
    sigma: float = 7.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Brightness probe: returns ``(fake, matched_real)`` arrays."""
    pair = _core.generate_probe_pair(
        _image_in(image), LandmarkSet(landmarks), delta, mode, sigma
    )
    return _image_out(pair.fake), _image_out(pair.matched_real)


def alpha_blend(fg: np.ndarray, bg: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Per-pixel convex combination ``mask*fg + (1-mask)*bg``."""
    return _image_out(_core.alpha_blend(_image_in(fg), _image_in(bg), _mask_in(mask)))


def poisson_blend(
    fg: np.ndarray,
    bg: np.ndarray,
    mask: np.ndarray,
    tolerance: float = 1e-6,
    max_iters: int | None = None,
) -> np.ndarray:
    """Gradient-domain composite over a hard mask."""
    out = _core.poisson_blend(
        _image_in(fg), _image_in(bg), _mask_in(mask), tolerance, max_iters
    )
    return _image_out(out)


def laplacian_blend(
    fg: np.ndarray, bg: np.ndarray, mask: np.ndarray, levels: int = 3
) -> np.ndarray:
    """Pyramid-band composite with a Gaussian mask pyramid."""
    out = _core.laplacian_blend(_image_in(fg), _image_in(bg), _mask_in(mask), levels)
    return _image_out(out)
