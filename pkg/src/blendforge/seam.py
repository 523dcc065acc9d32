"""Training-free blending-boundary scorer.

A sharp compositing seam leaves an outlier ridge in the high-band residual
of an image. The score is the ratio of a high percentile of the residual
gradient energy to its median, so it is unit-free and insensitive to
global brightness scaling (where no clamping occurs). Larger means more
seam-like.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .image import ImageBuffer, gaussian_blur_planes

__all__ = ["SeamScore", "score_frame", "score_video", "evenly_spaced_indices"]

EPS = 1e-6


@dataclass(frozen=True)
class SeamScore:
    """Seam-likeness score with its two components.

    ``value == high_percentile / (background_median + 1e-6)``.
    """

    value: float
    high_percentile: float
    background_median: float


def score_frame(
    img: ImageBuffer, blur_sigma: float = 2.0, percentile: float = 99.5
) -> SeamScore:
    """Score one frame for blending-boundary evidence.

    The residual ``R = img - blur(img, blur_sigma)`` isolates the high
    band; ``E`` is the per-pixel L2 norm over channels of the
    central-difference gradient of ``R``; the score is
    ``P(E, percentile) / (median(E) + 1e-6)``.
    """
    if not 0.0 < percentile < 100.0:
        raise InvalidParameterError("percentile must lie in (0, 100)")
    residual = img.data - gaussian_blur_planes(img.data, blur_sigma)
    gy, gx = np.gradient(residual, axis=(1, 2))
    energy = np.sqrt((gx * gx + gy * gy).sum(axis=0))
    high = float(np.percentile(energy, percentile))
    median = float(np.median(energy))
    return SeamScore(high / (median + EPS), high, median)


def evenly_spaced_indices(n: int, k: int) -> list[int]:
    """Indices of ``k`` evenly sampled items out of ``n`` ordered ones.

    All items when ``n <= k``; otherwise ``i_j = floor(j*(n-1)/(k-1))``
    for ``j = 0..k-1`` (just index 0 when ``k == 1``).
    """
    if n < 1:
        raise InvalidParameterError("need at least one item")
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if n <= k:
        return list(range(n))
    if k == 1:
        return [0]
    return [(j * (n - 1)) // (k - 1) for j in range(k)]


def score_video(frame_scores: Sequence[float], k: int = 32) -> float:
    """Video-level score: mean of ``k`` evenly sampled frame scores."""
    if len(frame_scores) == 0:
        raise InvalidParameterError("frame score list is empty")
    idx = evenly_spaced_indices(len(frame_scores), k)
    selected = [float(frame_scores[i]) for i in idx]
    return math.fsum(selected) / len(selected)
