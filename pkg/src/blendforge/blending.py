"""Compositing back-ends: alpha, Laplacian-pyramid, and Poisson
(gradient-domain) blending.

All three agree when foreground equals background; alpha blending is the
exact per-pixel convex combination ``M*fg + (1-M)*bg``, the other two relax
the seam at the mask boundary in different ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ConvergenceError,
    InvalidParameterError,
    InvalidRegionError,
    ShapeMismatchError,
)
from .geometry import Mask
from .image import ImageBuffer, _clip01, _wrap, gaussian_blur_planes

__all__ = [
    "AlphaMode",
    "LaplacianPyramidMode",
    "PoissonMode",
    "BlendMode",
    "alpha_blend",
    "laplacian_blend",
    "poisson_blend",
    "solve_masked_poisson",
    "blend_with_mode",
    "max_pyramid_levels",
]


@dataclass(frozen=True)
class AlphaMode:
    """Plain per-pixel convex combination."""


@dataclass(frozen=True)
class LaplacianPyramidMode:
    levels: int = 3

    def __post_init__(self):
        if self.levels < 1:
            raise InvalidParameterError("pyramid levels must be >= 1")


@dataclass(frozen=True)
class PoissonMode:
    tolerance: float = 1e-6
    max_iters: int | None = None

    def __post_init__(self):
        if not (self.tolerance > 0.0):
            raise InvalidParameterError("Poisson tolerance must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise InvalidParameterError("max_iters must be >= 1")


BlendMode = Union[AlphaMode, LaplacianPyramidMode, PoissonMode]


def _check_dims(fg: ImageBuffer, bg: ImageBuffer, mask: Mask) -> None:
    if fg.data.shape != bg.data.shape or mask.data.shape != fg.data.shape[1:]:
        raise ShapeMismatchError(
            f"fg {fg.data.shape}, bg {bg.data.shape} and mask {mask.data.shape} "
            "must share dimensions"
        )


# ---------------------------------------------------------------------------
# Alpha

def alpha_blend(fg: ImageBuffer, bg: ImageBuffer, mask: Mask) -> ImageBuffer:
    """``out = M*fg + (1-M)*bg`` per sample, exactly."""
    _check_dims(fg, bg, mask)
    m = mask.data
    return _wrap(_clip01(m * fg.data + (1.0 - m) * bg.data))


# ---------------------------------------------------------------------------
# Laplacian pyramid

_PYR_SIGMA = 1.0


def max_pyramid_levels(width: int, height: int) -> int:
    return int(math.floor(math.log2(min(width, height))))


def _downsample(planes: np.ndarray) -> np.ndarray:
    return gaussian_blur_planes(planes, _PYR_SIGMA)[..., ::2, ::2]


def _upsample(planes: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    shape = planes.shape[:-2] + (out_h, out_w)
    stuffed = np.zeros(shape, dtype=np.float64)
    stuffed[..., ::2, ::2] = planes
    return gaussian_blur_planes(stuffed, _PYR_SIGMA) * 4.0


def _gaussian_pyramid(planes: np.ndarray, levels: int) -> list[np.ndarray]:
    pyr = [np.asarray(planes, dtype=np.float64)]
    for _ in range(levels - 1):
        pyr.append(_downsample(pyr[-1]))
    return pyr


def build_laplacian_pyramid(planes: np.ndarray, levels: int) -> list[np.ndarray]:
    """Band-pass decomposition; the last entry is the residual low-pass."""
    gauss = _gaussian_pyramid(planes, levels)
    lap = []
    for i in range(levels - 1):
        h, w = gauss[i].shape[-2:]
        lap.append(gauss[i] - _upsample(gauss[i + 1], h, w))
    lap.append(gauss[-1])
    return lap


def collapse_laplacian_pyramid(lap: list[np.ndarray]) -> np.ndarray:
    acc = lap[-1]
    for level in reversed(lap[:-1]):
        h, w = level.shape[-2:]
        acc = _upsample(acc, h, w) + level
    return acc


def laplacian_blend(
    fg: ImageBuffer, bg: ImageBuffer, mask: Mask, levels: int
) -> ImageBuffer:
    """Blend per pyramid band with a Gaussian pyramid of the mask.

    With ``levels=1`` this degenerates to plain alpha blending.
    """
    _check_dims(fg, bg, mask)
    if levels < 1:
        raise InvalidParameterError("pyramid levels must be >= 1")
    deepest = max_pyramid_levels(fg.width, fg.height)
    if levels > deepest:
        raise InvalidParameterError(
            f"levels={levels} too deep for {fg.width}x{fg.height} "
            f"(max {deepest})"
        )
    lap_fg = build_laplacian_pyramid(fg.data, levels)
    lap_bg = build_laplacian_pyramid(bg.data, levels)
    mask_pyr = _gaussian_pyramid(mask.data, levels)
    blended = [
        m * lf + (1.0 - m) * lb
        for m, lf, lb in zip(mask_pyr, lap_fg, lap_bg)
    ]
    return _wrap(_clip01(collapse_laplacian_pyramid(blended)))


# ---------------------------------------------------------------------------
# Poisson (gradient-domain)

def solve_masked_poisson(
    source: np.ndarray,
    target: np.ndarray,
    inside: np.ndarray,
    tolerance: float = 1e-6,
    max_iters: int | None = None,
) -> tuple[np.ndarray, float, int]:
    """Solve the discrete Poisson equation on one plane.

    Unknowns are the pixels where ``inside`` is True. The 5-point Laplacian
    of the solution matches the Laplacian of ``source`` there; Dirichlet
    boundary values come from ``target``. Uses Jacobi-preconditioned
    conjugate gradient started from the target values.

    Returns ``(full_plane, relative_residual, iterations)`` where the plane
    equals ``target`` outside the region.
    """
    if not (tolerance > 0.0):
        raise InvalidParameterError("tolerance must be positive")
    h, w = source.shape
    n = int(inside.sum())
    if n == 0:
        raise InvalidRegionError("Poisson region is empty")
    if inside[0, :].any() or inside[-1, :].any() or inside[:, 0].any() or inside[:, -1].any():
        raise InvalidRegionError(
            "Poisson region touches the raster border; a one-pixel ring of "
            "boundary values is required"
        )
    if max_iters is None:
        max_iters = int(10.0 * math.sqrt(n)) + 1000

    index = np.full((h, w), -1, dtype=np.intp)
    yy, xx = np.nonzero(inside)
    index[yy, xx] = np.arange(n)

    # Per-direction neighbor bookkeeping: interior neighbors enter the
    # operator, exterior ones contribute target values to the RHS.
    shifts = ((-1, 0), (1, 0), (0, -1), (0, 1))
    neighbors = []
    b = 4.0 * source[yy, xx]
    for dy, dx in shifts:
        ny, nx = yy + dy, xx + dx
        b -= source[ny, nx]
        interior = inside[ny, nx]
        neighbors.append((interior, np.where(interior, index[ny, nx], 0)))
        b += np.where(interior, 0.0, target[ny, nx])

    def apply_operator(x: np.ndarray) -> np.ndarray:
        out = 4.0 * x
        for interior, safe_idx in neighbors:
            out -= np.where(interior, x[safe_idx], 0.0)
        return out

    x = target[yy, xx].astype(np.float64, copy=True)
    r = b - apply_operator(x)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        b_norm = 1.0
    z = r / 4.0
    p = z.copy()
    rz = float(r @ z)
    residual = float(np.linalg.norm(r)) / b_norm
    iterations = 0
    while residual > tolerance:
        if iterations >= max_iters:
            raise ConvergenceError(
                f"Poisson CG did not reach {tolerance} in {max_iters} "
                f"iterations (residual {residual:.3e})",
                residual=residual,
            )
        ap = apply_operator(p)
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        z = r / 4.0
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next
        residual = float(np.linalg.norm(r)) / b_norm
        iterations += 1

    plane = target.astype(np.float64, copy=True)
    plane[yy, xx] = x
    return plane, residual, iterations


def poisson_blend(
    fg: ImageBuffer,
    bg: ImageBuffer,
    mask: Mask,
    tolerance: float = 1e-6,
    max_iters: int | None = None,
) -> ImageBuffer:
    """Gradient-domain composite of ``fg`` into ``bg`` over a hard mask.

    Channels are solved independently with source-only (non-mixing)
    guidance. The mask must be binary, non-empty, and must not touch the
    raster border.
    """
    _check_dims(fg, bg, mask)
    if not mask.is_hard:
        raise InvalidParameterError("Poisson blending requires a hard {0,1} mask")
    inside = mask.data == 1.0
    planes = [
        solve_masked_poisson(fg.data[c], bg.data[c], inside, tolerance, max_iters)[0]
        for c in range(3)
    ]
    return _wrap(_clip01(np.stack(planes)))


# ---------------------------------------------------------------------------
# Dispatch

def blend_with_mode(
    fg: ImageBuffer, bg: ImageBuffer, mask: Mask, mode: BlendMode
) -> ImageBuffer:
    if isinstance(mode, AlphaMode):
        return alpha_blend(fg, bg, mask)
    if isinstance(mode, LaplacianPyramidMode):
        return laplacian_blend(fg, bg, mask, mode.levels)
    if isinstance(mode, PoissonMode):
        return poisson_blend(fg, bg, mask, mode.tolerance, mode.max_iters)
    raise InvalidParameterError(f"unknown blend mode {mode!r}")
