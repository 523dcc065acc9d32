"""Alpha, Laplacian-pyramid, and Poisson compositing back-ends."""

import math

import numpy as np
import pytest

from blendforge.blending import (
    AlphaMode,
    LaplacianPyramidMode,
    PoissonMode,
    alpha_blend,
    blend_with_mode,
    build_laplacian_pyramid,
    collapse_laplacian_pyramid,
    laplacian_blend,
    max_pyramid_levels,
    poisson_blend,
    solve_masked_poisson,
)
from blendforge.errors import (
    ConvergenceError,
    InvalidParameterError,
    InvalidRegionError,
    ShapeMismatchError,
)
from blendforge.geometry import Mask
from blendforge.image import ImageBuffer, _gaussian_kernel


def random_pair(rng, h=16, w=16):
    return (
        ImageBuffer(rng.uniform(0, 1, (3, h, w))),
        ImageBuffer(rng.uniform(0, 1, (3, h, w))),
    )


# ---------------------------------------------------------------------------
# Independent oracles (written before the tests that use them)

def naive_blur2d(plane, sigma):
    k = _gaussian_kernel(sigma)
    r = (len(k) - 1) // 2
    k2 = np.outer(k, k)
    h, w = plane.shape
    out = np.zeros_like(plane)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    acc += k2[dy + r, dx + r] * plane[yy, xx]
            out[y, x] = acc
    return out


def naive_laplacian_blend(fg, bg, mask, levels):
    """Straightforward per-channel pyramid blender, dense convolutions."""

    def down(p):
        return naive_blur2d(p, 1.0)[::2, ::2]

    def up(p, oh, ow):
        stuffed = np.zeros((oh, ow))
        stuffed[::2, ::2] = p
        return naive_blur2d(stuffed, 1.0) * 4.0

    out = np.zeros_like(fg)
    for c in range(3):
        gf, gb, gm = [fg[c]], [bg[c]], [mask]
        for _ in range(levels - 1):
            gf.append(down(gf[-1]))
            gb.append(down(gb[-1]))
            gm.append(down(gm[-1]))
        lf, lb = [], []
        for i in range(levels - 1):
            h, w = gf[i].shape
            lf.append(gf[i] - up(gf[i + 1], h, w))
            lb.append(gb[i] - up(gb[i + 1], h, w))
        lf.append(gf[-1])
        lb.append(gb[-1])
        blended = [gm[i] * lf[i] + (1 - gm[i]) * lb[i] for i in range(levels)]
        acc = blended[-1]
        for i in range(levels - 2, -1, -1):
            h, w = blended[i].shape
            acc = up(acc, h, w) + blended[i]
        out[c] = np.clip(acc, 0, 1)
    return out


def dense_poisson_solve(source, target, inside):
    """Assemble the full linear system and solve by elimination."""
    h, w = source.shape
    n = h * w
    A = np.zeros((n, n))
    b = np.zeros(n)

    def idx(y, x):
        return y * w + x

    for y in range(h):
        for x in range(w):
            i = idx(y, x)
            if inside[y, x]:
                A[i, i] = 4.0
                rhs = 4.0 * source[y, x]
                for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    yy, xx = y + dy, x + dx
                    rhs -= source[yy, xx]
                    A[i, idx(yy, xx)] = -1.0
                b[i] = rhs
            else:
                A[i, i] = 1.0
                b[i] = target[y, x]
    return np.linalg.solve(A, b).reshape(h, w)


# ---------------------------------------------------------------------------
# Alpha

class TestAlphaBlend:
    def test_mask_one_returns_fg_bit_exact(self):
        rng = np.random.default_rng(0)
        fg, bg = random_pair(rng)
        out = alpha_blend(fg, bg, Mask(np.ones((16, 16))))
        assert np.array_equal(out.data, fg.data)

    def test_mask_zero_returns_bg_bit_exact(self):
        rng = np.random.default_rng(1)
        fg, bg = random_pair(rng)
        out = alpha_blend(fg, bg, Mask(np.zeros((16, 16))))
        assert np.array_equal(out.data, bg.data)

    def test_constant_midpoint(self):
        fg = ImageBuffer(np.full((3, 8, 8), 0.8))
        bg = ImageBuffer(np.full((3, 8, 8), 0.2))
        out = alpha_blend(fg, bg, Mask(np.full((8, 8), 0.5)))
        assert np.array_equal(out.data, np.full((3, 8, 8), 0.5))

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(2)
        fg, _ = random_pair(rng, 16, 16)
        _, bg = random_pair(rng, 8, 8)
        with pytest.raises(ShapeMismatchError):
            alpha_blend(fg, bg, Mask(np.ones((16, 16))))
        fg2, bg2 = random_pair(rng, 16, 16)
        with pytest.raises(ShapeMismatchError):
            alpha_blend(fg2, bg2, Mask(np.ones((8, 8))))

    def test_output_bounded_by_inputs(self):
        rng = np.random.default_rng(3)
        fg, bg = random_pair(rng)
        mask = Mask(rng.uniform(0, 1, (16, 16)))
        out = alpha_blend(fg, bg, mask)
        lo = np.minimum(fg.data, bg.data)
        hi = np.maximum(fg.data, bg.data)
        assert (out.data >= lo - 1e-12).all()
        assert (out.data <= hi + 1e-12).all()


# ---------------------------------------------------------------------------
# Laplacian pyramid

class TestLaplacianBlend:
    def test_equal_inputs_pass_through(self):
        rng = np.random.default_rng(4)
        img = ImageBuffer(rng.uniform(0, 1, (3, 32, 32)))
        mask = Mask(rng.uniform(0, 1, (32, 32)))
        out = laplacian_blend(img, img, mask, 3)
        assert np.abs(out.data - img.data).max() < 1e-5

    def test_mask_all_one_returns_fg(self):
        rng = np.random.default_rng(5)
        fg, bg = random_pair(rng, 32, 32)
        out = laplacian_blend(fg, bg, Mask(np.ones((32, 32))), 4)
        assert np.abs(out.data - fg.data).max() < 1e-5

    def test_step_edge_matches_naive_oracle(self):
        fg = np.zeros((3, 32, 32))
        fg[:, :, :16] = 0.8
        fg[:, :, 16:] = 0.3
        bg = np.zeros((3, 32, 32))
        bg[:, :16, :] = 0.2
        bg[:, 16:, :] = 0.6
        mask = np.zeros((32, 32))
        mask[:, :16] = 1.0
        out = laplacian_blend(ImageBuffer(fg), ImageBuffer(bg), Mask(mask), 3)
        oracle = naive_laplacian_blend(fg, bg, mask, 3)
        assert np.abs(out.data - oracle).max() < 1e-5

    def test_single_level_equals_alpha(self):
        rng = np.random.default_rng(6)
        fg, bg = random_pair(rng, 32, 32)
        mask = Mask((rng.uniform(0, 1, (32, 32)) > 0.5).astype(float))
        lap = laplacian_blend(fg, bg, mask, 1)
        alpha = alpha_blend(fg, bg, mask)
        assert np.abs(lap.data - alpha.data).max() < 1e-5

    def test_build_collapse_reconstructs(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            planes = rng.uniform(0, 1, (3, 64, 64))
            for levels in range(1, 5):
                rec = collapse_laplacian_pyramid(
                    build_laplacian_pyramid(planes, levels)
                )
                rms = math.sqrt(float(((rec - planes) ** 2).mean()))
                assert rms <= 1e-5

    def test_levels_too_deep(self):
        rng = np.random.default_rng(8)
        fg, bg = random_pair(rng, 16, 16)
        mask = Mask(np.ones((16, 16)))
        assert max_pyramid_levels(16, 16) == 4
        with pytest.raises(InvalidParameterError):
            laplacian_blend(fg, bg, mask, 5)
        with pytest.raises(InvalidParameterError):
            laplacian_blend(fg, bg, mask, 0)

    def test_odd_dimensions_supported(self):
        rng = np.random.default_rng(9)
        fg, bg = random_pair(rng, 21, 13)
        mask = Mask(rng.uniform(0, 1, (21, 13)))
        out = laplacian_blend(fg, bg, mask, 3)
        assert out.data.shape == (3, 21, 13)


# ---------------------------------------------------------------------------
# Poisson

class TestPoissonBlend:
    @staticmethod
    def interior(h=16, w=16, y0=5, y1=11, x0=5, x1=11):
        inside = np.zeros((h, w), dtype=bool)
        inside[y0:y1, x0:x1] = True
        return inside

    def test_constant_fg_into_constant_bg(self):
        fg = ImageBuffer(np.full((3, 16, 16), 0.9))
        bg = ImageBuffer(np.full((3, 16, 16), 0.3))
        out = poisson_blend(fg, bg, Mask(self.interior().astype(float)))
        assert np.abs(out.data - 0.3).max() < 1e-5

    def test_equal_inputs_return_bg(self):
        rng = np.random.default_rng(10)
        img = ImageBuffer(rng.uniform(0, 1, (3, 16, 16)))
        out = poisson_blend(img, img, Mask(self.interior().astype(float)))
        assert np.abs(out.data - img.data).max() < 1e-5

    def test_matches_dense_direct_solve(self):
        rng = np.random.default_rng(11)
        inside = self.interior()
        for _ in range(5):
            src = rng.uniform(0, 1, (16, 16))
            tgt = rng.uniform(0, 1, (16, 16))
            plane, residual, iters = solve_masked_poisson(src, tgt, inside, 1e-8)
            oracle = dense_poisson_solve(src, tgt, inside)
            assert np.abs(plane - oracle).max() < 1e-4
            assert residual <= 1e-8

    def test_outside_region_is_bg_bit_exact(self):
        rng = np.random.default_rng(12)
        fg, bg = random_pair(rng)
        inside = self.interior()
        out = poisson_blend(fg, bg, Mask(inside.astype(float)))
        assert np.array_equal(out.data[:, ~inside], bg.data[:, ~inside])

    def test_region_touching_border_rejected(self):
        rng = np.random.default_rng(13)
        fg, bg = random_pair(rng)
        mask = np.zeros((16, 16))
        mask[0:4, 5:9] = 1.0
        with pytest.raises(InvalidRegionError):
            poisson_blend(fg, bg, Mask(mask))

    def test_empty_region_rejected(self):
        rng = np.random.default_rng(14)
        fg, bg = random_pair(rng)
        with pytest.raises(InvalidRegionError):
            poisson_blend(fg, bg, Mask(np.zeros((16, 16))))

    def test_soft_mask_rejected(self):
        rng = np.random.default_rng(15)
        fg, bg = random_pair(rng)
        mask = np.zeros((16, 16))
        mask[5:11, 5:11] = 0.5
        with pytest.raises(InvalidParameterError):
            poisson_blend(fg, bg, Mask(mask))

    def test_nonconvergence_carries_residual(self):
        rng = np.random.default_rng(16)
        src = rng.uniform(0, 1, (16, 16))
        tgt = rng.uniform(0, 1, (16, 16))
        with pytest.raises(ConvergenceError) as err:
            solve_masked_poisson(src, tgt, self.interior(), 1e-14, max_iters=1)
        assert err.value.residual is not None and err.value.residual > 1e-14

    def test_iteration_budget_respected(self):
        rng = np.random.default_rng(17)
        src = rng.uniform(0, 1, (16, 16))
        tgt = rng.uniform(0, 1, (16, 16))
        _, residual, iters = solve_masked_poisson(
            src, tgt, self.interior(), 1e-8, max_iters=500
        )
        assert iters <= 500 and residual <= 1e-8


# ---------------------------------------------------------------------------
# Mode dispatch and cross-mode agreement

class TestBlendModes:
    def test_all_modes_agree_on_equal_inputs(self):
        rng = np.random.default_rng(18)
        img = ImageBuffer(rng.uniform(0, 1, (3, 32, 32)))
        mask = np.zeros((32, 32))
        mask[8:24, 8:24] = 1.0
        for mode in (AlphaMode(), LaplacianPyramidMode(3), PoissonMode()):
            out = blend_with_mode(img, img, Mask(mask), mode)
            assert np.abs(out.data - img.data).max() < 1e-5

    def test_mode_validation(self):
        with pytest.raises(InvalidParameterError):
            LaplacianPyramidMode(0)
        with pytest.raises(InvalidParameterError):
            PoissonMode(tolerance=0.0)
        with pytest.raises(InvalidParameterError):
            PoissonMode(max_iters=0)
