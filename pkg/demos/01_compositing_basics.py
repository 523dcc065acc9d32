"""
Alpha compositing basics
========================

Build a synthetic portrait, brighten its facial region, and paste it back
through a hard and a soft mask. The hard paste leaves a sharp boundary at
the hull outline; blurring the mask (sigma=7) removes it.
"""

from pathlib import Path

from blendforge import (
    adjust_brightness,
    alpha_blend,
    probe_mask,
    save_image,
    save_mask,
)
from blendforge.synthetic import make_face_image

out_dir = Path(__file__).parent / "output" / "01_compositing_basics"
out_dir.mkdir(parents=True, exist_ok=True)

# A deterministic synthetic face plus landmarks on its outline.
img, landmarks = make_face_image(seed=3, size=224)
save_image(img, out_dir / "source.png")

# The facial region is the convex hull of the landmarks.
hard = probe_mask(landmarks, img.width, img.height, mode="hard")
soft = probe_mask(landmarks, img.width, img.height, mode="soft", sigma=7.0)
save_mask(hard, out_dir / "mask_hard.png")
save_mask(soft, out_dir / "mask_soft.png")

# Brighten the whole frame by 60%, then composite only the facial region.
bright = adjust_brightness(img, 0.6)
for name, mask in (("hard", hard), ("soft", soft)):
    composite = alpha_blend(bright, img, mask)
    save_image(composite, out_dir / f"composited_{name}.png")
    print(f"{name:>4} mask: mean inside region "
          f"{composite.data[:, mask.data > 0].mean():.3f} "
          f"vs source {img.data[:, mask.data > 0].mean():.3f}")

print(f"wrote {len(list(out_dir.iterdir()))} files to {out_dir}")
