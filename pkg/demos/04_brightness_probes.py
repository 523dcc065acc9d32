"""
Real-on-Real brightness probes
==============================

Non-generative manipulations: the facial region is brightened in 10%
steps and pasted back, with hard or soft (sigma=7) masks. Each "fake"
gets a control "real" whose global brightness is adjusted so both images
share the same mean, leaving the compositing boundary as the only cue.
"""

from pathlib import Path

from blendforge import ProbeSpec, generate_probe_dataset, load_landmarks, Manifest
from blendforge.synthetic import write_fixture_corpus

root = Path(__file__).parent / "output" / "04_brightness_probes"
root.mkdir(parents=True, exist_ok=True)

# A small on-disk corpus of synthetic frames with landmarks.
manifest_path, landmarks_path = write_fixture_corpus(
    root / "corpus", n_videos=4, frames_per_video=1, size=160, seed=30
)
manifest = Manifest.load(manifest_path)
landmarks = load_landmarks(landmarks_path)

for mode in ("hard", "soft"):
    spec = ProbeSpec(deltas=(0.0, 0.2, 0.6, 1.0), mask_mode=mode, mask_sigma=7.0)
    out = generate_probe_dataset(manifest, landmarks, spec, root / mode)
    out.save(root / mode / "manifest.json")
    subsets = sorted(p.name for p in (root / mode).iterdir() if p.is_dir())
    print(f"{mode}: wrote subsets {subsets}")

print("each subset pairs fake/ and real/ images with identical means;")
print("compare delta_100_hard against delta_100_soft to see the seam vanish")
