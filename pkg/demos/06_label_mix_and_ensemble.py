"""
Label mixing and ensemble fusion
================================

Two evaluation-protocol mechanics on synthetic score tables:

1. Label mixing: append blended samples to a training catalog under
   either the real or the fake label. For a detector that keys on
   blending artifacts, assigning them to "real" (the conflicting label)
   drops AUROC; assigning them to "fake" raises it.
2. Ensembles: averaging probabilities from detectors with different
   failure modes beats either one alone.
"""

import numpy as np

from blendforge import (
    Label,
    Manifest,
    SampleRecord,
    ScoreTable,
    aggregate_video,
    auroc,
    ensemble_mean,
    mix_manifests,
)

rng = np.random.default_rng(77)


def catalog(prefix, label, n, tag=""):
    return [SampleRecord(f"{prefix}{i}.png", label, f"{prefix}{i}", 0, tag) for i in range(n)]


base = Manifest(tuple(catalog("real", Label.REAL, 40) + catalog("fake", Label.FAKE, 40)))
extra = Manifest(tuple(catalog("blend", Label.FAKE, 40, tag="sbi")))

# A "blending searcher": reals score low, native fakes and blended
# samples both score high.
scores = {}
for rec in base.records:
    lo, hi = (0.05, 0.45) if rec.label is Label.REAL else (0.55, 0.95)
    scores[rec.key] = float(rng.uniform(lo, hi))
for rec in extra.records:
    scores[("sbi/" + rec.video_id, rec.frame_idx)] = float(rng.uniform(0.55, 0.95))

print("label-mix configurations:")
for assign in (Label.FAKE, Label.REAL):
    mixed = mix_manifests(base, extra, assign, namespace="sbi")
    table = ScoreTable({rec.key: scores[rec.key] for rec in mixed.records})
    videos = aggregate_video(table, mixed)
    value = auroc([(s, lab) for _, s, lab in videos])
    print(f"  blended samples labeled {assign.value:>4}: AUROC = {100 * value:.1f}%")

# Ensemble: detector A is good on half the videos, detector B on the
# other half; the probability average covers both failure modes.
videos = [(f"v{i}", 0, Label.REAL if i % 2 else Label.FAKE) for i in range(40)]
manifest = Manifest(
    tuple(SampleRecord(f"{v}.png", lab, v, f) for v, f, lab in videos)
)
table_a, table_b = {}, {}
for i, (v, f, lab) in enumerate(videos):
    good = float(rng.uniform(0.7, 1.0)) if lab is Label.FAKE else float(rng.uniform(0.0, 0.3))
    coin_flip = float(rng.uniform(0.0, 1.0))
    if i < 20:
        table_a[(v, f)], table_b[(v, f)] = good, coin_flip
    else:
        table_a[(v, f)], table_b[(v, f)] = coin_flip, good

for name, table in (
    ("A alone", table_a),
    ("B alone", table_b),
    ("mean(A, B)", ensemble_mean([ScoreTable(table_a), ScoreTable(table_b)]).entries),
):
    videos_scored = aggregate_video(ScoreTable(table), manifest)
    value = auroc([(s, lab) for _, s, lab in videos_scored])
    print(f"  {name:>10}: AUROC = {100 * value:.1f}%")
