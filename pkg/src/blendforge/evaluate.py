"""Tie-aware AUROC, frame-to-video aggregation, ensemble fusion, label-mix
manifests, and report rendering.

AUROC uses the rank-sum (Mann-Whitney) statistic: over all (fake, real)
pairs, a fake scoring higher counts 1, a tie 0.5, divided by the number of
pairs. This equals the trapezoidal ROC area and is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ManifestIntegrityError, ScoreJoinError, UndefinedMetricError
from .manifest import Label, Manifest, ScoreTable
from .seam import score_video

__all__ = [
    "auroc",
    "aggregate_video",
    "ensemble_mean",
    "mix_manifests",
    "render_report",
    "write_report",
]


def auroc(scored: Iterable[tuple[float, Label | str]]) -> float:
    """Area under the ROC curve for (score, label) pairs; fake is positive."""
    scores = []
    is_fake = []
    for score, label in scored:
        scores.append(float(score))
        is_fake.append(Label.parse(label) is Label.FAKE)
    scores = np.asarray(scores, dtype=np.float64)
    fake = np.asarray(is_fake, dtype=bool)
    n_fake = int(fake.sum())
    n_real = fake.size - n_fake
    if n_fake == 0 or n_real == 0:
        raise UndefinedMetricError(
            f"AUROC needs both classes, got {n_fake} fake / {n_real} real"
        )
    # Midranks: average rank within each tie group.
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    ranks = np.empty(scores.size, dtype=np.float64)
    start = 0
    for stop in range(1, scores.size + 1):
        if stop == scores.size or sorted_scores[stop] != sorted_scores[start]:
            ranks[order[start:stop]] = 0.5 * (start + stop + 1)
            start = stop
    rank_sum = float(ranks[fake].sum())
    return (rank_sum - n_fake * (n_fake + 1) / 2.0) / (n_fake * n_real)


def aggregate_video(
    table: ScoreTable, manifest: Manifest, k: int = 32
) -> list[tuple[str, float, Label]]:
    """Per-video scores: mean over ``k`` evenly sampled scored frames.

    Frames within a video are ordered by frame index; the video inherits
    the (single) label of its frames.
    """
    unknown = sorted(set(table.keys()) - {r.key for r in manifest.records})
    if unknown:
        raise ScoreJoinError(
            f"{len(unknown)} scored keys missing from manifest, "
            f"first: {unknown[0]}"
        )
    by_video: dict[str, list[tuple[int, float]]] = {}
    labels: dict[str, Label] = {}
    for rec in manifest.records:
        prev = labels.setdefault(rec.video_id, rec.label)
        if prev is not rec.label:
            raise ManifestIntegrityError(
                f"video {rec.video_id!r} mixes real and fake frames"
            )
        if rec.key in table.entries:
            by_video.setdefault(rec.video_id, []).append(
                (rec.frame_idx, table.entries[rec.key])
            )
    missing = [vid for vid in labels if vid not in by_video]
    if missing:
        raise ScoreJoinError(
            f"{len(missing)} videos have no scored frames, first: {missing[0]!r}"
        )
    results = []
    for video_id in manifest.video_ids():
        frames = sorted(by_video[video_id])
        ordered = [score for _, score in frames]
        results.append((video_id, score_video(ordered, k), labels[video_id]))
    return results


def ensemble_mean(tables: Sequence[ScoreTable]) -> ScoreTable:
    """Per-key arithmetic mean of several score tables (no weights).

    Requires identical key sets. Averaging identical values returns them
    unchanged, so an ensemble of copies is exactly the original table.
    """
    if not tables:
        raise ScoreJoinError("ensemble needs at least one score table")
    base_keys = set(tables[0].keys())
    for i, table in enumerate(tables[1:], start=2):
        diff = base_keys.symmetric_difference(table.keys())
        if diff:
            raise ScoreJoinError(
                f"table {i} key set differs ({len(diff)} keys, "
                f"first: {sorted(diff)[0]})"
            )
    out = {}
    for key in tables[0].keys():
        values = [t.entries[key] for t in tables]
        if min(values) == max(values):
            out[key] = values[0]
        else:
            out[key] = math.fsum(values) / len(values)
    return ScoreTable(out)


def mix_manifests(
    base: Manifest,
    extra: Manifest,
    assign: Label | str,
    namespace: str = "mix",
    name: str | None = None,
) -> Manifest:
    """Relabel ``extra``'s records to ``assign`` and append them to ``base``.

    Extra video ids are namespaced (``<namespace>/<video_id>``) before the
    collision check. The resulting metadata records the configuration name.
    """
    assign = Label.parse(assign)
    relabeled = [
        replace(rec, label=assign, video_id=f"{namespace}/{rec.video_id}")
        for rec in extra.records
    ]
    base_keys = {r.key for r in base.records}
    clash = [r.key for r in relabeled if r.key in base_keys]
    if clash:
        raise ManifestIntegrityError(
            f"{len(clash)} key collisions after namespacing, first: {clash[0]}"
        )
    if name is None:
        suffix = "R" if assign is Label.REAL else "F"
        name = f"{base.metadata.get('name', 'base')}+{namespace}={suffix}"
    metadata = dict(base.metadata)
    metadata["mix"] = {
        "name": name,
        "assign": assign.value,
        "namespace": namespace,
        "extra_records": len(relabeled),
    }
    return Manifest(tuple(base.records) + tuple(relabeled), metadata)


def _format_pct(value: float) -> str:
    return f"{100.0 * value:.1f}"


def render_report(
    results: Mapping[str, float],
    exclude_from_mean: Sequence[str] = (),
) -> tuple[str, str]:
    """Render one-row AUROC tables (CSV text, Markdown text).

    Columns are the datasets in the given order plus a final unweighted
    mean; values print as percentages with one decimal. Datasets named in
    ``exclude_from_mean`` still appear but do not enter the mean.
    """
    if not results:
        raise UndefinedMetricError("report needs at least one dataset result")
    excluded = set(exclude_from_mean)
    names = list(results)
    mean_values = [results[n] for n in names if n not in excluded]
    if not mean_values:
        raise UndefinedMetricError("all datasets excluded from the mean")
    mean = math.fsum(mean_values) / len(mean_values)
    header = names + ["mean"]
    row = [_format_pct(results[n]) for n in names] + [_format_pct(mean)]
    csv_text = ",".join(header) + "\n" + ",".join(row) + "\n"
    md_lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
        "| " + " | ".join(row) + " |",
    ]
    return csv_text, "\n".join(md_lines) + "\n"


def write_report(
    results: Mapping[str, float],
    out_dir,
    exclude_from_mean: Sequence[str] = (),
) -> None:
    """Write ``report.csv`` and ``report.md`` into ``out_dir``."""
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_text, md_text = render_report(results, exclude_from_mean)
    (out_dir / "report.csv").write_text(csv_text, encoding="utf-8")
    (out_dir / "report.md").write_text(md_text, encoding="utf-8")
