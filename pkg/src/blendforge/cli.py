"""Command-line pipelines: dataset generation, scoring, and evaluation.

Every command is a pure function of (inputs, flags, seed); reruns produce
byte-identical artifact trees. Fatal errors print one machine-readable
JSON object to stderr and exit nonzero.

Subcommands: gen-sbi, gen-probes, score, auroc, ensemble, mix-manifest,
report. The base seed comes from --seed, falling back to the
BLENDFORGE_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .errors import BlendforgeError, InvalidParameterError
from .evaluate import aggregate_video, auroc, ensemble_mean, mix_manifests, write_report
from .geometry import load_landmarks
from .image import load_image
from .manifest import Manifest, ScoreTable
from .probes import ProbeSpec, generate_probe_dataset
from .sbi import SbiParams, generate_sbi_batch
from .seam import score_frame


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("BLENDFORGE_SEED")
    return int(env) if env else 0


def _prepare_out_dir(path: str, overwrite: bool) -> Path:
    out = Path(path)
    if out.exists() and any(out.iterdir()) and not overwrite:
        raise InvalidParameterError(
            f"output directory {out} is not empty; pass --overwrite to reuse it"
        )
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(manifest_path: str, landmarks_path: str):
    if not Path(manifest_path).exists():
        raise InvalidParameterError(f"manifest not found: {manifest_path}")
    if not Path(landmarks_path).exists():
        raise InvalidParameterError(f"landmark file not found: {landmarks_path}")
    manifest = Manifest.load(manifest_path)
    manifest.validate()
    return manifest, load_landmarks(landmarks_path)


def _sbi_params_from_file(path: str | None) -> SbiParams:
    if path is None:
        return SbiParams()
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return SbiParams.from_dict(doc)


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_gen_sbi(args) -> int:
    manifest, landmarks = _load_inputs(args.manifest, args.landmarks)
    out_dir = _prepare_out_dir(args.out, args.overwrite)
    params = _sbi_params_from_file(args.params)
    seed = _resolve_seed(args.seed)
    result = generate_sbi_batch(
        manifest, landmarks, params, seed, out_dir, threads=args.threads
    )
    result.save(out_dir / "manifest.json")
    n_fake = sum(1 for r in result.records if r.label.value == "fake")
    n_real = len(result) - n_fake
    skipped = len(result.metadata.get("skipped", []))
    print(f"gen-sbi: {n_real} real, {n_fake} fake, {skipped} skipped -> {out_dir}")
    return 0


def _cmd_gen_probes(args) -> int:
    manifest, landmarks = _load_inputs(args.manifest, args.landmarks)
    out_dir = _prepare_out_dir(args.out, args.overwrite)
    deltas = tuple(float(d) for d in args.deltas.split(","))
    spec = ProbeSpec(
        deltas=deltas,
        mask_mode=args.mask,
        mask_sigma=args.sigma,
        seed=_resolve_seed(args.seed),
    )
    result = generate_probe_dataset(
        manifest, landmarks, spec, out_dir, threads=args.threads
    )
    result.save(out_dir / "manifest.json")
    print(
        f"gen-probes: {len(deltas)} delta subsets, {len(result)} samples -> {out_dir}"
    )
    return 0


def _cmd_score(args) -> int:
    manifest = Manifest.load(args.manifest)
    manifest.validate()

    def score_one(rec):
        return rec.key, score_frame(
            load_image(rec.path), args.blur_sigma, args.percentile
        ).value

    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            entries = list(pool.map(score_one, manifest.records))
    else:
        entries = [score_one(rec) for rec in manifest.records]
    ScoreTable(entries).save_csv(args.out)
    print(f"score: {len(entries)} frames -> {args.out}")
    return 0


def _cmd_auroc(args) -> int:
    manifest = Manifest.load(args.manifest)
    table = ScoreTable.load_csv(args.scores)
    videos = aggregate_video(table, manifest, k=args.frames_per_video)
    value = auroc([(score, label) for _, score, label in videos])
    print(f"{100.0 * value:.1f}")
    return 0


def _cmd_ensemble(args) -> int:
    tables = [ScoreTable.load_csv(p) for p in args.scores]
    ensemble_mean(tables).save_csv(args.out)
    print(f"ensemble: {len(tables)} tables -> {args.out}")
    return 0


def _cmd_mix_manifest(args) -> int:
    base = Manifest.load(args.base)
    extra = Manifest.load(args.extra)
    mixed = mix_manifests(
        base, extra, args.assign, namespace=args.namespace, name=args.name
    )
    mixed.save(args.out)
    print(f"mix-manifest: {len(mixed)} records -> {args.out}")
    return 0


def _cmd_report(args) -> int:
    results = json.loads(Path(args.results).read_text(encoding="utf-8"))
    if not isinstance(results, dict):
        raise InvalidParameterError("results file must map dataset name to AUROC")
    write_report(results, args.out_dir, exclude_from_mean=args.exclude or ())
    print(f"report: {len(results)} datasets -> {args.out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blendforge",
        description="Blending-artifact dataset synthesis and evaluation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen_sbi = sub.add_parser("gen-sbi", help="generate self-blended pseudo-fakes")
    gen_sbi.add_argument("--manifest", required=True, help="input manifest JSON (reals)")
    gen_sbi.add_argument("--landmarks", required=True, help="landmark JSON file")
    gen_sbi.add_argument("--out", required=True, help="output directory")
    gen_sbi.add_argument("--seed", type=int, default=None)
    gen_sbi.add_argument("--params", default=None, help="SBI parameter JSON file")
    gen_sbi.add_argument("--threads", type=int, default=os.cpu_count())
    gen_sbi.add_argument("--overwrite", action="store_true")
    gen_sbi.set_defaults(func=_cmd_gen_sbi)

    gen_probes = sub.add_parser(
        "gen-probes", help="generate Real-on-Real brightness probe datasets"
    )
    gen_probes.add_argument("--manifest", required=True)
    gen_probes.add_argument("--landmarks", required=True)
    gen_probes.add_argument("--out", required=True)
    gen_probes.add_argument(
        "--deltas",
        default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
        help="comma-separated brightness deltas",
    )
    gen_probes.add_argument("--mask", choices=("hard", "soft"), default="hard")
    gen_probes.add_argument("--sigma", type=float, default=7.0)
    gen_probes.add_argument("--seed", type=int, default=None)
    gen_probes.add_argument("--threads", type=int, default=os.cpu_count())
    gen_probes.add_argument("--overwrite", action="store_true")
    gen_probes.set_defaults(func=_cmd_gen_probes)

    score = sub.add_parser("score", help="score a manifest with the seam detector")
    score.add_argument("--manifest", required=True)
    score.add_argument("--out", required=True, help="output CSV path")
    score.add_argument("--blur-sigma", type=float, default=2.0)
    score.add_argument("--percentile", type=float, default=99.5)
    score.add_argument("--threads", type=int, default=os.cpu_count())
    score.set_defaults(func=_cmd_score)

    auroc_cmd = sub.add_parser("auroc", help="video-level AUROC of a score table")
    auroc_cmd.add_argument("--manifest", required=True)
    auroc_cmd.add_argument("--scores", required=True)
    auroc_cmd.add_argument("--frames-per-video", type=int, default=32)
    auroc_cmd.set_defaults(func=_cmd_auroc)

    ensemble = sub.add_parser("ensemble", help="average several score tables")
    ensemble.add_argument("--scores", nargs="+", required=True)
    ensemble.add_argument("--out", required=True)
    ensemble.set_defaults(func=_cmd_ensemble)

    mix = sub.add_parser("mix-manifest", help="relabel and append a second manifest")
    mix.add_argument("--base", required=True)
    mix.add_argument("--extra", required=True)
    mix.add_argument("--assign", choices=("real", "fake"), required=True)
    mix.add_argument("--namespace", default="mix")
    mix.add_argument("--name", default=None)
    mix.add_argument("--out", required=True)
    mix.set_defaults(func=_cmd_mix_manifest)

    report = sub.add_parser("report", help="render AUROC tables (CSV + Markdown)")
    report.add_argument("--results", required=True, help="JSON: {dataset: auroc}")
    report.add_argument("--out-dir", required=True)
    report.add_argument("--exclude", nargs="*", default=None, help="datasets excluded from the mean")
    report.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BlendforgeError as err:
        payload = {"error": {"code": err.code, "message": str(err)}}
    except json.JSONDecodeError as err:
        # err already carries line/column diagnostics in its message
        payload = {"error": {"code": "schema", "message": str(err)}}
    except (OSError, ValueError) as err:
        payload = {"error": {"code": "io", "message": str(err)}}
    print(json.dumps(payload), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
