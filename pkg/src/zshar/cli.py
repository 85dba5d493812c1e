"""Command-line front end: synth, split, train, eval, explain.

Exit codes: 0 success, 1 internal/numeric failure, 2 user/config error.
Every command is deterministic under a fixed seed and echoes the seed in
its output metadata.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data, metrics, model, render
from .errors import NumericError, UserError


def _load_config_overrides(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UserError(f"--config file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UserError(f"--config {p}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise UserError(f"--config {p}: expected a JSON object")
    return doc


def cmd_synth(args) -> int:
    cfg = data.SynthConfig(
        classes=args.classes,
        superclasses=args.superclasses,
        samples_per_class=args.samples_per_class,
        n=args.n,
        d=args.d,
        frames=args.frames,
        skeletons_per_class=args.skeletons_per_class,
        embedding_dim=args.embedding_dim,
        folds=args.folds,
        seed=args.seed,
        name=args.name,
    )
    for key, value in _load_config_overrides(args.config).items():
        if not hasattr(cfg, key):
            raise UserError(f"--config: unknown synth option {key!r}")
        setattr(cfg, key, value)
    manifest = data.synth_generate(cfg, Path(args.out))
    print(f"wrote fixture dataset to {manifest} (seed={cfg.seed})")
    return 0


def cmd_split(args) -> int:
    dataset = data.load_dataset(Path(args.manifest))
    n_folds = args.folds if args.folds is not None else dataset.manifest.folds
    folds = data.kfold_split(
        dataset.classes, dataset.superclasses,
        folds=n_folds, unseen_per_fold=args.unseen_per_fold, seed=args.seed,
    )
    out = Path(args.out)
    data.write_folds_json(out, folds, seed=args.seed)
    print(f"wrote {len(folds)} folds to {out} (seed={args.seed})")
    return 0


def _train_config_from(args, manifest: data.DatasetManifest) -> model.TrainConfig:
    fields = dict(
        lam=args.lam,
        alpha=args.alpha,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch=args.batch,
        hidden=args.hidden,
        stacks=args.stacks,
        dropout=args.dropout,
        seed=args.seed,
        decoder_frames=args.decoder_frames,
        joints=manifest.joints,
        dims=manifest.dims,
        pooling=args.pooling,
    )
    overrides = _load_config_overrides(args.config)
    unknown = [k for k in overrides if k not in model.TrainConfig.__dataclass_fields__]
    if unknown:
        raise UserError(f"--config: unknown training option(s) {unknown}")
    fields.update(overrides)
    return model.TrainConfig(**fields)


def cmd_train(args) -> int:
    dataset = data.load_dataset(Path(args.manifest))
    folds = data.read_folds_json(Path(args.folds_file))
    if not (0 <= args.fold < len(folds)):
        raise UserError(f"fold {args.fold} out of range; folds file has {len(folds)}")
    fold = folds[args.fold]
    config = _train_config_from(args, dataset.manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    params, log = model.train(dataset, fold, config)

    log_path = out_dir / "train_log.jsonl"
    with open(log_path, "w", encoding="utf-8") as fh:
        for entry in log:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    ckpt_path = out_dir / "checkpoint.ckpt"
    model.save_checkpoint(
        params, config, ckpt_path, fold=fold,
        meta={"seed": config.seed, "manifest": dataset.manifest.name, "fold": fold.index},
    )
    best = max(e["val_accuracy"] for e in log)
    print(f"trained fold {fold.index} for {config.epochs} epochs (seed={config.seed})")
    print(f"best validation accuracy: {best:.3f}")
    print(f"checkpoint: {ckpt_path}")
    print(f"training log: {log_path}")
    return 0


def _resolve_fold(args, ckpt: model.Checkpoint) -> data.FoldSpec:
    if args.folds_file:
        folds = data.read_folds_json(Path(args.folds_file))
        if not (0 <= args.fold < len(folds)):
            raise UserError(f"fold {args.fold} out of range; folds file has {len(folds)}")
        return folds[args.fold]
    if ckpt.fold is None:
        raise UserError("checkpoint carries no fold; pass --folds-file and --fold")
    return ckpt.fold


def cmd_eval(args) -> int:
    ckpt = model.load_checkpoint(Path(args.checkpoint))
    dataset = data.load_dataset(Path(args.manifest))
    fold = _resolve_fold(args, ckpt)
    result = model.evaluate_fold(dataset, fold, ckpt.params)
    meta = {
        "seed": ckpt.config.seed,
        "dataset": dataset.manifest.name,
        "fold": fold.index,
        "unseen_classes": sorted(fold.unseen),
        "n_samples": len(result.predictions),
    }
    doc = metrics.report_to_json(result.accuracy, result.alignment, result.realism, meta)
    out = Path(args.out)
    out.write_text(doc + "\n", encoding="utf-8")
    name = dataset.manifest.name
    print(f"average accuracy per class: {result.accuracy:.4f}")
    print(metrics.render_alignment_table({name: result.alignment}))
    print(metrics.render_realism_table({name: result.realism}))
    print(f"report: {out}")
    return 0


def cmd_explain(args) -> int:
    ckpt = model.load_checkpoint(Path(args.checkpoint))
    dataset = data.load_dataset(Path(args.manifest))
    fold = _resolve_fold(args, ckpt)
    window = dataset.window_by_id(args.sample_id)
    unseen = dataset.semantics.restrict(sorted(fold.unseen))
    references = [
        (cls, seq) for cls in sorted(fold.seen) for seq in dataset.skeletons[cls]
    ]
    explanation = model.explain(window, ckpt.params, unseen, references)
    prediction = model.predict_unseen(window, ckpt.params, unseen)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "generated.csv"
    data.write_skeleton_csv(csv_path, explanation.generated)
    frame_paths = render.write_svg_frames(explanation.generated, out_dir / "frames")
    doc = {
        "sample_id": window.id,
        "true_label": window.label,
        "predicted_class": explanation.predicted_class,
        "matching_seen_class": explanation.matching_seen_class,
        "dtw_to_match": explanation.dtw_to_match,
        "scores": prediction.scores,
        "probabilities": prediction.probabilities,
        "frames": explanation.generated.frames,
        "joints": explanation.generated.joints,
        "dims": explanation.generated.dims,
        "seed": ckpt.config.seed,
        "files": {"skeleton_csv": csv_path.name, "svg_frames": len(frame_paths)},
    }
    (out_dir / "explanation.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"predicted class: {explanation.predicted_class}")
    print(f"matching seen class: {explanation.matching_seen_class} "
          f"(DTW {explanation.dtw_to_match:.3f})")
    print(f"wrote {len(frame_paths)} SVG frames and {csv_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zshar",
        description="Zero-shot IMU activity recognition with skeleton-video explanations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic fixture dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--superclasses", type=int, default=3)
    p.add_argument("--samples-per-class", type=int, default=40)
    p.add_argument("--n", type=int, default=64, help="IMU window length")
    p.add_argument("--d", type=int, default=6, help="IMU feature dimension")
    p.add_argument("--frames", type=int, default=32, help="skeleton frames per video")
    p.add_argument("--skeletons-per-class", type=int, default=10)
    p.add_argument("--embedding-dim", type=int, default=16)
    p.add_argument("--folds", type=int, default=4)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--name", default="synth")
    p.add_argument("--config", help="JSON file whose keys override the flags")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="write super-class-stratified seen/unseen folds")
    p.add_argument("--manifest", required=True)
    p.add_argument("--folds", type=int, default=None,
                   help="defaults to the manifest's fold count")
    p.add_argument("--unseen-per-fold", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="folds JSON path")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train on a fold's seen classes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--folds-file", required=True)
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--stacks", type=int, default=2)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-2,
                   help="classification loss weight")
    p.add_argument("--alpha", type=float, default=0.6,
                   help="reconstruction loss weight")
    p.add_argument("--decoder-frames", type=int, default=32)
    p.add_argument("--pooling", choices=["last", "mean"], default="last")
    p.add_argument("--config", help="JSON file whose keys override the flags")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="zero-shot evaluation on a fold's unseen classes")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--folds-file", help="defaults to the fold stored in the checkpoint")
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("explain", help="explain one sample with a skeleton animation")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--sample-id", required=True)
    p.add_argument("--folds-file", help="defaults to the fold stored in the checkpoint")
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
