"""Command-line entry point: train, eval, ablate, task-grid, stats, gradcheck."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path


from . import harness
from .checkpoint import save_checkpoint
from .config import TrainConfig, read_config_file
from .dataset import label_statistics, load_dataset, split_dataset
from .encoders import EmbeddingProviders, open_embedding_store
from .errors import MMSAIRError
from .synth import make_synthetic_dataset


def _add_config_flags(p):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    flags = TrainConfig().to_flat()
    for key in flags:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def _add_provider_flags(p):
    p.add_argument("--context-store", type=Path, help="precomputed context embedding store")
    p.add_argument("--sticker-text-store", type=Path, help="precomputed sticker-text store")
    p.add_argument("--image-store", type=Path, help="precomputed raw image-vector store")
    p.add_argument("--image-root", type=Path, help="directory for toy-mode sticker images")


def _build_config(args):
    flat = {}
    if args.config:
        flat.update(read_config_file(args.config))
    for key in TrainConfig().to_flat():
        val = getattr(args, key, None)
        if val is not None:
            flat[key] = val
    return TrainConfig.from_flat(flat)


def _build_providers(args):
    return EmbeddingProviders(
        context_store=open_embedding_store(args.context_store) if args.context_store else None,
        sticker_text_store=(
            open_embedding_store(args.sticker_text_store) if args.sticker_text_store else None
        ),
        image_store=open_embedding_store(args.image_store) if args.image_store else None,
        image_root=args.image_root,
    )


def _emit(obj, out_path=None):
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    print(text)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")


def cmd_stats(args):
    records = load_dataset(args.data)
    report = label_statistics(records)
    _emit(report.to_json_obj(), args.out)


def cmd_train(args):
    config = _build_config(args)
    providers = _build_providers(args)
    records = load_dataset(args.data)
    if args.no_split:
        train_set = records
    else:
        train_set, _ = split_dataset(records, config.train_fraction, config.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "epochs.jsonl").open("w", encoding="utf-8") as log_fh:
        result = harness.train(config, train_set, providers, log_fh=log_fh)
    echo = config.to_flat()
    save_checkpoint(out_dir / "checkpoint_final.msck", result.final_params, echo)
    save_checkpoint(out_dir / "checkpoint_best.msck", result.best_params, echo)
    print(json.dumps({
        "epochs": len(result.epoch_logs),
        "final_loss": result.epoch_logs[-1]["loss"],
        "best_epoch": result.best_epoch,
        "checkpoints": [str(out_dir / "checkpoint_final.msck"),
                        str(out_dir / "checkpoint_best.msck")],
        "log": str(out_dir / "epochs.jsonl"),
    }, indent=2))


def cmd_eval(args):
    providers = _build_providers(args)
    records = load_dataset(args.data)
    report = harness.evaluate_checkpoint(args.checkpoint, records, providers, label="eval")
    _emit(report.to_dict(), args.out)


def _split_for_experiment(args, config):
    records = load_dataset(args.data)
    return split_dataset(records, config.train_fraction, config.seed)


def cmd_ablate(args):
    config = _build_config(args)
    providers = _build_providers(args)
    train_set, test_set = _split_for_experiment(args, config)
    rows = harness.run_ablation(config, train_set, test_set, providers)
    _emit([report.to_dict() for _, report, _ in rows], args.out)


def cmd_task_grid(args):
    config = _build_config(args)
    providers = _build_providers(args)
    train_set, test_set = _split_for_experiment(args, config)
    rows = harness.run_task_grid(config, train_set, test_set, providers)
    _emit([report.to_dict() for _, report, _ in rows], args.out)


def cmd_gradcheck(args):
    """Full-pipeline finite-difference check at 64-bit over several seeds."""
    started = time.perf_counter()
    worst = 0.0
    failures = []
    for seed in range(args.seeds):
        config = TrainConfig.from_flat({
            "d_model": args.d_model,
            "num_heads": args.heads,
            "vocab_size": args.vocab_size,
            "thumbnail_size": 4,
            "conv_kernel": 3,
            "seed": seed,
        })
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            records = make_synthetic_dataset(args.batch, seed=seed, image_dir=tmp, image_size=4)
            providers = EmbeddingProviders(image_root=Path(tmp))
            result = harness.gradcheck_pipeline(config, records, providers, eps=args.eps)
        failures.extend(result.failures)
        worst = max(worst, result.max_rel_err)
        print(f"seed {seed}: max rel err {result.max_rel_err:.3e}")
    elapsed = time.perf_counter() - started
    ok = worst < args.tolerance and not failures
    print(json.dumps({
        "max_rel_err": worst,
        "tolerance": args.tolerance,
        "seeds": args.seeds,
        "failures": failures,
        "elapsed_seconds": round(elapsed, 2),
        "ok": ok,
    }, indent=2))
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="mmsair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="label statistics report for a dataset file")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("train", help="train a model and write checkpoints")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--no-split", action="store_true", help="train on the whole file")
    _add_config_flags(p)
    _add_provider_flags(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset file")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path)
    _add_provider_flags(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("ablate", help="run the six modality-ablation rows")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path)
    _add_config_flags(p)
    _add_provider_flags(p)
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("task-grid", help="joint vs single-task experiment grid")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path)
    _add_config_flags(p)
    _add_provider_flags(p)
    p.set_defaults(fn=cmd_task_grid)

    p = sub.add_parser("gradcheck", help="finite-difference check of the full pipeline")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--d-model", type=int, default=8)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--vocab-size", type=int, default=16)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(fn=cmd_gradcheck)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = args.fn(args)
    except MMSAIRError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
