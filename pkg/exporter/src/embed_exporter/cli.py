"""Command-line entry point: embed-export."""

from __future__ import annotations

import argparse
import sys

from .encoders import POOLING_MODES
from .export import export_embeddings
from .records import RecordError


def build_parser():
    p = argparse.ArgumentParser(
        prog="embed-export",
        description="Encode a chat-sticker dataset into binary embedding stores.",
    )
    p.add_argument("--data", required=True, help="dataset JSONL path")
    p.add_argument("--out-dir", required=True, help="output directory for stores + manifest")
    p.add_argument("--image-root", default=None,
                   help="directory sticker image refs are relative to (default: dataset directory)")
    p.add_argument("--text-encoder", default="hash", help="text encoder identifier")
    p.add_argument("--image-encoder", default="pixel", help="image encoder identifier")
    p.add_argument("--text-width", type=int, default=32, help="pooled text vector width")
    p.add_argument("--thumbnail-side", type=int, default=8,
                   help="image thumbnail side; image width = side*side")
    p.add_argument("--pooling", choices=POOLING_MODES, default="first")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--device", default="cpu",
                   help="compute device; built-in encoders support cpu only")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.device != "cpu":
        print(f"embed-export: device {args.device!r} not available; built-in encoders are cpu-only",
              file=sys.stderr)
        return 2
    if args.batch_size < 1:
        print("embed-export: --batch-size must be >= 1", file=sys.stderr)
        return 2
    try:
        manifest = export_embeddings(
            args.data,
            args.out_dir,
            image_root=args.image_root,
            text_encoder=args.text_encoder,
            image_encoder=args.image_encoder,
            text_width=args.text_width,
            thumbnail_side=args.thumbnail_side,
            pooling=args.pooling,
            batch_size=args.batch_size,
        )
    except (RecordError, ValueError, OSError) as e:
        print(f"embed-export: {e}", file=sys.stderr)
        return 2
    print(manifest.to_json(), end="")
    return 1 if manifest.failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
