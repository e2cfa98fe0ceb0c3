#!/usr/bin/env python3
"""Regenerate the bundled 20-record fixture dataset and its sticker images."""

from pathlib import Path

from mmsair.dataset import save_dataset
from mmsair.synth import make_synthetic_dataset

OUT = Path(__file__).resolve().parent.parent / "data" / "fixture"


def main():
    records = make_synthetic_dataset(20, seed=7, image_dir=OUT / "stickers")
    save_dataset(records, OUT / "fixture_20.jsonl")
    print(f"wrote {len(records)} records to {OUT / 'fixture_20.jsonl'}")


if __name__ == "__main__":
    main()
