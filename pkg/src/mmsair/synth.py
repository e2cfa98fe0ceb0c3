"""Synthetic dataset generation for smoke tests, demos, and gradient checks.

Contexts carry one token per gold label, so a bag-of-tokens encoder can
separate the classes; sticker images are small deterministic PNGs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import ChatRecord, IntentLabel, SentimentLabel, StickerClass

# textless classes get empty sticker_text to satisfy the class/text rule
_TEXTLESS = (StickerClass.P, StickerClass.A, StickerClass.C)
_TEXTFUL = (StickerClass.P_T, StickerClass.A_T, StickerClass.C_T, StickerClass.TEXT)


def write_sticker_image(path, seed, size=8):
    from PIL import Image

    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, (size, size), dtype=np.uint8)
    Image.fromarray(pixels, mode="L").save(path)


def make_synthetic_dataset(n, seed, image_dir=None, image_size=8):
    """Build n linearly separable records; writes PNG stickers when image_dir given.

    Labels cycle through all classes; the context text encodes both gold
    labels through dedicated tokens plus a small amount of filler noise.
    """
    rng = np.random.default_rng(seed)
    if image_dir is not None:
        image_dir = Path(image_dir)
        image_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(n):
        sentiment = SentimentLabel(i % 3)
        intent = IntentLabel(i % 20)
        textful = i % 2 == 0
        sticker_class = _TEXTFUL[i % 4] if textful else _TEXTLESS[i % 3]
        context = f"sent{int(sentiment)} intent{int(intent)} filler{rng.integers(0, 5)}"
        sticker_text = f"mood{int(sentiment)} tone{rng.integers(0, 3)}" if textful else ""
        ref = f"sticker_{i:04d}.png"
        if image_dir is not None:
            write_sticker_image(image_dir / ref, seed=(seed, i), size=image_size)
        records.append(
            ChatRecord(
                id=f"syn-{i:04d}",
                context=context,
                sticker_image_ref=ref,
                sticker_text=sticker_text,
                context_sentiment=SentimentLabel(rng.integers(0, 3)),
                sticker_sentiment=SentimentLabel(rng.integers(0, 3)),
                multimodal_sentiment=sentiment,
                multimodal_intent=intent,
                sticker_class=sticker_class,
            )
        )
    return records
