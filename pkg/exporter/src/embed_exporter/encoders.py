"""Deterministic built-in encoders.

Encoders are selected by identifier so hub-backed models can be slotted in
later behind the same interface. The built-ins run anywhere with no model
downloads:

* text ``hash``  — each whitespace token maps to a fixed pseudo-random vector
  seeded from the token's SHA-256 digest; the token sequence is then pooled
  (first-token or mean). The same text always yields the same vector.
* image ``pixel`` — grayscale thumbnail, pixels scaled to [-0.5, 0.5] and
  flattened row-major. Written pre-reduction so the training engine's
  1-D convolution stays in the gradient path.
"""

from __future__ import annotations

import hashlib

import numpy as np
from PIL import Image

POOLING_MODES = ("first", "mean")


def _token_vector(token, width):
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "little")
    rng = np.random.default_rng(seed)
    return rng.standard_normal(width) / np.sqrt(width)


class HashTextEncoder:
    """Pooled per-token hash embeddings; empty text encodes to the zero vector."""

    identifier = "hash"

    def __init__(self, width, pooling="first"):
        if width <= 0:
            raise ValueError("text width must be positive")
        if pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}, got {pooling!r}")
        self.width = width
        self.pooling = pooling
        self._cache = {}

    def encode(self, text):
        tokens = text.split()
        if not tokens:
            return np.zeros(self.width, dtype=np.float32)
        if self.pooling == "first":
            tokens = tokens[:1]
        rows = []
        for tok in tokens:
            if tok not in self._cache:
                self._cache[tok] = _token_vector(tok, self.width)
            rows.append(self._cache[tok])
        return np.mean(rows, axis=0).astype(np.float32)

    def encode_batch(self, texts):
        return [self.encode(t) for t in texts]


class PixelImageEncoder:
    """Grayscale thumbnail flattened to a width = side*side vector."""

    identifier = "pixel"

    def __init__(self, side=8):
        if side <= 0:
            raise ValueError("thumbnail side must be positive")
        self.side = side
        self.width = side * side

    def encode(self, path):
        with Image.open(path) as img:
            gray = img.convert("L").resize((self.side, self.side), Image.BILINEAR)
        pixels = np.asarray(gray, dtype=np.float32) / 255.0 - 0.5
        return pixels.reshape(-1)

    def encode_batch(self, paths):
        return [self.encode(p) for p in paths]


def make_text_encoder(identifier, width, pooling):
    if identifier == "hash":
        return HashTextEncoder(width, pooling)
    raise ValueError(f"unknown text encoder {identifier!r} (available: hash)")


def make_image_encoder(identifier, side):
    if identifier == "pixel":
        return PixelImageEncoder(side)
    raise ValueError(f"unknown image encoder {identifier!r} (available: pixel)")
