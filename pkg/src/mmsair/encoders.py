"""Modality encoders producing the three per-record embedding vectors.

Two provider kinds per modality:

* ``toy`` — small trainable encoders with no external models: hashed
  bag-of-tokens + linear + tanh for the two text channels, and a raw
  grayscale thumbnail fed to the trainable 1-D convolution for images.
* ``precomputed`` — vectors looked up in a binary embedding store written
  offline. Text stores hold already-pooled vectors; the image store holds
  pre-reduction vectors so the 1-D convolution stays trainable.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tensor as T
from .errors import (
    ConfigError,
    ContractError,
    DimensionError,
    MissingEmbeddingError,
    StoreFormatError,
)
from .tensor import Tensor


@dataclass
class EncoderConfig:
    d_model: int = 32
    vocab_size: int = 4096
    image_input_dim: int = 64
    conv_kernel: int = 3
    thumbnail_size: int = 8
    context_provider: str = "toy"          # toy | precomputed
    sticker_text_provider: str = "toy"     # toy | precomputed
    image_provider: str = "toy"            # toy | precomputed

    def validate(self, num_heads=1):
        if self.d_model <= 0:
            raise ConfigError("d_model must be positive")
        if num_heads >= 1 and self.d_model % num_heads != 0:
            raise ConfigError(f"d_model={self.d_model} not divisible by num_heads={num_heads}")
        if self.conv_kernel < 1:
            raise ConfigError("conv_kernel must be >= 1")
        for name in ("context_provider", "sticker_text_provider", "image_provider"):
            if getattr(self, name) not in ("toy", "precomputed"):
                raise ConfigError(f"{name} must be 'toy' or 'precomputed'")


@dataclass
class EmbeddingTriple:
    """The three modality vectors for one sample (all width d_model)."""

    e_x: Tensor
    e_s: Tensor
    e_i: Tensor


# -- tokenization ------------------------------------------------------------


def tokenize(text):
    """Whitespace tokens; unsegmented non-ASCII runs fall back to characters."""
    tokens = []
    for tok in text.split():
        if len(tok) > 1 and any(ord(ch) > 127 for ch in tok):
            tokens.extend(tok)
        else:
            tokens.append(tok)
    return tokens


def token_id(token, vocab_size):
    # crc32 is stable across processes, unlike Python's hash()
    return zlib.crc32(token.encode("utf-8")) % vocab_size


def bag_of_tokens(text, vocab_size):
    """Normalized token-count vector; mean pooling becomes one matmul."""
    counts = np.zeros(vocab_size)
    tokens = tokenize(text)
    for tok in tokens:
        counts[token_id(tok, vocab_size)] += 1.0
    if tokens:
        counts /= len(tokens)
    return counts


# -- parameter initialization --------------------------------------------------


def init_text_encoder_params(rng, cfg, prefix, with_empty_vector=False):
    d = cfg.d_model
    params = {
        f"{prefix}.embedding": Tensor(rng.normal(0.0, 0.5, (cfg.vocab_size, d)), requires_grad=True),
        f"{prefix}.w": Tensor(rng.normal(0.0, 1.0 / np.sqrt(d), (d, d)), requires_grad=True),
        f"{prefix}.b": Tensor(np.zeros(d), requires_grad=True),
    }
    if with_empty_vector:
        params[f"{prefix}.empty"] = Tensor(rng.normal(0.0, 0.5, d), requires_grad=True)
    return params


def init_image_encoder_params(rng, cfg, prefix="image"):
    d, k = cfg.d_model, cfg.conv_kernel
    return {
        f"{prefix}.conv_w": Tensor(rng.normal(0.0, 1.0 / np.sqrt(k), (d, k)), requires_grad=True),
        f"{prefix}.conv_b": Tensor(np.zeros(d), requires_grad=True),
    }


# -- toy text encoding ---------------------------------------------------------


def encode_text_batch(texts, cfg, params, prefix):
    """tanh(W · meanpool(hashed token embeddings) + b) for a batch of texts."""
    counts = np.stack([bag_of_tokens(t, cfg.vocab_size) for t in texts])
    pooled = T.matmul(Tensor(counts), params[f"{prefix}.embedding"])
    return T.tanh(T.linear(pooled, params[f"{prefix}.w"], params[f"{prefix}.b"]))


def encode_sticker_text_batch(texts, cfg, params, prefix="sticker_text"):
    """Same contract as context encoding, plus the learned empty-text vector."""
    encoded = encode_text_batch(texts, cfg, params, prefix)
    empty_mask = np.array([[1.0] if not t else [0.0] for t in texts])
    if not empty_mask.any():
        return encoded
    empty = T.reshape(params[f"{prefix}.empty"], (1, cfg.d_model))
    return T.add(T.mul(Tensor(1.0 - empty_mask), encoded), T.mul(Tensor(empty_mask), empty))


# -- image encoding -------------------------------------------------------------


def load_thumbnail(path, size):
    """Fixed-size grayscale thumbnail flattened to [0, 1] floats."""
    from PIL import Image

    p = Path(path)
    if not p.exists():
        raise MissingEmbeddingError(f"sticker image not found: {p}")
    with Image.open(p) as img:
        gray = img.convert("L").resize((size, size), Image.BILINEAR)
    return np.asarray(gray, dtype=np.float64).reshape(-1) / 255.0


def encode_image_batch(raw, cfg, params, prefix="image"):
    """Trainable 1-D convolution + global average pool over raw sequences.

    ``raw`` is a constant [batch, length] array (thumbnail pixels or a
    pre-reduction store vector); output is [batch, d_model].
    """
    raw = np.asarray(raw, dtype=np.float64)
    k = cfg.conv_kernel
    length = raw.shape[1]
    if length < k:
        raise DimensionError(f"image sequence length {length} shorter than kernel {k}")
    x = Tensor(raw)
    t_out = length - k + 1
    windows = T.stack([x[:, j : j + t_out] for j in range(k)], axis=1)  # [B, k, T]
    conv = T.matmul(params[f"{prefix}.conv_w"], windows)                # [B, d, T]
    conv = T.add(conv, T.reshape(params[f"{prefix}.conv_b"], (cfg.d_model, 1)))
    return T.mean(conv, axis=2)


# -- embedding store binary format ----------------------------------------------

STORE_MAGIC = b"MSEM"
STORE_VERSION = 1
MODALITY_TAGS = {"context": 0, "sticker_text": 1, "image": 2}
MODALITY_NAMES = {v: k for k, v in MODALITY_TAGS.items()}


@dataclass
class EmbeddingStore:
    """In-memory view of one modality's precomputed vectors, keyed by record id."""

    modality: str
    width: int
    vectors: dict  # record id -> np.ndarray[width], float32

    def lookup(self, record_id):
        if record_id not in self.vectors:
            raise MissingEmbeddingError(
                f"no {self.modality} embedding for record id {record_id!r}"
            )
        return self.vectors[record_id]


def write_embedding_store(path, modality, width, vectors):
    if modality not in MODALITY_TAGS:
        raise ContractError(f"unknown modality {modality!r}")
    with Path(path).open("wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(struct.pack("<HBIQ", STORE_VERSION, MODALITY_TAGS[modality], width, len(vectors)))
        for rid, vec in vectors.items():
            vec = np.asarray(vec, dtype="<f4")
            if vec.shape != (width,):
                raise ContractError(f"vector for {rid!r} has width {vec.shape}, expected {width}")
            rid_bytes = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(rid_bytes)))
            fh.write(rid_bytes)
            fh.write(vec.tobytes())


def open_embedding_store(path):
    """Parse an embedding-store file, validating header and every vector."""
    data = Path(path).read_bytes()

    def need(offset, n, what):
        if offset + n > len(data):
            raise StoreFormatError(f"{path}: truncated {what} at byte {offset}")
        return data[offset : offset + n]

    if need(0, 4, "magic") != STORE_MAGIC:
        raise StoreFormatError(f"{path}: bad magic number at byte 0")
    version, tag, width, count = struct.unpack("<HBIQ", need(4, 15, "header"))
    if version != STORE_VERSION:
        raise StoreFormatError(f"{path}: unsupported version {version} at byte 4")
    if tag not in MODALITY_NAMES:
        raise StoreFormatError(f"{path}: unknown modality tag {tag} at byte 6")
    offset = 19
    vectors = {}
    for _ in range(count):
        (id_len,) = struct.unpack("<H", need(offset, 2, "id length"))
        offset += 2
        rid = need(offset, id_len, "id").decode("utf-8")
        offset += id_len
        if rid in vectors:
            raise StoreFormatError(f"{path}: duplicate id {rid!r} at byte {offset}")
        raw = need(offset, 4 * width, f"vector for {rid!r}")
        vectors[rid] = np.frombuffer(raw, dtype="<f4").copy()
        offset += 4 * width
    if offset != len(data):
        raise StoreFormatError(
            f"{path}: {len(data) - offset} trailing bytes at byte {offset} "
            f"(header count {count} disagrees with contents)"
        )
    return EmbeddingStore(modality=MODALITY_NAMES[tag], width=width, vectors=vectors)


# -- providers -------------------------------------------------------------------


@dataclass
class EmbeddingProviders:
    """Runtime sources for precomputed stores and toy-mode sticker images."""

    context_store: EmbeddingStore | None = None
    sticker_text_store: EmbeddingStore | None = None
    image_store: EmbeddingStore | None = None
    image_root: Path | None = None
    _thumbnail_cache: dict = field(default_factory=dict)

    def raw_image_sequence(self, record, cfg):
        if cfg.image_provider == "precomputed":
            if self.image_store is None:
                raise ConfigError("image_provider=precomputed but no image store given")
            return self.image_store.lookup(record.id).astype(np.float64)
        if record.id not in self._thumbnail_cache:
            root = self.image_root or Path(".")
            self._thumbnail_cache[record.id] = load_thumbnail(
                root / record.sticker_image_ref, cfg.thumbnail_size
            )
        return self._thumbnail_cache[record.id]


def _store_lookup_batch(store, records, d_model, modality):
    if store is None:
        raise ConfigError(f"{modality}_provider=precomputed but no {modality} store given")
    rows = np.stack([store.lookup(r.id).astype(np.float64) for r in records])
    if rows.shape[1] != d_model:
        raise DimensionError(
            f"{modality} store width {rows.shape[1]} does not match d_model {d_model}"
        )
    return Tensor(rows)


def encode_context_batch(records, cfg, params, providers):
    for r in records:
        if not r.context:
            raise ContractError(f"record {r.id!r} has empty context")
    if cfg.context_provider == "precomputed":
        return _store_lookup_batch(providers.context_store, records, cfg.d_model, "context")
    return encode_text_batch([r.context for r in records], cfg, params, "context")


def encode_sticker_text_batch_records(records, cfg, params, providers):
    if cfg.sticker_text_provider == "precomputed":
        return _store_lookup_batch(
            providers.sticker_text_store, records, cfg.d_model, "sticker_text"
        )
    return encode_sticker_text_batch([r.sticker_text for r in records], cfg, params)


def encode_sticker_image_batch(records, cfg, params, providers):
    raw = np.stack([providers.raw_image_sequence(r, cfg) for r in records])
    return encode_image_batch(raw, cfg, params)


# -- per-record convenience wrappers (the batch paths above are the hot paths) ---


def encode_context(record, cfg, params, providers=None):
    return encode_context_batch([record], cfg, params, providers or EmbeddingProviders())[0]


def encode_sticker_text(record, cfg, params, providers=None):
    return encode_sticker_text_batch_records(
        [record], cfg, params, providers or EmbeddingProviders()
    )[0]


def encode_sticker_image(record, cfg, params, providers):
    return encode_sticker_image_batch([record], cfg, params, providers)[0]
