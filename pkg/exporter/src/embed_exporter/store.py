"""Writer for the binary embedding-store format the training engine consumes.

Layout (little-endian): magic ``MSEM``; version u16; modality tag u8
(context=0, sticker_text=1, image=2); vector width u32; record count u64;
then per record: id length u16, UTF-8 id bytes, width float32 values.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

STORE_MAGIC = b"MSEM"
STORE_VERSION = 1
MODALITY_TAGS = {"context": 0, "sticker_text": 1, "image": 2}


def write_store(path, modality, width, vectors):
    """Write ``vectors`` (ordered dict of record id -> float array) to ``path``."""
    if modality not in MODALITY_TAGS:
        raise ValueError(f"unknown modality {modality!r}")
    with Path(path).open("wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(struct.pack("<HBIQ", STORE_VERSION, MODALITY_TAGS[modality], width, len(vectors)))
        for rid, vec in vectors.items():
            arr = np.asarray(vec, dtype="<f4")
            if arr.shape != (width,):
                raise ValueError(f"vector for {rid!r} has shape {arr.shape}, expected ({width},)")
            rid_bytes = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(rid_bytes)))
            fh.write(rid_bytes)
            fh.write(arr.tobytes())
