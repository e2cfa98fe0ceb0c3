"""Binary parameter container: named float32 tensors plus a config echo block.

Layout: magic "MSCK", version u16, config-JSON length u32 + UTF-8 bytes,
tensor count u32, then per tensor: name length u16, UTF-8 name, rank u8,
dims u32 each, row-major 32-bit little-endian floats.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import CheckpointError

MAGIC = b"MSCK"
VERSION = 1


def save_checkpoint(path, params, config_echo):
    """Write named parameter arrays (cast to float32) and a config dict."""
    cfg_bytes = json.dumps(config_echo, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        fh.write(struct.pack("<I", len(cfg_bytes)))
        fh.write(cfg_bytes)
        fh.write(struct.pack("<I", len(params)))
        for name in sorted(params):
            arr = np.asarray(params[name], dtype="<f4")
            name_bytes = name.encode("utf-8")
            fh.write(struct.pack("<H", len(name_bytes)))
            fh.write(name_bytes)
            fh.write(struct.pack("<B", arr.ndim))
            for dim in arr.shape:
                fh.write(struct.pack("<I", dim))
            fh.write(arr.tobytes())


def load_checkpoint(path):
    """Read back (params dict of float32 arrays, config echo dict)."""
    data = Path(path).read_bytes()

    def need(offset, n, what):
        if offset + n > len(data):
            raise CheckpointError(f"{path}: truncated {what} at byte {offset}")
        return data[offset : offset + n]

    if need(0, 4, "magic") != MAGIC:
        raise CheckpointError(f"{path}: bad magic number")
    (version,) = struct.unpack("<H", need(4, 2, "version"))
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    (cfg_len,) = struct.unpack("<I", need(6, 4, "config length"))
    offset = 10
    try:
        config = json.loads(need(offset, cfg_len, "config block").decode("utf-8"))
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: corrupt config block: {e}") from e
    offset += cfg_len
    (count,) = struct.unpack("<I", need(offset, 4, "tensor count"))
    offset += 4
    params = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", need(offset, 2, "name length"))
        offset += 2
        name = need(offset, name_len, "name").decode("utf-8")
        offset += name_len
        (rank,) = struct.unpack("<B", need(offset, 1, "rank"))
        offset += 1
        dims = struct.unpack(f"<{rank}I", need(offset, 4 * rank, "dims"))
        offset += 4 * rank
        size = int(np.prod(dims)) if rank else 1
        raw = need(offset, 4 * size, f"data for {name!r}")
        params[name] = np.frombuffer(raw, dtype="<f4").copy().reshape(dims)
        offset += 4 * size
    if offset != len(data):
        raise CheckpointError(f"{path}: {len(data) - offset} trailing bytes")
    return params, config
