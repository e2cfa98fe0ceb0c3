"""Minimal dataset reader.

The exporter only needs four fields per JSONL row: the record id, the chat
context text, the sticker text, and the sticker image reference. Label fields
are ignored; the training engine owns their semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class RecordError(ValueError):
    """Raised for malformed or inconsistent dataset rows."""


REQUIRED_FIELDS = ("id", "context", "sticker_text", "sticker_image_ref")


@dataclass(frozen=True)
class ExportRecord:
    id: str
    context: str
    sticker_text: str
    sticker_image_ref: str


def load_records(path):
    """Read JSONL rows, validating the exporter-relevant fields.

    Raises RecordError with the 1-based line number for unparsable lines,
    missing fields, or duplicate ids.
    """
    records = []
    seen = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise RecordError(f"{path}:{lineno}: invalid JSON: {e}") from e
            missing = [f for f in REQUIRED_FIELDS if f not in obj]
            if missing:
                raise RecordError(f"{path}:{lineno}: missing fields {missing}")
            rid = str(obj["id"])
            if rid in seen:
                raise RecordError(f"{path}:{lineno}: duplicate record id {rid!r}")
            seen.add(rid)
            records.append(
                ExportRecord(
                    id=rid,
                    context=str(obj["context"]),
                    sticker_text=str(obj["sticker_text"]),
                    sticker_image_ref=str(obj["sticker_image_ref"]),
                )
            )
    if not records:
        raise RecordError(f"{path}: dataset is empty")
    return records
