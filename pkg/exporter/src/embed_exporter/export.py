"""Batch export of the three modality stores plus a manifest."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .encoders import make_image_encoder, make_text_encoder
from .records import load_records
from .store import write_store

STORE_FILES = {
    "context": "context.msem",
    "sticker_text": "sticker_text.msem",
    "image": "image.msem",
}


@dataclass
class ExportManifest:
    """Provenance record for one export run, serialized as manifest.json."""

    dataset: str
    stores: dict  # modality -> output path
    text_encoder: str
    image_encoder: str
    pooling: str
    widths: dict  # modality -> vector width
    record_count: int
    content_hash: str
    empty_sticker_text_ids: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # {"id", "modality", "reason"}

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def _batched(items, size):
    for i in range(0, len(items), size):
        yield items[i : i + size]


def export_embeddings(
    dataset_path,
    out_dir,
    image_root=None,
    text_encoder="hash",
    image_encoder="pixel",
    text_width=32,
    thumbnail_side=8,
    pooling="first",
    batch_size=16,
):
    """Encode every record and write three stores plus manifest.json.

    Unreadable sticker images are listed in the manifest's failure section and
    omitted from the image store; the export continues. Returns the manifest.
    """
    records = load_records(dataset_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    image_root = Path(image_root) if image_root is not None else Path(dataset_path).parent

    text_enc = make_text_encoder(text_encoder, text_width, pooling)
    image_enc = make_image_encoder(image_encoder, thumbnail_side)

    context_vecs, sticker_text_vecs, image_vecs = {}, {}, {}
    empty_ids, failures = [], []
    for batch in _batched(records, batch_size):
        for rec, vec in zip(batch, text_enc.encode_batch([r.context for r in batch])):
            context_vecs[rec.id] = vec
        for rec, vec in zip(batch, text_enc.encode_batch([r.sticker_text for r in batch])):
            sticker_text_vecs[rec.id] = vec
            if not rec.sticker_text.strip():
                empty_ids.append(rec.id)
        for rec in batch:
            try:
                image_vecs[rec.id] = image_enc.encode(image_root / rec.sticker_image_ref)
            except OSError as e:
                failures.append(
                    {"id": rec.id, "modality": "image", "reason": str(e)}
                )

    paths = {m: out_dir / name for m, name in STORE_FILES.items()}
    write_store(paths["context"], "context", text_enc.width, context_vecs)
    write_store(paths["sticker_text"], "sticker_text", text_enc.width, sticker_text_vecs)
    write_store(paths["image"], "image", image_enc.width, image_vecs)

    digest = hashlib.sha256()
    for modality in ("context", "sticker_text", "image"):
        digest.update(paths[modality].read_bytes())

    manifest = ExportManifest(
        dataset=str(dataset_path),
        stores={m: str(p) for m, p in paths.items()},
        text_encoder=text_enc.identifier,
        image_encoder=image_enc.identifier,
        pooling=pooling,
        widths={
            "context": text_enc.width,
            "sticker_text": text_enc.width,
            "image": image_enc.width,
        },
        record_count=len(records),
        content_hash=digest.hexdigest(),
        empty_sticker_text_ids=empty_ids,
        failures=failures,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest
