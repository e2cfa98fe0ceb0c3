"""MSAIRS chat-record schema: loading, validation, splitting, statistics.

Records are stored as UTF-8 JSON lines, one object per record, with the
field names of :class:`ChatRecord`. Released data with different field
names can be ingested through an explicit ``field_map`` instead of silent
guessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import ContractError, DatasetError


class SentimentLabel(IntEnum):
    POSITIVE = 0
    NEGATIVE = 1
    NEUTRAL = 2


class IntentLabel(IntEnum):
    """The 20 intent classes, codes fixed in table order."""

    COMFORT = 0
    OPPOSE = 1
    GREET = 2
    COMPLAIN = 3
    ASK_FOR_HELP = 4
    TAUNT = 5
    APOLOGIZE = 6
    INTRODUCE = 7
    GUESS = 8
    ADVISE = 9
    COMPROMISE = 10
    PRAISE = 11
    INFORM = 12
    FLAUNT = 13
    CRITICIZE = 14
    THANK = 15
    AGREE = 16
    LEAVE = 17
    QUERY = 18
    JOKE = 19


class StickerClass(IntEnum):
    P = 0
    A = 1
    C = 2
    P_T = 3
    A_T = 4
    C_T = 5
    TEXT = 6


SENTIMENT_NAMES = {s: s.name.capitalize() for s in SentimentLabel}
INTENT_NAMES = {i: i.name.replace("_", " ").capitalize() for i in IntentLabel}
STICKER_CLASS_NAMES = {
    StickerClass.P: "P",
    StickerClass.A: "A",
    StickerClass.C: "C",
    StickerClass.P_T: "P-t",
    StickerClass.A_T: "A-t",
    StickerClass.C_T: "C-t",
    StickerClass.TEXT: "Text",
}

# classes whose sticker carries no embedded text
_TEXTLESS_CLASSES = {StickerClass.P, StickerClass.A, StickerClass.C}


def _normalize(s):
    return " ".join(str(s).strip().lower().split())


_SENTIMENT_LOOKUP = {_normalize(v): k for k, v in SENTIMENT_NAMES.items()}
_INTENT_LOOKUP = {_normalize(v): k for k, v in INTENT_NAMES.items()}
_STICKER_LOOKUP = {_normalize(v): k for k, v in STICKER_CLASS_NAMES.items()}


def parse_sentiment(value):
    key = _normalize(value)
    if key not in _SENTIMENT_LOOKUP:
        raise DatasetError(f"unknown sentiment label: {value!r}")
    return _SENTIMENT_LOOKUP[key]


def parse_intent(value):
    key = _normalize(value).replace("_", " ")
    if key not in _INTENT_LOOKUP:
        raise DatasetError(f"unknown intent label: {value!r}")
    return _INTENT_LOOKUP[key]


def parse_sticker_class(value):
    key = _normalize(value)
    if key not in _STICKER_LOOKUP:
        raise DatasetError(f"unknown sticker class: {value!r}")
    return _STICKER_LOOKUP[key]


@dataclass(frozen=True)
class ChatRecord:
    """One dataset row: chat context, sticker reference, and five gold labels."""

    id: str
    context: str
    sticker_image_ref: str
    sticker_text: str
    context_sentiment: SentimentLabel
    sticker_sentiment: SentimentLabel
    multimodal_sentiment: SentimentLabel
    multimodal_intent: IntentLabel
    sticker_class: StickerClass

    def to_json_obj(self):
        return {
            "id": self.id,
            "context": self.context,
            "sticker_image_ref": self.sticker_image_ref,
            "sticker_text": self.sticker_text,
            "context_sentiment": SENTIMENT_NAMES[self.context_sentiment],
            "sticker_sentiment": SENTIMENT_NAMES[self.sticker_sentiment],
            "multimodal_sentiment": SENTIMENT_NAMES[self.multimodal_sentiment],
            "multimodal_intent": INTENT_NAMES[self.multimodal_intent],
            "sticker_class": STICKER_CLASS_NAMES[self.sticker_class],
        }


CANONICAL_FIELDS = (
    "id",
    "context",
    "sticker_image_ref",
    "sticker_text",
    "context_sentiment",
    "sticker_sentiment",
    "multimodal_sentiment",
    "multimodal_intent",
    "sticker_class",
)


def validate_record(record):
    """Return a list of invariant violations (empty list means ok)."""
    violations = []
    if not record.id:
        violations.append("empty id")
    if not record.context:
        violations.append("empty context")
    has_text = bool(record.sticker_text)
    if record.sticker_class in _TEXTLESS_CLASSES and has_text:
        violations.append("class/text mismatch: textless sticker class with nonempty sticker_text")
    if record.sticker_class not in _TEXTLESS_CLASSES and not has_text:
        violations.append("class/text mismatch: text-bearing sticker class with empty sticker_text")
    return violations


def record_from_obj(obj, field_map=None):
    """Build a ChatRecord from a parsed JSON object.

    ``field_map`` maps canonical field names to the names used in the file.
    """
    field_map = field_map or {}

    def get(name):
        src = field_map.get(name, name)
        if src not in obj:
            raise DatasetError(f"missing field {src!r}")
        return obj[src]

    return ChatRecord(
        id=str(get("id")),
        context=str(get("context")),
        sticker_image_ref=str(get("sticker_image_ref")),
        sticker_text=str(get("sticker_text")),
        context_sentiment=parse_sentiment(get("context_sentiment")),
        sticker_sentiment=parse_sentiment(get("sticker_sentiment")),
        multimodal_sentiment=parse_sentiment(get("multimodal_sentiment")),
        multimodal_intent=parse_intent(get("multimodal_intent")),
        sticker_class=parse_sticker_class(get("sticker_class")),
    )


def load_dataset(path, field_map=None):
    """Load a JSONL dataset file, validating every record. Order preserved."""
    path = Path(path)
    records = []
    seen_ids = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"{path}:{lineno}: malformed line: {e}") from e
            try:
                rec = record_from_obj(obj, field_map=field_map)
            except DatasetError as e:
                raise DatasetError(f"{path}:{lineno}: {e}") from e
            if rec.id in seen_ids:
                raise DatasetError(f"{path}:{lineno}: duplicate id {rec.id!r}")
            seen_ids.add(rec.id)
            violations = validate_record(rec)
            if violations:
                raise DatasetError(f"{path}:{lineno}: invalid record {rec.id!r}: {violations}")
            records.append(rec)
    return records


def save_dataset(records, path):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_obj(), ensure_ascii=False) + "\n")


def split_dataset(records, train_fraction, seed):
    """Deterministic shuffled split into (train, test)."""
    if not 0.0 < train_fraction < 1.0:
        raise ContractError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if len(records) < 2:
        raise ContractError("need at least 2 records to split")
    order = np.random.default_rng(seed).permutation(len(records))
    n_train = int(round(len(records) * train_fraction))
    train = [records[i] for i in order[:n_train]]
    test = [records[i] for i in order[n_train:]]
    return train, test


@dataclass
class StatsReport:
    """Per-category label counts and proportions over one dataset."""

    total: int
    categories: dict  # category name -> {label display name: count}

    def proportions(self, category):
        counts = self.categories[category]
        return {k: v / self.total for k, v in counts.items()}

    def to_json_obj(self):
        out = {"total": self.total, "categories": {}}
        for cat, counts in self.categories.items():
            out["categories"][cat] = {
                label: {"count": c, "proportion": round(c / self.total, 4)}
                for label, c in counts.items()
            }
        return out

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2, ensure_ascii=False)


_CATEGORY_SPECS = [
    ("context_sentiment", SENTIMENT_NAMES, lambda r: r.context_sentiment),
    ("sticker_sentiment", SENTIMENT_NAMES, lambda r: r.sticker_sentiment),
    ("multimodal_sentiment", SENTIMENT_NAMES, lambda r: r.multimodal_sentiment),
    ("multimodal_intent", INTENT_NAMES, lambda r: r.multimodal_intent),
    ("sticker_class", STICKER_CLASS_NAMES, lambda r: r.sticker_class),
]


def label_statistics(records):
    """Exact per-label counts and proportions for the five label categories."""
    if not records:
        raise ContractError("label_statistics requires a nonempty dataset")
    categories = {}
    for name, names_map, getter in _CATEGORY_SPECS:
        counts = {display: 0 for display in names_map.values()}
        for rec in records:
            counts[names_map[getter(rec)]] += 1
        categories[name] = counts
    return StatsReport(total=len(records), categories=categories)
