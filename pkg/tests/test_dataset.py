import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmsair.dataset import (
    ChatRecord,
    IntentLabel,
    SentimentLabel,
    StickerClass,
    label_statistics,
    load_dataset,
    parse_intent,
    record_from_obj,
    save_dataset,
    split_dataset,
    validate_record,
)
from mmsair.errors import ContractError, DatasetError
from mmsair.synth import make_synthetic_dataset
from tests.conftest import FIXTURE_PATH


def make_record(**overrides):
    base = dict(
        id="r1",
        context="hello there",
        sticker_image_ref="s.png",
        sticker_text="ok",
        context_sentiment=SentimentLabel.POSITIVE,
        sticker_sentiment=SentimentLabel.NEUTRAL,
        multimodal_sentiment=SentimentLabel.POSITIVE,
        multimodal_intent=IntentLabel.GREET,
        sticker_class=StickerClass.C_T,
    )
    base.update(overrides)
    return ChatRecord(**base)


class TestLabels:
    def test_enum_sizes_and_codes(self):
        assert len(SentimentLabel) == 3
        assert len(IntentLabel) == 20
        assert len(StickerClass) == 7
        assert int(IntentLabel.COMFORT) == 0
        assert int(IntentLabel.JOKE) == 19
        assert int(IntentLabel.QUERY) == 18

    def test_case_insensitive_trimmed_parse(self):
        assert parse_intent("  ask FOR help ") == IntentLabel.ASK_FOR_HELP

    def test_removed_label_rejected(self):
        with pytest.raises(DatasetError, match="Prevent"):
            parse_intent("Prevent")


class TestValidateRecord:
    def test_valid_record_ok(self):
        assert validate_record(make_record()) == []

    def test_textless_class_with_text_flagged(self):
        violations = validate_record(make_record(sticker_class=StickerClass.C))
        assert any("class/text mismatch" in v for v in violations)

    def test_empty_context_flagged(self):
        violations = validate_record(
            make_record(context="", sticker_text="", sticker_class=StickerClass.P)
        )
        assert any("empty context" in v for v in violations)


class TestLoad:
    def test_fixture_loads_20(self):
        records = load_dataset(FIXTURE_PATH)
        assert len(records) == 20

    def test_round_trip(self, tmp_path):
        records = load_dataset(FIXTURE_PATH)
        out = tmp_path / "copy.jsonl"
        save_dataset(records, out)
        assert load_dataset(out) == records

    def test_empty_file_is_empty_dataset(self, tmp_path):
        p = tmp_path / "empty.jsonl"
        p.write_text("")
        assert load_dataset(p) == []

    def test_malformed_line_reports_line_number(self, tmp_path):
        p = tmp_path / "bad.jsonl"
        p.write_text("{not json\n")
        with pytest.raises(DatasetError, match=":1:"):
            load_dataset(p)

    def test_unknown_intent_named_in_error(self, tmp_path):
        rec = make_record().to_json_obj()
        rec["multimodal_intent"] = "Prevent"
        p = tmp_path / "bad.jsonl"
        p.write_text(json.dumps(rec) + "\n")
        with pytest.raises(DatasetError, match="Prevent"):
            load_dataset(p)

    def test_duplicate_id_rejected(self, tmp_path):
        line = json.dumps(make_record().to_json_obj())
        p = tmp_path / "dup.jsonl"
        p.write_text(line + "\n" + line + "\n")
        with pytest.raises(DatasetError, match="duplicate id"):
            load_dataset(p)

    def test_field_map(self):
        obj = make_record().to_json_obj()
        obj["text"] = obj.pop("context")
        rec = record_from_obj(obj, field_map={"context": "text"})
        assert rec.context == "hello there"


class TestSplit:
    def test_sizes(self):
        records = make_synthetic_dataset(10, seed=0)
        train, test = split_dataset(records, 0.9, seed=1)
        assert (len(train), len(test)) == (9, 1)

    def test_same_seed_identical(self):
        records = make_synthetic_dataset(10, seed=0)
        assert split_dataset(records, 0.7, seed=5) == split_dataset(records, 0.7, seed=5)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_partition_property(self, seed):
        records = load_dataset(FIXTURE_PATH)
        train, test = split_dataset(records, 0.6, seed=seed)
        train_ids = {r.id for r in train}
        test_ids = {r.id for r in test}
        assert not train_ids & test_ids
        assert train_ids | test_ids == {r.id for r in records}

    def test_bad_fraction_rejected(self):
        records = make_synthetic_dataset(4, seed=0)
        with pytest.raises(ContractError):
            split_dataset(records, 1.0, seed=0)


class TestStatistics:
    def test_single_label_fixture_100_percent(self):
        records = [
            make_record(
                id=f"r{i}",
                multimodal_intent=IntentLabel.GREET,
                multimodal_sentiment=SentimentLabel.POSITIVE,
            )
            for i in range(5)
        ]
        report = label_statistics(records)
        assert report.proportions("multimodal_intent")["Greet"] == 1.0
        assert report.proportions("multimodal_sentiment")["Positive"] == 1.0

    def test_proportions_sum_to_one(self):
        report = label_statistics(load_dataset(FIXTURE_PATH))
        for cat in report.categories:
            assert abs(sum(report.proportions(cat).values()) - 1.0) < 1e-9

    def test_counts_sum_to_total(self):
        report = label_statistics(load_dataset(FIXTURE_PATH))
        for counts in report.categories.values():
            assert sum(counts.values()) == report.total

    def test_empty_dataset_rejected(self):
        with pytest.raises(ContractError):
            label_statistics([])
