from pathlib import Path

import pytest

from mmsair.config import TrainConfig
from mmsair.encoders import EmbeddingProviders
from mmsair.synth import make_synthetic_dataset

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "data" / "fixture" / "fixture_20.jsonl"
FIXTURE_IMAGE_ROOT = FIXTURE_PATH.parent / "stickers"


@pytest.fixture
def tiny_config():
    return TrainConfig.from_flat(
        {"d_model": 8, "num_heads": 2, "vocab_size": 16, "thumbnail_size": 4, "seed": 0}
    )


@pytest.fixture
def tiny_dataset(tmp_path):
    records = make_synthetic_dataset(8, seed=0, image_dir=tmp_path / "imgs", image_size=4)
    providers = EmbeddingProviders(image_root=tmp_path / "imgs")
    return records, providers
