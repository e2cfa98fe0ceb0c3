"""Release criterion for the exporter: stores it writes must open in the
training engine with matching header width/count, and re-export with identical
inputs must yield identical content hashes."""

import numpy as np

from embed_exporter.export import export_embeddings
from mmsair.encoders import open_embedding_store
from tests.conftest import FIXTURE_IMAGE_ROOT, FIXTURE_PATH


def test_round_trip_into_training_engine(tmp_path):
    manifest = export_embeddings(
        FIXTURE_PATH, tmp_path / "a", image_root=FIXTURE_IMAGE_ROOT,
        text_width=8, thumbnail_side=4,
    )
    for modality, path in manifest.stores.items():
        store = open_embedding_store(path)
        assert store.modality == modality
        assert store.width == manifest.widths[modality]
        expected = manifest.record_count - sum(
            1 for f in manifest.failures if f["modality"] == modality
        )
        assert len(store.vectors) == expected
        for vec in store.vectors.values():
            assert vec.dtype == np.float32 and vec.shape == (store.width,)

    repeat = export_embeddings(
        FIXTURE_PATH, tmp_path / "b", image_root=FIXTURE_IMAGE_ROOT,
        text_width=8, thumbnail_side=4,
    )
    assert repeat.content_hash == manifest.content_hash
    print("\nACCEPTANCE PASS: exporter round-trip (stores readable, hashes stable)")
