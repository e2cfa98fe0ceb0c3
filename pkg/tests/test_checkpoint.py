import numpy as np
import pytest

from mmsair.checkpoint import load_checkpoint, save_checkpoint
from mmsair.errors import CheckpointError


def sample_params():
    rng = np.random.default_rng(0)
    return {
        "fusion.w_e": rng.normal(size=(4, 24)).astype(np.float32),
        "head.b_s": rng.normal(size=3).astype(np.float32),
        "scalarish": np.float32(2.5).reshape(()),
    }


def test_round_trip(tmp_path):
    path = tmp_path / "ckpt.msck"
    params = sample_params()
    config = {"d_model": 4, "seed": 42}
    save_checkpoint(path, params, config)
    loaded, cfg = load_checkpoint(path)
    assert cfg == config
    assert set(loaded) == set(params)
    for name in params:
        assert np.array_equal(loaded[name], np.asarray(params[name]))


def test_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.msck", tmp_path / "b.msck"
    save_checkpoint(a, sample_params(), {"seed": 1})
    save_checkpoint(b, sample_params(), {"seed": 1})
    assert a.read_bytes() == b.read_bytes()


def test_truncation_detected(tmp_path):
    path = tmp_path / "ckpt.msck"
    save_checkpoint(path, sample_params(), {})
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "ckpt.msck"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(CheckpointError, match="magic"):
        load_checkpoint(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "ckpt.msck"
    save_checkpoint(path, sample_params(), {})
    path.write_bytes(path.read_bytes() + b"junk")
    with pytest.raises(CheckpointError, match="trailing"):
        load_checkpoint(path)
