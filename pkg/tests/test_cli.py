import json

import pytest

from mmsair.cli import main
from mmsair.dataset import save_dataset
from mmsair.synth import make_synthetic_dataset
from tests.conftest import FIXTURE_PATH


@pytest.fixture
def synth_data(tmp_path):
    records = make_synthetic_dataset(12, seed=3, image_dir=tmp_path / "imgs", image_size=4)
    data = tmp_path / "data.jsonl"
    save_dataset(records, data)
    return data, tmp_path / "imgs"


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr().out
    return rc, out


COMMON = [
    "--d-model", "8", "--num-heads", "2", "--vocab-size", "16",
    "--thumbnail-size", "4", "--epochs", "2", "--train-batch", "4", "--lr", "1e-3",
]


def test_stats_fixture(capsys):
    rc, out = run_cli(capsys, "stats", "--data", str(FIXTURE_PATH))
    assert rc == 0
    report = json.loads(out)
    assert report["total"] == 20


def test_train_then_eval(capsys, synth_data, tmp_path):
    data, imgs = synth_data
    out_dir = tmp_path / "run"
    rc, _ = run_cli(
        capsys, "train", "--data", str(data), "--out-dir", str(out_dir),
        "--image-root", str(imgs), "--no-split", *COMMON,
    )
    assert rc == 0
    assert (out_dir / "checkpoint_final.msck").exists()
    assert (out_dir / "checkpoint_best.msck").exists()
    lines = (out_dir / "epochs.jsonl").read_text().splitlines()
    assert len(lines) == 2 and all(json.loads(l)["loss"] > 0 for l in lines)

    rc, out = run_cli(
        capsys, "eval", "--checkpoint", str(out_dir / "checkpoint_final.msck"),
        "--data", str(data), "--image-root", str(imgs),
    )
    assert rc == 0
    report = json.loads(out)
    assert 0.0 <= report["sentiment"]["accuracy"] <= 1.0


def test_config_file_with_flag_override(capsys, synth_data, tmp_path):
    data, imgs = synth_data
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("d_model = 8\nnum_heads = 2\nvocab_size = 16\n"
                        "thumbnail_size = 4\nepochs = 5\ntrain_batch = 4\n")
    out_dir = tmp_path / "run2"
    rc, _ = run_cli(
        capsys, "train", "--data", str(data), "--out-dir", str(out_dir),
        "--image-root", str(imgs), "--no-split", "--config", str(cfg_file),
        "--epochs", "1",  # flag overrides the file's 5
    )
    assert rc == 0
    assert len((out_dir / "epochs.jsonl").read_text().splitlines()) == 1


def test_ablate_and_task_grid(capsys, synth_data, tmp_path):
    data, imgs = synth_data
    rc, out = run_cli(
        capsys, "ablate", "--data", str(data), "--image-root", str(imgs),
        "--epochs", "1", "--train-fraction", "0.75", *COMMON[:10],
    )
    assert rc == 0
    rows = json.loads(out)
    assert [r["label"] for r in rows] == [
        "full", "w/o C_F", "w/o S_F", "w/o ST_F", "w/o S_F&ST_F", "w/o C_F&ST_F",
    ]

    rc, out = run_cli(
        capsys, "task-grid", "--data", str(data), "--image-root", str(imgs),
        "--epochs", "1", "--train-fraction", "0.75", *COMMON[:10],
    )
    assert rc == 0
    rows = json.loads(out)
    assert [r["label"] for r in rows] == ["SA", "IR", "MSAIRS"]
    assert rows[0]["intent"] is None and rows[1]["sentiment"] is None


def test_gradcheck_single_seed(capsys):
    rc, out = run_cli(capsys, "gradcheck", "--seeds", "1", "--vocab-size", "12")
    assert rc == 0
    summary = json.loads(out[out.index("{"):])
    assert summary["ok"] is True
    assert summary["max_rel_err"] < 1e-4


def test_dataset_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n")
    rc = main(["stats", "--data", str(bad)])
    assert rc == 2
