from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "data" / "fixture"
FIXTURE_PATH = FIXTURE_DIR / "fixture_20.jsonl"
FIXTURE_IMAGE_ROOT = FIXTURE_DIR / "stickers"
