from __future__ import annotations

import base64
import json
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

PNG_BYTES = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg=="
)


@pytest.fixture
def golden_metadata_doc() -> dict:
    return json.loads((DATA_DIR / "image_questions_metadata.json").read_text())


def b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def upload_payload(*names: str, data: bytes = PNG_BYTES) -> dict:
    return {"files": [{"name": name, "data": b64(data)} for name in names]}
