import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_logs_path() -> Path:
    return FIXTURES / "transfers.jsonl"


@pytest.fixture(scope="session")
def fixture_manifest() -> dict:
    return json.loads((FIXTURES / "manifest.json").read_text())
