from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_videos() -> Path:
    path = FIXTURES / "videos"
    if not path.is_dir():
        pytest.skip("fixture videos missing; run scripts/make_fixture_videos.py")
    return path


@pytest.fixture(scope="session")
def fixture_texts() -> Path:
    path = FIXTURES / "texts.jsonl"
    if not path.is_file():
        pytest.skip("fixture texts missing; run scripts/make_fixture_videos.py")
    return path
