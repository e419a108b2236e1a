from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fixture_bundle_path() -> Path:
    return FIXTURES / "fixture_video.json"


@pytest.fixture
def fixture_manifest_path() -> Path:
    return FIXTURES / "fixture_frames.json"


@pytest.fixture
def fixture_gtmask_path() -> Path:
    return FIXTURES / "fixture_gtmask.json"
