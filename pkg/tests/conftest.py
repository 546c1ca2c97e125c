from pathlib import Path

import numpy as np
import pytest

from evqa.synthetic import build_random_container

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def demo_container() -> Path:
    """The checked-in 3-item QA container (regenerate: scripts/make_fixtures.py)."""
    path = FIXTURES / "demo_qa"
    if not (path / "manifest.json").is_file():
        pytest.skip("demo fixture missing; run scripts/make_fixtures.py")
    return path


@pytest.fixture
def random_container(tmp_path):
    """Factory: small random-but-valid container in a temp dir."""

    def build(seed: int = 0, n_items: int = 3):
        path = tmp_path / f"container-{seed}"
        manifest = build_random_container(path, np.random.default_rng(seed), n_items=n_items)
        return path, manifest

    return build
