from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src import config, zoo  # noqa: E402
from src.models import FiniteLocalModel  # noqa: E402

DATA_DIR = ROOT / "tests" / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def golden_model_path() -> Path:
    return DATA_DIR / "golden_model.json"


@pytest.fixture
def golden_spreadsheet_path() -> Path:
    return DATA_DIR / "golden_spreadsheet.csv"


@pytest.fixture
def two_atom_model() -> FiniteLocalModel:
    """The model behind the golden spreadsheet; every kernel entry is dyadic."""

    return FiniteLocalModel(
        ["l0", "l1"],
        [0.5, 0.5],
        [[1.0, 0.25], [0.5, 0.75]],
        [[0.0, 0.75], [0.5, 0.25]],
    )


@pytest.fixture
def random_local_models():
    return [zoo.random_local_model(atoms=1 + seed % 5, seed=seed) for seed in range(40)]


@pytest.fixture
def factored_models():
    return [zoo.random_factored_model(seed) for seed in range(40)]


@pytest.fixture
def restore_runtime_settings():
    saved = config.get_runtime_settings()
    yield
    config.override_runtime_settings(saved)
