from functools import lru_cache

import pytest

from wmha.config import Settings
from wmha.groupoid import model_presentation, preset
from wmha.pipeline import PipelineRun, Presentation, run_verification


@lru_cache(maxsize=None)
def model(name: str, kind: str) -> Presentation:
    return model_presentation(preset(name), kind)


@lru_cache(maxsize=None)
def verified(name: str, kind: str, path: str = "both") -> PipelineRun:
    """Full pipeline on a preset model, shared across tests."""
    return run_verification(model(name, kind), Settings(), path)


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def pair2_function() -> PipelineRun:
    return verified("pair:2", "function")


@pytest.fixture
def pair2_convolution() -> PipelineRun:
    return verified("pair:2", "convolution")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("WMHA_LOG_LEVEL", "WMHA_SEED", "WMHA_WINDOWS", "WMHA_REPORT_INDENT", "WMHA_CROSSCHECK", "WMHA_ROUND_TRIPS"):
        monkeypatch.delenv(name, raising=False)


# Single-entry perturbations of the pair:2 models: (model, target, index, id
# prefix of the first failing check).
MUTATIONS = [
    ("function", "structure", (1, 2, 0), "alg-associative"),
    ("function", "structure", (0, 1, 2), "alg-associative"),
    ("function", "structure", (2, 3, 1), "alg-associative"),
    ("function", "structure", (3, 0, 2), "alg-associative"),
    ("function", "structure", (0, 3, 1), "alg-associative"),
    ("function", "T1", (1, 0), "def-1.1"),
    ("function", "T1", (6, 4), "def-1.1"),
    ("function", "T1", (5, 6), "def-1.1"),
    ("function", "T1", (11, 15), "def-1.1"),
    ("function", "T1", (12, 3), "def-1.1"),
    ("function", "E", (0, 0), "thm-2.9"),
    ("function", "E", (1, 2), "thm-2.9"),
    ("function", "E", (15, 15), "thm-2.9"),
    ("convolution", "E", (0, 0), "thm-2.9"),
    ("convolution", "E", (3, 12), "thm-2.9"),
    ("function", "S", (1, 2), "thm-2.9"),
    ("function", "S", (0, 0), "thm-2.9"),
    ("convolution", "S", (0, 1), "thm-2.9"),
    ("convolution", "S", (3, 3), "thm-2.9"),
    ("convolution", "S", (2, 1), "thm-2.9"),
]
