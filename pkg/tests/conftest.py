"""
Shared pytest fixtures for testing agnostic-dp.
"""

import json
from fractions import Fraction

import pytest

from agnostic_dp.concepts import ClassKind, ConceptClass
from agnostic_dp.data import Dataset
from agnostic_dp.experiments import gen_noisy_threshold
from agnostic_dp.logging import reset_run_logger
from agnostic_dp.rng import RandomStream


@pytest.fixture
def rng():
    """Root stream with a fixed seed."""
    return RandomStream.from_seed(20240611)


@pytest.fixture
def thresholds8():
    return ConceptClass(ClassKind.THRESHOLDS, 8)


@pytest.fixture
def thresholds16():
    return ConceptClass(ClassKind.THRESHOLDS, 16)


@pytest.fixture
def points10():
    return ConceptClass(ClassKind.POINTS, 10)


@pytest.fixture
def intervals8():
    return ConceptClass(ClassKind.INTERVALS, 8)


@pytest.fixture
def union2_8():
    return ConceptClass(ClassKind.UNION_K_INTERVALS, 8, k=2)


@pytest.fixture
def all_small_classes(points10, thresholds8, intervals8, union2_8):
    """One descriptor of every family."""
    return [points10, thresholds8, intervals8, union2_8]


@pytest.fixture
def threshold_data():
    """Twelve examples on [0, 8) labeled by the threshold t=4 with one flipped label."""
    xs = (0, 1, 2, 3, 4, 5, 6, 7, 1, 3, 5, 6)
    ys = (0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 1, 1)
    return Dataset(xs, ys)


@pytest.fixture
def noisy_threshold16():
    """Uniform marginal on [0, 16), threshold 6, label noise 1/10."""
    return gen_noisy_threshold(16, 6, Fraction(1, 10))


@pytest.fixture
def isolated_settings(tmp_path, monkeypatch):
    """
    Point AGNOSTIC_DP_CONFIG at a temporary config so that the CLI never
    touches ~/.config; returns the run log path.
    """
    run_log = tmp_path / "runs.log"
    config_file = tmp_path / "config.json"
    config_file.write_text(json.dumps({"seed": 7, "mode": "private", "run_log": str(run_log)}))
    monkeypatch.setenv("AGNOSTIC_DP_CONFIG", str(config_file))
    monkeypatch.delenv("AGNOSTIC_DP_MODE", raising=False)
    return run_log


@pytest.fixture(autouse=True)
def cleanup_run_state():
    """Clean up run ID context and the global run logger after each test."""
    from agnostic_dp.utils import clear_run_id

    yield
    clear_run_id()
    reset_run_logger()
