"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from manifoldlab.manifolds import get_manifold


@pytest.fixture
def unit_circle():
    """Unit circle in R^2."""
    return get_manifold("circle")


@pytest.fixture
def unit_sphere():
    """Unit sphere in R^3."""
    return get_manifold("sphere")


@pytest.fixture
def clifford():
    """Clifford torus in R^4."""
    return get_manifold("clifford-torus")


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(12345)


@pytest.fixture
def quick_training() -> dict:
    """Training parameters small enough for unit tests."""
    return {"epochs": 5, "learning_rate": 1e-2, "batch_size": 32}


@pytest.fixture
def isolated_output(monkeypatch):
    """Remove the output-directory environment override."""
    monkeypatch.delenv("MANIFOLDLAB_OUTPUT_DIR", raising=False)
