"""Shared pytest fixtures for grade_ao unit tests."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from grade_ao.schema import CodeParams, EdgeDistribution

CODES_DIR = Path(__file__).resolve().parents[1] / "data" / "codes"


@pytest.fixture()
def codes_dir() -> Path:
    return CODES_DIR


@pytest.fixture()
def small_params() -> CodeParams:
    return CodeParams.full_memory(3, 5, 2)


@pytest.fixture()
def lifted_params() -> CodeParams:
    return CodeParams.full_memory(3, 5, 2, circulant=7, replicas=3)


@pytest.fixture()
def tiny_params() -> CodeParams:
    return CodeParams.full_memory(3, 3, 1)


@pytest.fixture()
def uniform3() -> EdgeDistribution:
    return EdgeDistribution.uniform(3)


@pytest.fixture()
def zeros3x3() -> np.ndarray:
    return np.zeros((3, 3), dtype=np.int64)


@pytest.fixture()
def random_matrix(small_params: CodeParams) -> np.ndarray:
    rng = np.random.default_rng(7)
    return rng.choice(small_params.values(), size=(small_params.gamma, small_params.kappa))


@pytest.fixture()
def matrix_text() -> str:
    return "# toy partitioning matrix\n3 4 2 5 3\n0 1 2 0\n1 1 0 2\n2 0 1 1\n"
