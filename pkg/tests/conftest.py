"""Shared fixtures."""

import numpy as np
import pytest

from services.linalg_service.states import singlet
from services.povm_service.nm_povm import build_povm
from shared.models import DensityMatrix, NMPovmSpec
from shared.utils.config import get_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    """Re-read settings for every test so monkeypatched env vars apply."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def bell_singlet() -> DensityMatrix:
    return singlet()


@pytest.fixture
def qubit_sic():
    return build_povm(NMPovmSpec(d=2, N=1, M=4, x=0.25))


@pytest.fixture
def qubit_mub():
    return build_povm(NMPovmSpec(d=2, N=3, M=2, x=1.0))
