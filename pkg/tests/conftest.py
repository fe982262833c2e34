"""Shared fixtures: every test starts from default settings."""

import pytest

from services import settings
from services.sampler_service import ramp_path, sample


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    for name in (
        "FRAMEPATH_SEED",
        "FRAMEPATH_MAX_LEVEL",
        "FRAMEPATH_MAX_PVAR_POINTS",
        "FRAMEPATH_MAX_SURFACE_ENTRIES",
        "FRAMEPATH_SERIES_TOL",
        "FRAMEPATH_THREADS",
        "FRAMEPATH_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
    settings.clear_cache()
    yield
    settings.clear_cache()


@pytest.fixture
def path12():
    return sample(12, 7)


@pytest.fixture
def ramp10():
    return ramp_path(10)
