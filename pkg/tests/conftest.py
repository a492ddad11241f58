from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ptrabi.model import FockSpace, ModelParams
from ptrabi.oracle import diagonalize

settings.register_profile(
    "ptrabi", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ptrabi")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def eig_cache():
    """Shared oracle decompositions keyed by (delta, g, cutoff)."""
    cache = {}

    def get(delta, g, cutoff=120, audit=False):
        key = (delta, g, cutoff, audit)
        if key not in cache:
            cache[key] = diagonalize(ModelParams(delta, g), FockSpace(cutoff), audit=audit)
        return cache[key]

    return get


_VERDICTS = {}


@pytest.fixture
def verdict():
    """Record the one-line outcome of an acceptance criterion."""

    def record(number, ok, detail):
        _VERDICTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_VERDICTS[number])

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[number])
