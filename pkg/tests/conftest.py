import pathlib

import pytest

from hkbfs.engine import ground_context
from hkbfs.parser import load_kb

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def spillover_kb():
    return load_kb(str(FIXTURES / "spillover.hkb"))


@pytest.fixture()
def spillover_ctx(spillover_kb):
    return ground_context(spillover_kb, 2)


@pytest.fixture(scope="session")
def tiny_kb():
    return load_kb(str(FIXTURES / "tiny.hkb"))
