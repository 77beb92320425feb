import pytest

from freeorth.fusion import FusionTable
from freeorth.rep import build_tower


@pytest.fixture(scope="session")
def tower3():
    return build_tower(8, 3)


@pytest.fixture(scope="session")
def table3(tower3):
    return FusionTable(tower3)


@pytest.fixture(scope="session")
def tower4():
    return build_tower(6, 4)


@pytest.fixture(scope="session")
def table4(tower4):
    return FusionTable(tower4)
