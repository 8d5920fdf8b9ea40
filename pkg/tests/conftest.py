import pytest

from multlab.compute import Computer
from multlab.entries import Catalog


@pytest.fixture(scope="session")
def catalog():
    return Catalog.bundled()


@pytest.fixture(scope="session")
def computer(catalog):
    return Computer(catalog)
