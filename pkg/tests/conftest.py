import pathlib

import pytest

from mfun.forms import build_builtin
from mfun.qexp import delta_tau_table, level11_an_table

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def delta():
    # one big build shared by everything; covers primes to 1e5
    return build_builtin("delta", 100_000)


@pytest.fixture(scope="session")
def f11a():
    return build_builtin("11a", 5000)


@pytest.fixture(scope="session")
def tau_table():
    return delta_tau_table(10_000)


@pytest.fixture(scope="session")
def a11_table():
    return level11_an_table(1000)


@pytest.fixture(scope="session")
def family_path():
    return str(DATA_DIR / "family_101_weight2.json")
