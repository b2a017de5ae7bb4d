from fractions import Fraction

import pytest

import randlab
from randlab.battery import battery, builtin_measures


@pytest.fixture(scope="session")
def fair():
    return randlab.fair_coin()


@pytest.fixture(scope="session")
def bern13():
    return randlab.bernoulli(Fraction(1, 3))


@pytest.fixture(scope="session")
def null_at_one():
    # bit 1 has probability zero at the root
    return randlab.split_table({"": 0})


@pytest.fixture(scope="session")
def battery_marts():
    return battery()


@pytest.fixture(scope="session")
def builtin_measure_map():
    return builtin_measures()
