from fractions import Fraction

import pytest

from fermat_eds.curves import CubicPoint
from fermat_eds.eds import EdsContext

# (d, generator) pairs used across the suite
FIXTURES = {
    # integral point, W_1 = 1
    "d7": (7, CubicPoint(2, -1)),
    # W_1 = 21, odd
    "d6": (6, CubicPoint(Fraction(17, 21), Fraction(37, 21))),
    # 3 * (2, -1): W_1 = 38 even, non-singular above 3, p0 = 5
    "d7_triple": (7, CubicPoint(Fraction(-17, 38), Fraction(73, 38))),
    # W_1 = 294 = 2 * 3 * 7^2, non-singular at 5
    "d15": (15, CubicPoint(Fraction(397, 294), Fraction(683, 294))),
}


@pytest.fixture(scope="session")
def contexts():
    return {name: EdsContext(d, P) for name, (d, P) in FIXTURES.items()}


@pytest.fixture(scope="session")
def d7(contexts):
    return contexts["d7"]


@pytest.fixture(scope="session")
def d6(contexts):
    return contexts["d6"]


@pytest.fixture(scope="session")
def d7_triple(contexts):
    return contexts["d7_triple"]


@pytest.fixture(scope="session")
def d15(contexts):
    return contexts["d15"]
