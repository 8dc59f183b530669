import pytest
from mpmath import mp

from frobenius_g2.frobenius_an import ParamPoint, build_point
from frobenius_g2.mp_series import precision


@pytest.fixture(autouse=True)
def working_precision():
    # every test computes at 256 bits unless it opens its own context
    with precision(256):
        yield mp.prec


@pytest.fixture
def a2():
    """lambda = z**3 - 3z, critical points -1 and 1 (index 1 is z = 1)."""
    return build_point(ParamPoint(2, (0, -3)))


@pytest.fixture
def a1():
    return build_point(ParamPoint(1, (5,)))
