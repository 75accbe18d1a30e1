import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempered_abc.errors import InvalidInputError, UnsupportedRangeError
from tempered_abc.mittag_leffler import Z_CAP, mittag_leffler

# reference values from a 300-digit mpmath series (or e^{z^2} erfc(-z) for order 1/2)
REFERENCE = [
    (0.5, -1.0, 0.427583576155807004),
    (0.8, -3.0, 0.112920198682217387),
    (0.3, -10.0, 0.0726497290727720862),
    (0.9, 2.0, 9.60492778457150068),
    (0.5, -20.0, 0.0281743487410513193),
    (0.7, -50.0, 0.00679366567038309390),
    (0.5, -100.0, 0.00564161378298943290),
    (0.8, -30.0, 0.00757586079921920870),
    (0.9, 10.0, 451737.774567737400),
]


@pytest.mark.parametrize("order,z,expected", REFERENCE)
def test_reference_values(order, z, expected):
    assert mittag_leffler(order, z) == pytest.approx(expected, rel=1e-10)


@given(st.floats(0.05, 1.0))
def test_at_zero(order):
    assert mittag_leffler(order, 0.0) == 1.0


@given(st.floats(-50.0, 5.0))
def test_order_one_is_exponential(z):
    assert mittag_leffler(1.0, z) == pytest.approx(math.exp(z), rel=1e-12)


def test_e():
    assert mittag_leffler(1.0, 1.0) == pytest.approx(2.71828182845905, rel=1e-14)


@given(st.floats(0.1, 0.95), st.floats(-500.0, -0.01), st.floats(-500.0, -0.01))
def test_completely_monotone_on_negative_axis(order, z1, z2):
    # E_a(-x) is positive and decreasing for 0 < a <= 1
    lo, hi = sorted((z1, z2))
    a, b = mittag_leffler(order, lo), mittag_leffler(order, hi)
    assert a > 0.0 and b > 0.0
    assert a <= b * (1 + 1e-10)


def test_array_input():
    out = mittag_leffler(0.5, np.array([0.0, -1.0]))
    np.testing.assert_allclose(out, [1.0, 0.427583576155807004], rtol=1e-12)


def test_cap():
    with pytest.raises(UnsupportedRangeError):
        mittag_leffler(0.5, -2 * Z_CAP)


@pytest.mark.parametrize("order", [0.0, 1.5, -0.1])
def test_bad_order(order):
    with pytest.raises(InvalidInputError):
        mittag_leffler(order, 1.0)
