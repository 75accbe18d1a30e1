import math

import numpy as np
import pytest

from tempered_abc.calculus import SampledFunction, TimeGrid
from tempered_abc.errors import DivergenceError, InvalidInputError, TruncationWarning
from tempered_abc.laplace import laplace_forward, laplace_of_samples, talbot_inverse


def test_constant():
    assert laplace_forward(lambda t: 1.0, 2.0, 30.0) == pytest.approx(0.5, abs=1e-8)


def test_exponential():
    assert laplace_forward(lambda t: math.exp(-t), 1.0, 40.0) == pytest.approx(0.5, abs=1e-10)


def test_complex_point():
    s = 2.0 + 3.0j
    assert abs(laplace_forward(lambda t: math.exp(-t), s, 40.0) - 1.0 / (s + 1.0)) < 1e-10


def test_truncation_warns():
    with pytest.warns(TruncationWarning):
        laplace_forward(lambda t: 1.0, 0.1, 5.0)


@pytest.mark.parametrize("s", [0.0, -1.0, 1j])
def test_rejects_left_half_plane(s):
    with pytest.raises(InvalidInputError):
        laplace_forward(lambda t: 1.0, s, 10.0)


def test_samples_exact_for_piecewise_linear():
    grid = TimeGrid(40.0, 40)
    f = SampledFunction.from_callable(lambda t: np.maximum(0.0, 1.0 - np.abs(t - 2.0)), grid)
    s = np.array([1.0, 0.5 + 2.0j])
    # hat function on [1, 3]: (e^{-s} - 2 e^{-2s} + e^{-3s}) / s^2
    exact = (np.exp(-s) - 2 * np.exp(-2 * s) + np.exp(-3 * s)) / s**2
    np.testing.assert_allclose(laplace_of_samples(f, s), exact, rtol=1e-12)


def test_talbot_examples():
    assert talbot_inverse(lambda s: 1.0 / s, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert talbot_inverse(lambda s: 1.0 / (s + 1.0), 2.0) == pytest.approx(math.exp(-2.0), abs=1e-10)
    assert talbot_inverse(lambda s: (s + 1.0) ** -0.5, 1.0) == pytest.approx(
        0.207553748710297352, abs=1e-9)


def test_talbot_divergence():
    with pytest.raises(DivergenceError):
        talbot_inverse(lambda s: complex(math.nan), 1.0)


def test_talbot_needs_positive_time():
    with pytest.raises(InvalidInputError):
        talbot_inverse(lambda s: 1.0 / s, 0.0)
