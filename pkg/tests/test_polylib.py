import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_hermite, eval_laguerre, eval_legendre

from psstspy.exception import PsstsParameterError
from psstspy.polylib import (
    double_derivative_gaussian,
    hermite,
    hermite_pair_sum,
    hermite_scaled,
    laguerre,
    legendre,
    legendre_gap_sum,
    legendre_scaled,
)

finite = dict(allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("m", range(0, 13))
@pytest.mark.parametrize("x", [-2.5, -1.0, -0.3, 0.0, 0.7, 1.0, 1.8])
def test_legendre_matches_scipy(m, x):
    assert legendre(m, x) == pytest.approx(eval_legendre(m, x), rel=1e-10, abs=1e-12)


def test_legendre_high_degree():
    assert legendre(40, 0.5) == pytest.approx(eval_legendre(40, 0.5), rel=1e-7, abs=1e-12)
    assert legendre(40, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_legendre_scaled_known_values():
    assert legendre_scaled(0, 3.0, -2.0) == 1.0
    assert legendre_scaled(1, 3.0, -2.0) == 3.0
    # d = b^2 leaves only the leading term b^m
    assert legendre_scaled(3, 2.0, 4.0) == 8.0
    assert legendre_scaled(5, -1.5, 2.25) == -1.5**5
    # d = 0 keeps the b^m/... sum real: 1 + (2/4) * 1 = 1.5
    assert legendre_scaled(2, 1.0, 0.0) == pytest.approx(1.5)


@given(
    st.integers(min_value=0, max_value=15),
    st.floats(min_value=-3.0, max_value=3.0, **finite),
    st.floats(min_value=0.1, max_value=4.0, **finite),
)
@settings(max_examples=200, deadline=None)
def test_legendre_scaled_positive_d(m, b, d):
    expected = d ** (m / 2.0) * eval_legendre(m, b / math.sqrt(d))
    assert legendre_scaled(m, b, d) == pytest.approx(expected, rel=1e-9, abs=1e-9 * (abs(b) + math.sqrt(d)) ** m)


def test_legendre_gap_sum_prefactor():
    base = legendre_gap_sum(8, 1.3, 0.4)
    assert legendre_gap_sum(8, 1.3, 0.4, log_prefactor=math.log(7.0)) == pytest.approx(7.0 * base, rel=1e-13)


def test_legendre_gap_sum_large_prefactor_does_not_overflow():
    # 200! overflows a double on its own; the product with b^200 does not
    value = legendre_gap_sum(200, 0.01, 0.0, log_prefactor=math.lgamma(201))
    assert value == pytest.approx(math.exp(math.lgamma(201) + 200 * math.log(0.01)), rel=1e-10)


@pytest.mark.parametrize("n", range(0, 21))
def test_hermite_real_axis(n):
    x = np.linspace(-3.0, 3.0, 13)
    assert np.allclose(hermite(n, x).real, eval_hermite(n, x), rtol=1e-10, atol=1e-10)
    assert np.all(hermite(n, x).imag == 0.0)


def test_hermite_complex_argument():
    z = 0.4 - 1.1j
    assert hermite(3, z) == pytest.approx(8 * z ** 3 - 12 * z, rel=1e-13)
    assert isinstance(hermite(3, z), complex)


@given(
    st.integers(min_value=1, max_value=15),
    st.floats(min_value=-3.0, max_value=3.0, **finite),
)
@settings(max_examples=200, deadline=None)
def test_hermite_derivative_by_central_difference(n, z):
    step = 1e-5
    slope = (hermite(n, z + step) - hermite(n, z - step)) / (2.0 * step)
    expected = 2.0 * n * hermite(n - 1, z)
    scale = abs(hermite(n, z)) + abs(expected) + 1.0
    assert abs(slope - expected) <= max(1e-6 * abs(expected), 1e-8 * scale)


def test_hermite_derivative_at_fixed_points():
    for n, z in [(3, 0.7), (6, -1.2), (10, 2.1)]:
        slope = (hermite(n, z + 1e-5) - hermite(n, z - 1e-5)) / 2e-5
        assert slope.real == pytest.approx(2.0 * n * hermite(n - 1, z).real, rel=1e-6)


@given(
    st.integers(min_value=0, max_value=12),
    st.complex_numbers(max_magnitude=3.0, **finite),
    st.floats(min_value=0.05, max_value=2.0, **finite),
)
@settings(max_examples=200, deadline=None)
def test_hermite_scaled_matches_hermite(n, x, a):
    root = 1j * math.sqrt(a)
    expected = root ** n * hermite(n, x / (2.0 * root))
    tol = 1e-9 * (abs(x) + 2.0 * math.sqrt(a) + 1.0) ** n
    assert abs(hermite_scaled(n, x, a) - expected) <= tol


def test_hermite_scaled_zero_quadratic_is_power():
    assert hermite_scaled(5, 1.5 + 0.5j, 0.0) == pytest.approx((1.5 + 0.5j) ** 5)


def test_hermite_pair_sum_low_orders():
    x = 0.8 - 0.3j
    assert hermite_pair_sum(0, x, 0.2, 0.7) == pytest.approx(1.0)
    assert hermite_pair_sum(1, x, 0.2, 0.7) == pytest.approx(abs(x) ** 2 + 0.7)


def test_hermite_pair_sum_at_zero_is_double_derivative():
    # x = 0 leaves exp[a(k^2 + s^2) + u k s]
    for m in range(0, 9):
        assert hermite_pair_sum(m, 0.0, 0.3, 1.1) == pytest.approx(double_derivative_gaussian(m, 0.3, 1.1), rel=1e-11)


@pytest.mark.parametrize("m", range(0, 16))
def test_laguerre_matches_scipy(m):
    x = np.linspace(-4.0, 10.0, 15)
    assert np.allclose(laguerre(m, x), eval_laguerre(m, x), rtol=1e-10, atol=1e-10)


def test_double_derivative_gaussian_second_order():
    assert double_derivative_gaussian(2, 0.7, 1.3) == pytest.approx(2 * 1.3 ** 2 + 4 * 0.7 ** 2)


@given(
    st.integers(min_value=0, max_value=20),
    st.floats(min_value=-2.0, max_value=2.0, **finite),
    st.floats(min_value=-2.0, max_value=2.0, **finite),
)
@settings(max_examples=200, deadline=None)
def test_double_derivative_is_scaled_legendre(m, a, b):
    expected = math.factorial(m) * legendre_gap_sum(m, b, 4.0 * a * a)
    scale = math.factorial(m) * (abs(b) + 2.0 * abs(a) + 1e-3) ** m
    assert double_derivative_gaussian(m, a, b) == pytest.approx(expected, rel=1e-9, abs=1e-12 * scale)


@pytest.mark.parametrize("m", range(0, 11))
@pytest.mark.parametrize("x", [1.2, 2.0, 5.0])
def test_double_derivative_reproduces_legendre(m, x):
    root = math.sqrt(x * x - 1.0)
    value = double_derivative_gaussian(m, -1.0, 2.0 * x / root) * root ** m / (2 ** m * math.factorial(m))
    assert value == pytest.approx(eval_legendre(m, x), rel=1e-10)


@pytest.mark.parametrize("bad", [-1, 2.5])
def test_degree_validation(bad):
    with pytest.raises(PsstsParameterError):
        legendre(bad, 0.3)
    with pytest.raises(PsstsParameterError):
        hermite(bad, 0.3)
