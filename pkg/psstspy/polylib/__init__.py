"""
Special polynomials and Gaussian generating-function identities.

Every closed-form expression for the photon-subtracted squeezed thermal state
reduces to one of these kernels. Degrees are supported at least up to
``config.POLY_MAX_DEGREE``; factorials are accumulated as log-gamma values so
that 40! and beyond never overflow.
"""
import math
from typing import Union

import numpy as np
from scipy.special import gammaln

from psstspy.exception import PsstsParameterError

LN2 = math.log(2.0)
# below this degree the term coefficients are exact integers over powers of 4
EXACT_TERM_MAX_DEGREE = 20

ArrayLike = Union[float, complex, np.ndarray]


def _check_degree(m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise PsstsParameterError("degree", m, "polynomial degree must be a non-negative integer")
    return int(m)


def _signed_log_power(base: float, power: int):
    """
    (sign, log|base|*power) of base**power, with 0**0 = 1 and 0**k = 0.
    """
    if power == 0:
        return 1.0, 0.0
    if base == 0.0:
        return 0.0, 0.0
    sign = 1.0 if base > 0 or power % 2 == 0 else -1.0
    return sign, power * math.log(abs(base))


def legendre_gap_sum(m: int, b: float, gap: float, log_prefactor: float = 0.0) -> float:
    """
    Real sum  sum_l m!/(2^{2l} (l!)^2 (m-2l)!) * b^{m-2l} * gap^l.

    With gap = b^2 - d this is d^{m/2} P_m(b/sqrt(d)), kept real for d <= 0.
    ``log_prefactor`` multiplies the whole sum by exp(log_prefactor) inside the
    per-term logarithm, so huge factorial prefactors do not overflow.

    Args:
        m: polynomial degree
        b: linear argument
        gap: b^2 - d, passed directly when it is known in closed form
        log_prefactor: log of a positive factor applied to the sum

    Returns:
        the value of the sum
    """
    m = _check_degree(m)
    b = float(b)
    gap = float(gap)
    if log_prefactor == 0.0 and m <= EXACT_TERM_MAX_DEGREE:
        return _legendre_gap_sum_exact(m, b, gap)
    log_m = gammaln(m + 1)
    total = 0.0
    for l in range(m // 2 + 1):
        sign_b, log_b = _signed_log_power(b, m - 2 * l)
        sign_g, log_g = _signed_log_power(gap, l)
        sign = sign_b * sign_g
        if sign == 0.0:
            continue
        log_coef = log_prefactor + log_m - 2 * l * LN2 - 2 * gammaln(l + 1) - gammaln(m - 2 * l + 1)
        total += sign * math.exp(log_coef + log_b + log_g)
    return total


def _legendre_gap_sum_exact(m: int, b: float, gap: float) -> float:
    total = 0.0
    for l in range(m // 2 + 1):
        # m!/(4^l (l!)^2 (m-2l)!) = C(m, 2l) C(2l, l) / 4^l
        coef = math.comb(m, 2 * l) * math.comb(2 * l, l) / 4**l
        total += coef * b ** (m - 2 * l) * gap**l
    return total


def legendre_scaled(m: int, b: float, d: float) -> float:
    """
    d^{m/2} P_m(b/sqrt(d)) through its manifestly real expansion; d may be zero or negative.
    """
    b = float(b)
    return legendre_gap_sum(m, b, b * b - float(d))


def legendre(m: int, x: float) -> float:
    """
    Legendre polynomial P_m(x) from the finite sum, valid for any real x.
    """
    x = float(x)
    return legendre_gap_sum(m, x, x * x - 1.0)


def hermite(n: int, z: ArrayLike) -> ArrayLike:
    """
    Physicists' Hermite polynomial H_n(z) for complex z by the three-term recurrence.
    """
    n = _check_degree(n)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    h_prev = np.ones_like(z)
    if n == 0:
        return complex(h_prev) if scalar else h_prev
    h = 2.0 * z
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    return complex(h) if scalar else h


def hermite_scaled(n: int, x: ArrayLike, a: float) -> ArrayLike:
    """
    n-th derivative of exp(x*k + a*k^2) at k = 0.

    Equals (i sqrt(a))^n H_n(x / (2 i sqrt(a))) for a != 0 and x^n for a = 0;
    the recurrence h_{n+1} = x h_n + 2 a n h_{n-1} needs no square root.
    """
    return _hermite_scaled_table(n, x, a)[-1]


def _hermite_scaled_table(n: int, x: ArrayLike, a: float):
    n = _check_degree(n)
    x = np.asarray(x, dtype=complex)
    table = [np.ones_like(x)]
    if n >= 1:
        table.append(x.copy())
    for k in range(1, n):
        table.append(x * table[k] + 2.0 * a * k * table[k - 1])
    return table


def hermite_pair_sum(m: int, x: ArrayLike, a: float, u: float) -> ArrayLike:
    """
    d^{2m}/dk^m ds^m exp[x k + x* s + a (k^2 + s^2) + u k s] at k = s = 0, for real a and u.

    Evaluated as sum_l (m!)^2 u^l / (l! ((m-l)!)^2) * |h_{m-l}(x, a)|^2.
    """
    m = _check_degree(m)
    scalar = np.ndim(x) == 0
    table = _hermite_scaled_table(m, x, a)
    log_m = gammaln(m + 1)
    total = np.zeros(np.shape(table[0]), dtype=float)
    for l in range(m + 1):
        coef = math.exp(2 * log_m - gammaln(l + 1) - 2 * gammaln(m - l + 1))
        total = total + coef * float(u) ** l * np.abs(table[m - l]) ** 2
    return float(total) if scalar else total


def laguerre(m: int, x: ArrayLike) -> ArrayLike:
    """
    Laguerre polynomial L_m(x) by (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
    """
    m = _check_degree(m)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if m == 0:
        return float(l_prev) if scalar else l_prev
    l_cur = 1.0 - x
    for k in range(1, m):
        l_prev, l_cur = l_cur, ((2 * k + 1 - x) * l_cur - k * l_prev) / (k + 1)
    return float(l_cur) if scalar else l_cur


def double_derivative_gaussian(m: int, a_quad: float, b_cross: float) -> float:
    """
    d^{2m}/dk^m ds^m exp[a_quad (k^2 + s^2) + b_cross k s] at k = s = 0.

    Expands the exponential as a triple power series in a k^2, a s^2 and b k s
    and keeps the k^m s^m coefficient; independent of the Legendre shortcut.
    """
    m = _check_degree(m)
    a_quad = float(a_quad)
    b_cross = float(b_cross)
    log_m = gammaln(m + 1)
    total = 0.0
    for l in range(m % 2, m + 1, 2):
        # the k- and s-degrees force i = j = (m - l) / 2
        i = (m - l) // 2
        sign_a, log_a = _signed_log_power(a_quad, 2 * i)
        sign_b, log_b = _signed_log_power(b_cross, l)
        sign = sign_a * sign_b
        if sign == 0.0:
            continue
        log_coef = 2 * log_m - 2 * gammaln(i + 1) - gammaln(l + 1)
        total += sign * math.exp(log_coef + log_a + log_b)
    return total


__all__ = [
    "legendre",
    "legendre_scaled",
    "legendre_gap_sum",
    "hermite",
    "hermite_scaled",
    "hermite_pair_sum",
    "laguerre",
    "double_derivative_gaussian",
]
