"""
Wigner function of the photon-subtracted squeezed thermal state after a
thermal amplitude-damping channel of decay kappa and environment occupation Nth.
"""
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln

from psstspy.closedform import PointLike, _alpha, _cm, _finish
from psstspy.log import log_debug
from psstspy.polylib import hermite, hermite_pair_sum
from psstspy.states import ChannelParams, DerivedCoeffs, EvolvedCoeffs, StateParams, derive, derive_evolved


def _evolved_gaussian(params: StateParams, coeffs: DerivedCoeffs, ev: EvolvedCoeffs, zeta):
    s = 2.0 * params.nbar + 1.0
    s_env = 2.0 * ev.Nth + 1.0
    mod_sq = np.abs(zeta) ** 2
    quad = coeffs.g2 * ev.g3 * ev.g3 / (4.0 * ev.G)
    exponent = -ev.Delta2 * mod_sq + 2.0 * quad * np.real(zeta * zeta)
    return np.exp(exponent) / (math.pi * s * s_env * ev.T_decay * math.sqrt(ev.G))


def wigner_evolved(params: StateParams, channel: ChannelParams, point: PointLike):
    """
    W(zeta, t) = W_0(zeta, t) * F_m(zeta, t).

    Args:
        params: the initial state
        channel: kappa*t and the environment occupation Nth
        point: phase-space point(s) zeta

    Returns:
        Wigner value(s), half-normalised

    Raises:
        PsstsParameterError: kappa_t below KAPPA_T_EPS; use wigner() there
    """
    ev = derive_evolved(params, channel)
    coeffs = derive(params)
    zeta = _alpha(point)
    m = params.m
    w0 = _evolved_gaussian(params, coeffs, ev, zeta)
    if m == 0:
        return _finish(w0)
    omega = ev.omega(zeta)
    if ev.Delta1 <= 0.0:
        f_m = hermite_pair_sum(m, omega, 0.0, ev.chi) / _cm(coeffs, m)
        return _finish(w0 * f_m)
    root = math.sqrt(ev.Delta1)
    arg = np.asarray(omega) / (2j * root)
    log_m = gammaln(m + 1)
    total = np.zeros(np.shape(zeta), dtype=float)
    for l in range(m + 1):
        coef = math.exp(2 * log_m - gammaln(l + 1) - 2 * gammaln(m - l + 1)) * ev.chi ** l * ev.Delta1 ** (m - l)
        total = total + coef * np.abs(hermite(m - l, arg)) ** 2
    return _finish(w0 * total / _cm(coeffs, m))


def wigner_evolved_generating(params: StateParams, channel: ChannelParams, point: PointLike):
    """
    Same quantity through the generating function with a = Delta1 and u = chi.
    """
    ev = derive_evolved(params, channel)
    coeffs = derive(params)
    zeta = _alpha(point)
    w0 = _evolved_gaussian(params, coeffs, ev, zeta)
    f_m = hermite_pair_sum(params.m, ev.omega(zeta), ev.Delta1, ev.chi) / _cm(coeffs, params.m)
    return _finish(w0 * f_m)


def thermal_wigner(Nth: float, point: PointLike):
    """
    Long-time limit: the thermal state of the environment.
    """
    s_env = 2.0 * Nth + 1.0
    zeta = _alpha(point)
    return _finish(np.exp(-2.0 * np.abs(zeta) ** 2 / s_env) / (math.pi * s_env))


def threshold_time(params: StateParams, Nth: float = 0.0) -> Optional[float]:
    """
    kappa*t at which W(0, t) of the single-subtracted state changes sign.

    Returns:
        None if W(0) is non-negative from the start (nbar > sinh^2 r),
        0.0 when nbar = sinh^2 r, else 1/2 ln[1 - (2nbar+1)(nbar - sinh^2 r)/((2Nth+1) B)]
    """
    nbar = params.nbar
    sinh_r_sq = math.sinh(params.r) ** 2
    if nbar > sinh_r_sq:
        return None
    if nbar == sinh_r_sq:
        return 0.0
    s = 2.0 * nbar + 1.0
    s_env = 2.0 * Nth + 1.0
    B = nbar * math.cosh(2.0 * params.r) + sinh_r_sq
    kappa_t = 0.5 * math.log(1.0 - s * (nbar - sinh_r_sq) / (s_env * B))
    log_debug("threshold kappa*t = %.6f for %s, Nth = %s", kappa_t, params, Nth)
    return kappa_t


__all__ = [
    "wigner_evolved",
    "wigner_evolved_generating",
    "thermal_wigner",
    "threshold_time",
]
