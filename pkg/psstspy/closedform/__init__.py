"""
Closed-form observables of the photon-subtracted squeezed thermal state.

All functions are pure in (StateParams, point). Phase-space points are
alpha = (q + i p)/sqrt(2); they may be given as a PhasePoint, a complex scalar
or a complex ndarray, in which case the result is an ndarray of the same shape.

Wigner values use the half-normalised convention of the (1/pi) displaced-parity
operator: the integral of W over d²alpha is 1/2. The P-function is a density
with respect to d²alpha/pi, the Husimi function with respect to d²alpha.
"""
import math
from multiprocessing.pool import ThreadPool
from typing import TYPE_CHECKING, Callable, Optional, Union

import numpy as np
from pydantic import field_validator, model_validator
from scipy.integrate import trapezoid
from scipy.special import gammaln

from psstspy.config import ALPHA_MAX, IMAG_RESIDUE_TOL, KAPPA_T_EPS, PND_TAIL
from psstspy.exception import NonRegularPError, PsstsError, PsstsParameterError
from psstspy.log import log_debug, log_warning
from psstspy.model import PsstsModel, QuasiProbKind
from psstspy.polylib import hermite, hermite_pair_sum, laguerre, legendre_gap_sum
from psstspy.states import DerivedCoeffs, StateParams, derive
from psstspy.util import alpha_from_qp

if TYPE_CHECKING:
    from psstspy.states import ChannelParams

MANDEL_CAVEAT = "Q_M >= 0 does not certify classicality; use the Wigner function to test nonclassicality"


class PhasePoint(PsstsModel):
    alpha: complex

    @field_validator("alpha")
    @classmethod
    def _bounded(cls, value: complex) -> complex:
        if abs(value) > ALPHA_MAX:
            raise ValueError(f"|alpha| must not exceed {ALPHA_MAX}")
        return value

    @staticmethod
    def from_qp(q: float, p: float) -> "PhasePoint":
        return PhasePoint(alpha=complex(alpha_from_qp(q, p)))


class QuasiProbValue(PsstsModel):
    value: float
    kind: QuasiProbKind

    @model_validator(mode="after")
    def _husimi_non_negative(self) -> "QuasiProbValue":
        if self.kind == QuasiProbKind.HUSIMI and self.value < 0.0:
            raise ValueError("Husimi values are non-negative")
        return self


class MandelQ(PsstsModel):
    value: float
    sub_poissonian: bool
    caveat: Optional[str] = None


PointLike = Union[PhasePoint, complex, float, np.ndarray]


def _alpha(point: PointLike):
    if isinstance(point, PhasePoint):
        return point.alpha
    if np.ndim(point) == 0:
        return complex(point)
    return np.asarray(point, dtype=complex)


def _finish(value):
    return float(value) if np.ndim(value) == 0 else value


def _log_cm(coeffs: DerivedCoeffs, m: int) -> float:
    return gammaln(m + 1) + math.log(legendre_gap_sum(m, coeffs.B, 4.0 * coeffs.A * coeffs.A))


def _cm(coeffs: DerivedCoeffs, m: int) -> float:
    return legendre_gap_sum(m, coeffs.B, 4.0 * coeffs.A * coeffs.A, log_prefactor=gammaln(m + 1))


def _discard_imag(total, scale):
    """
    Real part of a sum whose imaginary part is rounding residue only.
    """
    residue = np.max(np.abs(np.imag(total)))
    bound = IMAG_RESIDUE_TOL * max(float(np.max(scale)), np.finfo(float).tiny)
    if residue > bound:
        raise PsstsError(f"imaginary residue {residue:.3e} exceeds {bound:.3e}")
    return np.real(total)


def normalization_cm(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> float:
    """
    C_m = tr(a^m rho_s a†^m) = m! * sum_l m!/((l!)^2 (m-2l)!) B^{m-2l} A^{2l}.
    """
    return _cm(coeffs or derive(params), params.m)


def _cm_ratio(coeffs: DerivedCoeffs, m: int, k: int) -> float:
    """
    C_{m+k}/C_m; zero when a^{m+k} annihilates the state (the vacuum).
    """
    if _cm(coeffs, m + k) == 0.0:
        return 0.0
    return math.exp(_log_cm(coeffs, m + k) - _log_cm(coeffs, m))


def mean_photon(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> float:
    return _cm_ratio(coeffs or derive(params), params.m, 1)


def second_moment(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> float:
    """
    <a†² a²> = C_{m+2}/C_m.
    """
    return _cm_ratio(coeffs or derive(params), params.m, 2)


def mandel_q(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> float:
    """
    Q_M = C_{m+2}/C_{m+1} - C_{m+1}/C_m, taken as 0 for the vacuum.
    """
    coeffs = coeffs or derive(params)
    m = params.m
    if _cm(coeffs, m + 1) == 0.0:
        return 0.0
    return _cm_ratio(coeffs, m + 1, 1) - _cm_ratio(coeffs, m, 1)


def mandel_q_report(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> MandelQ:
    value = mandel_q(params, coeffs)
    if value >= 0.0:
        log_warning("Mandel Q = %.6g for %s: %s", value, params, MANDEL_CAVEAT)
        return MandelQ(value=value, sub_poissonian=False, caveat=MANDEL_CAVEAT)
    return MandelQ(value=value, sub_poissonian=True)


def pnd(params: StateParams, n: int, coeffs: Optional[DerivedCoeffs] = None) -> float:
    """
    Probability of finding n photons.

    Args:
        params: state parameters
        n: photon number

    Returns:
        (m+n)!/(n! tau1 tau2 C_m) * [(m+n)-th scaled Legendre sum in A1, E];
        the photon-subtracted thermal distribution when r = 0
    """
    if n < 0 or int(n) != n:
        raise PsstsParameterError("n", n, "photon number must be a non-negative integer")
    n = int(n)
    m = params.m
    k = m + n
    if not params.is_squeezed:
        nbar = params.nbar
        if nbar == 0.0:
            return 1.0 if n == 0 else 0.0
        log_value = (
            gammaln(k + 1) - gammaln(m + 1) - gammaln(n + 1)
            + n * math.log(nbar) - (k + 1) * math.log1p(nbar)
        )
        return math.exp(log_value)
    coeffs = coeffs or derive(params)
    log_prefactor = gammaln(k + 1) - gammaln(n + 1) - math.log(coeffs.tau1_tau2) - _log_cm(coeffs, m)
    return legendre_gap_sum(k, coeffs.A1, 4.0 * coeffs.A2 * coeffs.A2, log_prefactor=log_prefactor)


def squeezed_thermal_pnd(nbar: float, r: float, n: int) -> float:
    """
    Photon-number distribution of the squeezed thermal state itself (m = 0).
    """
    return pnd(StateParams(nbar=nbar, r=r, m=0), n)


def pnd_vector(params: StateParams, n_max: int, coeffs: Optional[DerivedCoeffs] = None) -> np.ndarray:
    coeffs = coeffs or derive(params)
    return np.array([pnd(params, n, coeffs) for n in range(n_max + 1)])


def pnd_tail_cutoff(params: StateParams, tail: float = PND_TAIL, n_limit: int = 100_000) -> int:
    """
    Smallest N with 1 - sum_{n<=N} P(n) < tail.
    """
    total = 0.0
    for n in range(n_limit + 1):
        total += pnd(params, n)
        if 1.0 - total < tail:
            log_debug("pnd tail below %.1e at N = %d", tail, n)
            return n
    raise PsstsParameterError("tail", tail, f"tail not reached within n <= {n_limit}")


def p_function(params: StateParams, point: PointLike, coeffs: Optional[DerivedCoeffs] = None):
    """
    Glauber-Sudarshan P-function, density with respect to d²alpha/pi.

    Raises:
        NonRegularPError: outside D > 0 and (2nbar+1)exp(-2r) > 1
    """
    coeffs = coeffs or derive(params)
    s = 2.0 * params.nbar + 1.0
    if not (coeffs.D > 0.0 and s * math.exp(-2.0 * params.r) > 1.0):
        raise NonRegularPError(params.nbar, params.r)
    alpha = _alpha(point)
    mod_sq = np.abs(alpha) ** 2
    exponent = (-coeffs.B * mod_sq + 2.0 * coeffs.A * np.real(alpha * alpha)) / coeffs.D
    p0 = np.exp(exponent) / math.sqrt(coeffs.D)
    return _finish(mod_sq ** params.m * p0 / _cm(coeffs, params.m))


def q_function(params: StateParams, point: PointLike, coeffs: Optional[DerivedCoeffs] = None):
    """
    Husimi function <alpha|rho|alpha>/pi.
    """
    coeffs = coeffs or derive(params)
    alpha = _alpha(point)
    mod_sq = np.abs(alpha) ** 2
    m = params.m
    q0 = np.exp((coeffs.A1 - 1.0) * mod_sq + 2.0 * coeffs.A2 * np.real(alpha * alpha)) / (math.pi * coeffs.tau1_tau2)
    if m == 0:
        return _finish(q0)
    if not params.is_squeezed:
        # thermal branch: the coherent-state average of a^m rho_th a†^m
        nbar = params.nbar
        ratio = nbar / (nbar + 1.0)
        value = np.exp(-mod_sq / (nbar + 1.0)) * laguerre(m, -ratio * mod_sq) / (math.pi * (nbar + 1.0) ** (m + 1))
        return _finish(value)
    M, O = coeffs.M, coeffs.O
    z = -1j * math.sqrt(M) * (O * np.conj(alpha) + alpha)
    log_m = gammaln(m + 1)
    total = np.zeros(np.shape(alpha), dtype=float)
    for l in range(m + 1):
        coef = math.exp(2 * log_m - gammaln(l + 1) - 2 * gammaln(m - l + 1)) * M ** m * (2.0 * O) ** l
        total = total + coef * np.abs(hermite(m - l, z)) ** 2
    return _finish(q0 * total / _cm(coeffs, m))


def _wigner_gaussian(params: StateParams, coeffs: DerivedCoeffs, alpha):
    s = 2.0 * params.nbar + 1.0
    mod_sq = np.abs(alpha) ** 2
    return np.exp(-2.0 * coeffs.g0 * mod_sq + 2.0 * coeffs.g2 * np.real(alpha * alpha)) / (math.pi * s)


def wigner(params: StateParams, point: PointLike, coeffs: Optional[DerivedCoeffs] = None):
    """
    Wigner function W = F_m * W_0 with the Hermite sum in the complex argument beta.

    r = 0 is routed to the Laguerre form of the photon-subtracted thermal state.
    """
    coeffs = coeffs or derive(params)
    alpha = _alpha(point)
    m = params.m
    w0 = _wigner_gaussian(params, coeffs, alpha)
    if m == 0:
        return _finish(w0)
    s = 2.0 * params.nbar + 1.0
    if not params.is_squeezed:
        nbar = params.nbar
        mod_sq = np.abs(alpha) ** 2
        value = w0 * laguerre(m, -4.0 * nbar * mod_sq / s) / s ** m
        return _finish(value)

    sinh_2r = math.sinh(2.0 * params.r)
    gap = params.nbar - math.sinh(params.r) ** 2
    beta = (2.0 * np.conj(alpha) * gap + alpha * sinh_2r) / (1j * math.sqrt(s * sinh_2r))
    log_m = gammaln(m + 1)
    scale = (sinh_2r / (4.0 * s)) ** m / _cm(coeffs, m)
    total = np.zeros(np.shape(alpha), dtype=complex)
    magnitude = np.zeros(np.shape(alpha), dtype=float)
    for l in range(m + 1):
        coef = math.exp(2 * log_m - gammaln(l + 1) - 2 * gammaln(m - l + 1)) * (4.0 * gap / sinh_2r) ** l
        h = hermite(m - l, beta)
        term = coef * h * hermite(m - l, np.conj(beta))
        total = total + term
        magnitude = magnitude + np.abs(term)
    f_m = scale * _discard_imag(total, magnitude)
    return _finish(w0 * f_m)


def wigner_single_subtraction(params: StateParams, point: PointLike):
    """
    Dedicated m = 1 Wigner function.
    """
    if params.m != 1:
        raise PsstsParameterError("m", params.m, "single-subtraction formula needs m = 1")
    coeffs = derive(params)
    alpha = _alpha(point)
    s = 2.0 * params.nbar + 1.0
    sinh_2r = math.sinh(2.0 * params.r)
    gap = params.nbar - math.sinh(params.r) ** 2
    f_1 = (np.abs(2.0 * np.conj(alpha) * gap + alpha * sinh_2r) ** 2 / s ** 2 + gap / s) / coeffs.B
    return _finish(_wigner_gaussian(params, coeffs, alpha) * f_1)


def wigner_generating(params: StateParams, point: PointLike):
    """
    Wigner function from the Gaussian generating function
    exp[x k + x* s + g2/4 (k² + s²) + g1 k s], x = 2 g1 alpha + g2 alpha*.
    """
    coeffs = derive(params)
    alpha = _alpha(point)
    x = 2.0 * coeffs.g1 * alpha + coeffs.g2 * np.conj(alpha)
    f_m = hermite_pair_sum(params.m, x, coeffs.g2 / 4.0, coeffs.g1) / _cm(coeffs, params.m)
    return _finish(_wigner_gaussian(params, coeffs, alpha) * f_m)


def evaluate(params: StateParams, point: PointLike, kind: QuasiProbKind) -> QuasiProbValue:
    if np.ndim(_alpha(point)) != 0:
        raise PsstsParameterError("point", point, "evaluate takes a single phase-space point")
    fn = {
        QuasiProbKind.WIGNER: wigner,
        QuasiProbKind.HUSIMI: q_function,
        QuasiProbKind.GLAUBER_P: p_function,
    }[kind]
    return QuasiProbValue(value=fn(params, point), kind=kind)


def fidelity(params: StateParams, coeffs: Optional[DerivedCoeffs] = None) -> float:
    """
    Fidelity tr(rho_s rho)/tr(rho_s²) with the squeezed thermal state before subtraction.
    """
    coeffs = coeffs or derive(params)
    m = params.m
    numerator = legendre_gap_sum(m, coeffs.B1, 4.0 * coeffs.B2prime ** 2)
    denominator = legendre_gap_sum(m, coeffs.B, 4.0 * coeffs.A ** 2)
    return numerator / denominator


def fidelity_single_subtraction(nbar: float, r: float) -> float:
    cosh_2r = math.cosh(2.0 * r)
    return nbar * (nbar + 1.0) * cosh_2r / ((2.0 * nbar + 1.0) * (math.sinh(r) ** 2 + nbar * cosh_2r))


def evaluate_grid(fn: Callable, q: np.ndarray, p: np.ndarray, workers: int = 1) -> np.ndarray:
    """
    Evaluate fn(alpha_row) over the mesh alpha = (q + ip)/sqrt(2); result[i_p, i_q].
    """
    qq, pp = np.meshgrid(q, p)
    alpha = alpha_from_qp(qq, pp)
    if workers <= 1:
        return np.asarray(fn(alpha), dtype=float)
    with ThreadPool(processes=workers) as pool:
        rows = pool.map(fn, list(alpha))
    return np.asarray(rows, dtype=float)


def grid_quadrature(values: np.ndarray, q: np.ndarray, p: np.ndarray) -> float:
    # d²alpha = dq dp / 2
    return 0.5 * float(trapezoid(trapezoid(values, q, axis=1), p))


def negative_volume(values: np.ndarray, q: np.ndarray, p: np.ndarray) -> float:
    return grid_quadrature(np.where(values < 0.0, -values, 0.0), q, p)


class ClosedFormClient(object):
    def __init__(self, params: StateParams):
        self._params = params
        self._coeffs: Optional[DerivedCoeffs] = None

    @property
    def params(self) -> StateParams:
        return self._params

    @property
    def coeffs(self) -> DerivedCoeffs:
        if self._coeffs is None:
            self._coeffs = derive(self._params)
        return self._coeffs

    def normalization_cm(self) -> float:
        return normalization_cm(self._params, self.coeffs)

    def mean_photon(self) -> float:
        return mean_photon(self._params, self.coeffs)

    def second_moment(self) -> float:
        return second_moment(self._params, self.coeffs)

    def mandel_q(self) -> MandelQ:
        return mandel_q_report(self._params, self.coeffs)

    def pnd(self, n_max: int) -> np.ndarray:
        return pnd_vector(self._params, n_max, self.coeffs)

    def p_function(self, point: PointLike):
        return p_function(self._params, point, self.coeffs)

    def q_function(self, point: PointLike):
        return q_function(self._params, point, self.coeffs)

    def wigner(self, point: PointLike, channel: Optional["ChannelParams"] = None):
        if channel is None or channel.kappa_t <= KAPPA_T_EPS:
            return wigner(self._params, point, self.coeffs)
        from psstspy.closedform.evolved import wigner_evolved

        return wigner_evolved(self._params, channel, point)

    def threshold_time(self, Nth: float = 0.0) -> Optional[float]:
        from psstspy.closedform.evolved import threshold_time

        return threshold_time(self._params, Nth)

    def fidelity(self) -> float:
        return fidelity(self._params, self.coeffs)


__all__ = [
    "PhasePoint",
    "QuasiProbValue",
    "MandelQ",
    "normalization_cm",
    "mean_photon",
    "second_moment",
    "mandel_q",
    "mandel_q_report",
    "pnd",
    "pnd_vector",
    "pnd_tail_cutoff",
    "squeezed_thermal_pnd",
    "p_function",
    "q_function",
    "wigner",
    "wigner_single_subtraction",
    "wigner_generating",
    "evaluate",
    "fidelity",
    "fidelity_single_subtraction",
    "evaluate_grid",
    "grid_quadrature",
    "negative_volume",
    "ClosedFormClient",
]
