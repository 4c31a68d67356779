"""
Brute-force reference for every closed-form quantity.

States and dynamics are built directly as matrices in a truncated number
basis; nothing here shares a code path with ``psstspy.closedform``.
"""
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator
from scipy.integrate import trapezoid
from scipy.linalg import expm
from scipy.special import erfc

from psstspy.config import (
    CONVOLUTION_TAIL_TOL,
    EIGEN_FLOOR,
    HERMITIAN_TOL,
    IMAG_RESIDUE_TOL,
    MASTER_DT,
    MASTER_HALVING_TOL,
    MASTER_MAX_HALVINGS,
    MASTER_TRACE_TOL,
    ORACLE_GROWTH,
    ORACLE_INITIAL_DIM_FACTOR,
    ORACLE_MAX_DIM,
    ORACLE_MIN_DIM,
    ORACLE_TOLERANCE,
    PARITY_BATCH,
    PURITY_TOL,
    SQUEEZE_PAD_FACTOR,
    THERMAL_SUPPORT_EPS,
    UNITARITY_TOL,
)
from psstspy.exception import (
    DisplacementOutOfRangeError,
    GridTooSmallError,
    MaxDimExceededError,
    PsstsOracleError,
    PsstsParameterError,
    StepSizeTooCoarseError,
    UnitarityLossError,
)
from psstspy.log import log_debug
from psstspy.model import PsstsModel
from psstspy.states import ChannelParams, StateParams
from psstspy.util import alpha_from_qp, trace_distance


class FockDensityMatrix(PsstsModel):
    dim: int = Field(ge=1)
    entries: np.ndarray
    # 1 - trace before renormalisation
    trace_deficit: float = 0.0

    @field_validator("entries")
    @classmethod
    def _square(cls, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=complex)
        if value.ndim != 2 or value.shape[0] != value.shape[1]:
            raise ValueError("entries must be a square matrix")
        return value

    @model_validator(mode="after")
    def _dim_matches(self) -> "FockDensityMatrix":
        if self.entries.shape[0] != self.dim:
            raise ValueError(f"entries are {self.entries.shape}, dim is {self.dim}")
        return self

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def min_eigenvalue(self) -> float:
        hermitian = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(hermitian)[0])

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    def padded(self, dim: int) -> "FockDensityMatrix":
        """
        Same state embedded in a larger basis (zero rows and columns appended).
        """
        if dim <= self.dim:
            return self
        entries = np.zeros((dim, dim), dtype=complex)
        entries[: self.dim, : self.dim] = self.entries
        return FockDensityMatrix(dim=dim, entries=entries, trace_deficit=self.trace_deficit)

    def check_physical(self) -> "FockDensityMatrix":
        asym = float(np.max(np.abs(self.entries - self.entries.conj().T)))
        if asym > HERMITIAN_TOL:
            raise PsstsOracleError(f"density matrix not Hermitian, deviation: {asym:.3e}", [self.dim])
        lowest = self.min_eigenvalue()
        if lowest < EIGEN_FLOOR:
            raise PsstsOracleError(f"density matrix has eigenvalue {lowest:.3e}", [self.dim])
        purity = self.purity()
        if purity > 1.0 + 1e-10:
            raise PsstsOracleError(f"purity {purity:.12f} exceeds 1", [self.dim])
        return self


class TruncationPolicy(PsstsModel):
    initial_dim: int = Field(ge=2)
    growth_factor: float = Field(default=ORACLE_GROWTH, gt=1.0)
    tolerance: float = Field(default=ORACLE_TOLERANCE, gt=0.0)
    max_dim: int = Field(default=ORACLE_MAX_DIM, ge=2, le=ORACLE_MAX_DIM)

    @staticmethod
    def heuristic_floor(params: StateParams) -> int:
        floor = ORACLE_INITIAL_DIM_FACTOR * (params.nbar + 1.0) * (params.m + 1) * math.exp(2.0 * params.r)
        return max(ORACLE_MIN_DIM, int(math.ceil(floor)))

    @staticmethod
    def for_params(params: StateParams, max_dim: int = ORACLE_MAX_DIM, **kwargs) -> "TruncationPolicy":
        return TruncationPolicy(initial_dim=TruncationPolicy.heuristic_floor(params), max_dim=max_dim, **kwargs)

    def next_dim(self, dim: int) -> int:
        return min(max(dim + 1, int(math.ceil(dim * self.growth_factor))), self.max_dim)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def thermal_support(nbar: float, eps: float = THERMAL_SUPPORT_EPS) -> int:
    """
    Number of levels carrying thermal weight above eps.
    """
    if nbar == 0.0:
        return 1
    ratio = nbar / (nbar + 1.0)
    return int(math.ceil(math.log(eps * (nbar + 1.0)) / math.log(ratio))) + 1


def build_thermal(nbar: float, dim: int) -> FockDensityMatrix:
    if dim < 2:
        raise PsstsParameterError("dim", dim, "truncation needs at least 2 levels")
    n = np.arange(dim)
    if nbar == 0.0:
        weights = (n == 0).astype(float)
    else:
        weights = nbar ** n / (nbar + 1.0) ** (n + 1)
    deficit = 0.0 if nbar == 0.0 else (nbar / (nbar + 1.0)) ** dim
    return FockDensityMatrix(dim=dim, entries=np.diag(weights).astype(complex), trace_deficit=deficit)


def build_squeeze(r: float, dim: int, check_dim: Optional[int] = None) -> np.ndarray:
    """
    S(r) = exp[r(a†² - a²)/2] on dim levels.

    The exponential is taken on a basis padded by SQUEEZE_PAD_FACTOR and cropped.
    The columns of the first check_dim levels (default dim // 2) must stay
    orthonormal to UNITARITY_TOL.

    Raises:
        UnitarityLossError: the check block leaks out of the dim window
    """
    if dim < 2:
        raise PsstsParameterError("dim", dim, "truncation needs at least 2 levels")
    if r == 0.0:
        return np.eye(dim, dtype=complex)
    pad = int(math.ceil(SQUEEZE_PAD_FACTOR * dim))
    a = annihilation(pad)
    generator = 0.5 * r * (a.T @ a.T - a @ a)
    squeeze = expm(generator)[:dim, :dim].astype(complex)
    check_dim = max(1, min(dim, dim // 2 if check_dim is None else check_dim))
    block = squeeze[:, :check_dim]
    defect = float(np.linalg.norm(block.conj().T @ block - np.eye(check_dim), ord=2))
    if defect > UNITARITY_TOL:
        raise UnitarityLossError(defect, dim)
    return squeeze


def _squeezed_thermal_entries(nbar: float, r: float, dim: int) -> Tuple[np.ndarray, float]:
    thermal = build_thermal(nbar, dim)
    support = min(dim, thermal_support(nbar))
    # only levels with weight above UNITARITY_TOL need an orthonormal image
    check_dim = min(dim, thermal_support(nbar, UNITARITY_TOL))
    squeeze = build_squeeze(r, dim, check_dim=check_dim)[:, :support]
    rho_c = thermal.entries[:support, :support]
    return squeeze @ rho_c @ squeeze.conj().T, thermal.trace_deficit


def squeezed_thermal(nbar: float, r: float, dim: int) -> FockDensityMatrix:
    entries, deficit = _squeezed_thermal_entries(nbar, r, dim)
    return FockDensityMatrix(dim=dim, entries=entries, trace_deficit=deficit)


def _pssts_at(params: StateParams, dim: int) -> Tuple[FockDensityMatrix, FockDensityMatrix, float]:
    rho_s, deficit = _squeezed_thermal_entries(params.nbar, params.r, dim)
    a = annihilation(dim)
    subtracted = rho_s
    for _ in range(params.m):
        subtracted = a @ subtracted @ a.T
    cm_estimate = float(np.real(np.trace(subtracted)))
    squeezed = FockDensityMatrix(dim=dim, entries=rho_s, trace_deficit=1.0 - float(np.real(np.trace(rho_s))))
    state = FockDensityMatrix(dim=dim, entries=subtracted / cm_estimate, trace_deficit=deficit)
    return state, squeezed, cm_estimate


def _converge(params: StateParams, policy: TruncationPolicy):
    dim = policy.initial_dim
    dim_trace: List[int] = []
    previous: Optional[float] = None
    while True:
        if dim > policy.max_dim:
            raise MaxDimExceededError(policy.max_dim, dim_trace + [dim])
        if dim_trace and dim == dim_trace[-1]:
            raise MaxDimExceededError(policy.max_dim, dim_trace)
        dim_trace.append(dim)
        try:
            state, squeezed, cm_estimate = _pssts_at(params, dim)
        except UnitarityLossError as e:
            log_debug("dim %d: %s, growing", dim, e.msg)
            dim = policy.next_dim(dim)
            continue
        if previous is not None and abs(cm_estimate - previous) <= policy.tolerance * abs(cm_estimate):
            log_debug("truncation converged at dim %d, trace %s", dim, dim_trace)
            return state, squeezed, cm_estimate, dim_trace
        previous = cm_estimate
        dim = policy.next_dim(dim)


def build_pssts(params: StateParams, policy: Optional[TruncationPolicy] = None) -> Tuple[FockDensityMatrix, float]:
    """
    rho = a^m rho_s a†^m / C_m by explicit matrix products.

    Returns:
        the normalised state and the pre-normalisation trace (the C_m estimate)

    Raises:
        MaxDimExceededError: C_m still moving at policy.max_dim
    """
    policy = policy or TruncationPolicy.for_params(params)
    state, _, cm_estimate, _ = _converge(params, policy)
    return state, cm_estimate


def observable_moments(state: FockDensityMatrix) -> Tuple[float, float, np.ndarray]:
    """
    (tr rho a†a, tr rho a†²a², diagonal).
    """
    probs = state.diagonal()
    n = np.arange(state.dim, dtype=float)
    return float(np.sum(n * probs)), float(np.sum(n * (n - 1.0) * probs)), probs


def displacement_matrix(beta, dim: int) -> np.ndarray:
    """
    <j|D(beta)|n> for j, n < dim, stacked over the shape of beta.

    Built column by column from sqrt(n) D[j, n] = sqrt(j) D[j-1, n-1] - beta* D[j, n-1]
    starting at the coherent amplitudes D[:, 0].
    """
    beta = np.asarray(beta, dtype=complex)
    out = np.zeros(beta.shape + (dim, dim), dtype=complex)
    out[..., :, 0] = coherent_amplitudes(beta, dim)
    root = np.sqrt(np.arange(dim, dtype=float))
    conj = np.conj(beta)[..., None]
    for n in range(1, dim):
        column = -conj * out[..., :, n - 1]
        column[..., 1:] += root[1:] * out[..., :-1, n - 1]
        out[..., :, n] = column / root[n]
    return out


def wigner_displaced_parity(state: FockDensityMatrix, point):
    """
    (1/pi) tr[rho D(alpha) P D†(alpha)] with P the parity operator.

    D(alpha) P D†(alpha) = D(2 alpha) P, and the elements of D(2 alpha) between
    retained levels are exact, so the sum runs over the state's own basis.
    point may be an array; values come back in its shape.

    Raises:
        DisplacementOutOfRangeError: |alpha| > sqrt(dim)/2
    """
    alpha = np.asarray(point, dtype=complex)
    flat = alpha.ravel()
    if flat.size:
        widest = flat[int(np.argmax(np.abs(flat)))]
        if abs(widest) > 0.5 * math.sqrt(state.dim):
            raise DisplacementOutOfRangeError(complex(widest), state.dim)
    # parity is diagonal, (-1)^j on the column index of rho^T
    weighted = state.entries.T * ((-1.0) ** np.arange(state.dim))[None, :]
    values = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, PARITY_BATCH):
        chunk = flat[start : start + PARITY_BATCH]
        values[start : start + chunk.size] = np.einsum("nj,knj->k", weighted, displacement_matrix(2.0 * chunk, state.dim))
    values /= math.pi
    residue = float(np.max(np.abs(values.imag), initial=0.0))
    if residue > IMAG_RESIDUE_TOL:
        raise PsstsOracleError(f"parity expectation has imaginary part {residue:.3e}", [state.dim])
    if alpha.ndim == 0:
        return float(values[0].real)
    return values.real.reshape(alpha.shape)


def coherent_amplitudes(alpha, dim: int) -> np.ndarray:
    """
    <n|alpha> for n < dim, along the last axis.
    """
    alpha = np.asarray(alpha, dtype=complex)
    amps = np.empty(alpha.shape + (dim,), dtype=complex)
    amps[..., 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for n in range(1, dim):
        amps[..., n] = amps[..., n - 1] * alpha / math.sqrt(n)
    return amps


def husimi(state: FockDensityMatrix, point):
    """
    <alpha|rho|alpha>/pi from explicit coherent amplitudes.
    """
    amps = coherent_amplitudes(point, state.dim)
    value = np.real(np.einsum("...i,ij,...j->...", amps.conj(), state.entries, amps)) / math.pi
    return float(value) if np.ndim(value) == 0 else value


def _liouvillian(rho: np.ndarray, a: np.ndarray, ad: np.ndarray, n_op: np.ndarray, m_op: np.ndarray, Nth: float):
    loss = 2.0 * a @ rho @ ad - n_op @ rho - rho @ n_op
    if Nth == 0.0:
        return (Nth + 1.0) * loss
    gain = 2.0 * ad @ rho @ a - m_op @ rho - rho @ m_op
    return (Nth + 1.0) * loss + Nth * gain


def rk4_step(rho: np.ndarray, fun, dt: float, *args) -> np.ndarray:
    """
    One Runge-Kutta 4 step of d rho/dt = fun(rho).
    """
    dt2 = dt / 2.0
    k1 = fun(rho, *args)
    k2 = fun(rho + k1 * dt2, *args)
    k3 = fun(rho + k2 * dt2, *args)
    k4 = fun(rho + k3 * dt, *args)
    rho = rho + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0 * dt
    return 0.5 * (rho + rho.conj().T)


def _integrate(rho0: np.ndarray, t_end: float, dt: float, Nth: float) -> np.ndarray:
    dim = rho0.shape[0]
    a = annihilation(dim).astype(complex)
    ad = a.conj().T
    n_op = ad @ a
    m_op = a @ ad
    steps = max(1, int(math.ceil(t_end / dt)))
    h = t_end / steps
    rho = rho0.copy()
    for _ in range(steps):
        rho = rk4_step(rho, _liouvillian, h, a, ad, n_op, m_op, Nth)
    return rho


def evolve_master(
    state: FockDensityMatrix, channel: ChannelParams, dt: Optional[float] = None
) -> FockDensityMatrix:
    """
    Integrate the thermal-loss master equation (time in units of 1/kappa) up to channel.kappa_t.

    For Nth > 0 the basis is padded by the thermal support of Nth. The step is
    halved until two successive step sizes agree in trace distance.

    Raises:
        StepSizeTooCoarseError: no agreement after MASTER_MAX_HALVINGS halvings
    """
    t_end = channel.kappa_t
    if t_end == 0.0:
        return state
    Nth = channel.Nth
    work = state.padded(state.dim + thermal_support(Nth) - 1) if Nth > 0.0 else state
    dim = work.dim
    dt = dt or min(MASTER_DT, 1.0 / (2.0 * (2.0 * Nth + 1.0) * dim))
    coarse = _integrate(work.entries, t_end, dt, Nth)
    for halving in range(MASTER_MAX_HALVINGS):
        fine = _integrate(work.entries, t_end, dt / 2.0, Nth)
        distance = trace_distance(coarse, fine)
        log_debug("master equation dt %.3e vs %.3e: trace distance %.3e", dt, dt / 2.0, distance)
        dt /= 2.0
        if distance < MASTER_HALVING_TOL:
            drift = abs(np.real(np.trace(fine)) - np.real(np.trace(work.entries)))
            if drift > MASTER_TRACE_TOL:
                raise PsstsOracleError(f"master equation lost trace {drift:.3e}", [dim])
            return FockDensityMatrix(dim=dim, entries=fine, trace_deficit=work.trace_deficit)
        coarse = fine
    raise StepSizeTooCoarseError(dt, distance)


def kernel_tail_mass(zeta: complex, channel: ChannelParams, q: np.ndarray, p: np.ndarray) -> float:
    """
    Mass of the channel kernel, as a density in the initial point, outside the q-p box.
    """
    decay = math.exp(-channel.kappa_t)
    T = -math.expm1(-2.0 * channel.kappa_t)
    width = math.sqrt((2.0 * channel.Nth + 1.0) * T / 2.0) / decay
    q0, p0 = math.sqrt(2.0) * zeta.real / decay, math.sqrt(2.0) * zeta.imag / decay

    def outside(center, lo, hi):
        return 0.5 * erfc((hi - center) / (width * math.sqrt(2.0))) + 0.5 * erfc((center - lo) / (width * math.sqrt(2.0)))

    tail_q = outside(q0, q[0], q[-1])
    tail_p = outside(p0, p[0], p[-1])
    return 1.0 - (1.0 - tail_q) * (1.0 - tail_p)


def gaussian_convolution_wf(
    initial_wf_grid: Tuple[np.ndarray, np.ndarray, np.ndarray], channel: ChannelParams, point
) -> float:
    """
    W(zeta, t) = integral d²alpha W(alpha, 0) K(zeta - e^{-kt} alpha) over a tabulated initial WF.

    Args:
        initial_wf_grid: (values[i_p, i_q], q, p)
        channel: kappa*t > 0 and Nth
        point: zeta

    Raises:
        GridTooSmallError: kernel mass outside the grid and a non-negligible WF border
    """
    values, q, p = initial_wf_grid
    zeta = complex(point)
    decay = math.exp(-channel.kappa_t)
    T = -math.expm1(-2.0 * channel.kappa_t)
    spread = (2.0 * channel.Nth + 1.0) * T
    tail = kernel_tail_mass(zeta, channel, q, p)
    if tail > CONVOLUTION_TAIL_TOL:
        border = max(
            float(np.max(np.abs(values[0, :]))),
            float(np.max(np.abs(values[-1, :]))),
            float(np.max(np.abs(values[:, 0]))),
            float(np.max(np.abs(values[:, -1]))),
        )
        if border > CONVOLUTION_TAIL_TOL * float(np.max(np.abs(values))):
            raise GridTooSmallError(tail)
    qq, pp = np.meshgrid(q, p)
    alpha = alpha_from_qp(qq, pp)
    kernel = 2.0 / (math.pi * spread) * np.exp(-2.0 * np.abs(zeta - decay * alpha) ** 2 / spread)
    # d²alpha = dq dp / 2
    return 0.5 * float(trapezoid(trapezoid(values * kernel, q, axis=1), p))


def fidelity_oracle(params: StateParams, policy: Optional[TruncationPolicy] = None) -> float:
    """
    tr(rho_s rho)/tr(rho_s²) from explicit matrices.
    """
    policy = policy or TruncationPolicy.for_params(params)
    state, squeezed, _, _ = _converge(params, policy)
    return _fidelity(state, squeezed, params)


def _fidelity(state: FockDensityMatrix, squeezed: FockDensityMatrix, params: StateParams) -> float:
    purity = squeezed.purity()
    expected = 1.0 / (2.0 * params.nbar + 1.0)
    if abs(purity - expected) > PURITY_TOL:
        raise PsstsOracleError(f"tr(rho_s^2) = {purity:.12f}, expected {expected:.12f}", [squeezed.dim])
    overlap = float(np.real(np.trace(squeezed.entries @ state.entries)))
    return overlap / purity


class FockOracleClient(object):
    def __init__(self, params: StateParams, policy: Optional[TruncationPolicy] = None):
        self._params = params
        self._policy = policy or TruncationPolicy.for_params(params)
        self._state: Optional[FockDensityMatrix] = None
        self._squeezed: Optional[FockDensityMatrix] = None
        self._cm: Optional[float] = None
        self._dim_trace: List[int] = []
        self._evolved: Dict[Tuple[float, float], FockDensityMatrix] = {}

    @property
    def params(self) -> StateParams:
        return self._params

    @property
    def policy(self) -> TruncationPolicy:
        return self._policy

    @property
    def state(self) -> FockDensityMatrix:
        if self._state is None:
            self._state, self._squeezed, self._cm, self._dim_trace = _converge(self._params, self._policy)
            self._state.check_physical()
        return self._state

    @property
    def dim_trace(self) -> List[int]:
        _ = self.state
        return list(self._dim_trace)

    def normalization_cm(self) -> float:
        _ = self.state
        return self._cm

    def mean_photon(self) -> float:
        return observable_moments(self.state)[0]

    def second_moment(self) -> float:
        return observable_moments(self.state)[1]

    def mandel_q(self) -> float:
        mean, second, _ = observable_moments(self.state)
        if mean == 0.0:
            return 0.0
        return second / mean - mean

    def pnd(self, n_max: int) -> np.ndarray:
        probs = self.state.diagonal()
        out = np.zeros(n_max + 1)
        k = min(n_max + 1, probs.size)
        out[:k] = probs[:k]
        return out

    def q_function(self, point):
        return husimi(self.state, point)

    def evolved(self, channel: ChannelParams, dt: Optional[float] = None) -> FockDensityMatrix:
        key = (channel.kappa_t, channel.Nth)
        if key not in self._evolved:
            self._evolved[key] = evolve_master(self.state, channel, dt=dt)
        return self._evolved[key]

    def wigner(self, point, channel: Optional[ChannelParams] = None):
        """
        Displaced-parity Wigner value(s); the state is zero-padded to keep |alpha| in range.
        """
        state = self.state if channel is None or channel.kappa_t == 0.0 else self.evolved(channel)
        alpha = np.asarray(point, dtype=complex)
        need = int(math.ceil(4.0 * float(np.max(np.abs(alpha))) ** 2)) if alpha.size else 0
        return wigner_displaced_parity(state.padded(need), alpha)

    def fidelity(self) -> float:
        _ = self.state
        return _fidelity(self._state, self._squeezed, self._params)


__all__ = [
    "FockDensityMatrix",
    "TruncationPolicy",
    "build_thermal",
    "build_squeeze",
    "squeezed_thermal",
    "build_pssts",
    "observable_moments",
    "displacement_matrix",
    "wigner_displaced_parity",
    "husimi",
    "evolve_master",
    "gaussian_convolution_wf",
    "fidelity_oracle",
    "FockOracleClient",
]
