import math
from typing import Optional

import numpy as np
from pydantic import Field, model_validator

from psstspy.config import KAPPA_T_EPS, R_MAX, R_ZERO_THRESHOLD
from psstspy.exception import PsstsParameterError
from psstspy.model import PsstsModel


class StateParams(PsstsModel):
    # mean photon number of the thermal field before squeezing
    nbar: float = Field(ge=0.0)
    # squeezing parameter of S(r) = exp[r(a†² - a²)/2]
    r: float = Field(ge=0.0, le=R_MAX)
    # number of subtracted photons
    m: int = Field(ge=0)

    @model_validator(mode="after")
    def _reject_vacuum_subtraction(self) -> "StateParams":
        if self.nbar == 0.0 and self.r < R_ZERO_THRESHOLD and self.m > 0:
            raise ValueError("photon subtraction from the vacuum gives the null vector (C_m = 0)")
        return self

    @staticmethod
    def from_sigma(sigma: float, r: float, m: int) -> "StateParams":
        """
        Thermal state e^{sigma a†a} with sigma = -hbar*omega/(k*T) < 0, nbar = 1/(e^{-sigma} - 1).
        """
        if not sigma < 0:
            raise PsstsParameterError("sigma", sigma, "sigma = -hbar*omega/kT must be negative")
        return StateParams(nbar=1.0 / math.expm1(-sigma), r=r, m=m)

    @property
    def is_squeezed(self) -> bool:
        return self.r >= R_ZERO_THRESHOLD

    def shifted(self, dm: int) -> "StateParams":
        return StateParams(nbar=self.nbar, r=self.r, m=self.m + dm)


class ChannelParams(PsstsModel):
    # dimensionless decay time kappa*t
    kappa_t: float = Field(ge=0.0)
    # mean photon number of the environment
    Nth: float = Field(default=0.0, ge=0.0)


class DerivedCoeffs(PsstsModel):
    tau1_sq: float
    tau2_sq: float
    A1: float
    A2: float
    E: float
    A: float
    B: float
    D: float
    g0: float
    g1: float
    g2: float
    M: float
    O: Optional[float] = None
    B1: float
    B2: float
    B2prime: float

    @property
    def tau1(self) -> float:
        return math.sqrt(self.tau1_sq)

    @property
    def tau2(self) -> float:
        return math.sqrt(self.tau2_sq)

    @property
    def tau1_tau2(self) -> float:
        return math.sqrt(self.tau1_sq * self.tau2_sq)


class EvolvedCoeffs(PsstsModel):
    T_decay: float
    decay: float
    g3: float
    G: float
    Delta1: float
    Delta2: float
    chi: float
    omega_scale: float
    Nth: float

    def omega(self, zeta):
        """
        Linear map zeta -> 2e^{-kt}/(2 Nth T + 1) * (chi*zeta + 2*Delta1*conj(zeta)).
        """
        zeta = np.asarray(zeta, dtype=complex)
        value = self.omega_scale * (self.chi * zeta + 2.0 * self.Delta1 * np.conj(zeta))
        return complex(value) if value.ndim == 0 else value


def derive(params: StateParams) -> DerivedCoeffs:
    nbar, r = params.nbar, params.r
    s = 2.0 * nbar + 1.0
    sinh_r_sq = math.sinh(r) ** 2
    cosh_2r = math.cosh(2.0 * r)
    sinh_2r = math.sinh(2.0 * r)

    tau1_sq = 0.5 * (s * math.exp(2.0 * r) + 1.0)
    tau2_sq = 0.5 * (s * math.exp(-2.0 * r) + 1.0)
    tau_prod = tau1_sq * tau2_sq

    A = s * sinh_2r / 4.0
    # (s cosh2r - 1)/2 written without the cancellation at small r
    B = nbar * cosh_2r + sinh_r_sq
    D = nbar * nbar - s * sinh_r_sq

    A1 = nbar * (nbar + 1.0) / tau_prod
    A2 = (tau1_sq - tau2_sq) / (4.0 * tau_prod)
    E = D / tau_prod

    g0 = cosh_2r / s
    g1 = (nbar - sinh_r_sq) / s
    g2 = sinh_2r / s

    M = s * sinh_2r / (4.0 * tau_prod)
    O = 2.0 * nbar * (nbar + 1.0) / (s * sinh_2r) if params.is_squeezed else None

    B1 = nbar * (nbar + 1.0) * cosh_2r / s
    B2prime = (2.0 * nbar * nbar + 2.0 * nbar + 1.0) * sinh_2r / (4.0 * s)
    B2 = (nbar * (nbar + 1.0) / s) ** 2 - (math.sinh(r) * math.cosh(r)) ** 2

    return DerivedCoeffs(
        tau1_sq=tau1_sq,
        tau2_sq=tau2_sq,
        A1=A1,
        A2=A2,
        E=E,
        A=A,
        B=B,
        D=D,
        g0=g0,
        g1=g1,
        g2=g2,
        M=M,
        O=O,
        B1=B1,
        B2=B2,
        B2prime=B2prime,
    )


def derive_evolved(params: StateParams, channel: ChannelParams) -> EvolvedCoeffs:
    """
    Time-dependent coefficients of the Wigner function after the thermal channel.

    Raises:
        PsstsParameterError: kappa_t below KAPPA_T_EPS, where g3 diverges like 1/T
    """
    if channel.kappa_t < KAPPA_T_EPS:
        raise PsstsParameterError("kappa_t", channel.kappa_t, "use unevolved evaluator")
    coeffs = derive(params)
    s = 2.0 * params.nbar + 1.0
    s_env = 2.0 * channel.Nth + 1.0
    decay = math.exp(-channel.kappa_t)
    T = -math.expm1(-2.0 * channel.kappa_t)

    g3 = 2.0 * decay / (s_env * T)
    h = coeffs.g0 + 0.5 * g3 * decay
    G = h * h - coeffs.g2 * coeffs.g2
    lift = 1.0 + 0.5 * g3 * decay

    Delta1 = coeffs.g2 * lift * lift / (4.0 * G)
    # 2/((2Nth+1)T) - g3^2 h/(2G), rearranged to avoid cancellation as t -> 0
    Delta2 = 2.0 / (s_env * T) * (h * coeffs.g0 - coeffs.g2 * coeffs.g2) / G
    # g0 - 1/(2nbar+1)^2 = 2B/(2nbar+1)^2
    chi = lift * (2.0 * coeffs.B / (s * s) + coeffs.g1 * g3 * decay) / (2.0 * G)
    omega_scale = 2.0 * decay / (2.0 * channel.Nth * T + 1.0)

    return EvolvedCoeffs(
        T_decay=T,
        decay=decay,
        g3=g3,
        G=G,
        Delta1=Delta1,
        Delta2=Delta2,
        chi=chi,
        omega_scale=omega_scale,
        Nth=channel.Nth,
    )


__all__ = [
    "StateParams",
    "ChannelParams",
    "DerivedCoeffs",
    "EvolvedCoeffs",
    "derive",
    "derive_evolved",
]
