"""
Oracle-equivalence suite: every closed-form quantity against its Fock-space counterpart.
"""
import json
import math
import time
from datetime import datetime
from typing import Callable, List, Optional

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from psstspy import closedform
from psstspy.closedform.evolved import wigner_evolved
from psstspy.config import (
    COMPARE_ATOL,
    COMPARE_GRID,
    COMPARE_MAX_DIM,
    COMPARE_PND_N_MAX,
    COMPARE_RTOL,
    COMPARE_TRUNCATION_TOL,
    EVOLVED_ATOL,
    GRID_MAX_POINTS,
    KAPPA_T_EPS,
)
from psstspy.exception import ExitCode, PsstsOracleError
from psstspy.fockoracle import FockOracleClient, TruncationPolicy, gaussian_convolution_wf
from psstspy.log import log_info, log_warning
from psstspy.model import GridSpec, Ledger, PsstsModel
from psstspy.states import ChannelParams, StateParams
from psstspy.util import alpha_from_qp

# initial WF grid for the convolution path
CONVOLUTION_STEP = 0.04
CONVOLUTION_MIN_HALF_WIDTH = 8.0
EVOLVED_PROBES = [complex(alpha_from_qp(q, p)) for p in (-1.0, 0.0, 1.0) for q in (-1.0, 0.0, 1.0)]


class CheckResult(PsstsModel):
    index: int
    name: str
    max_abs: float
    max_rel: float
    passed: bool
    reason: Optional[str] = None
    elapsed_seconds: float = 0.0
    checked_at: str = ""


class CompareReport(PsstsModel):
    params: StateParams
    channel: Optional[ChannelParams] = None
    checks: List[CheckResult] = []
    dim_trace: List[int] = []
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(check.passed for check in self.checks)

    @property
    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    @property
    def exit_code(self) -> ExitCode:
        if self.error is not None:
            return ExitCode.TRUNCATION
        if self.failed:
            return ExitCode.TOLERANCE
        return ExitCode.OK

    def to_frame(self) -> pd.DataFrame:
        columns = ["index", "name", "max_abs", "max_rel", "passed", "reason"]
        rows = [check.model_dump(include=set(columns)) for check in self.checks]
        return pd.DataFrame(rows, columns=columns)

    def export_to_json(self, filename: str) -> bool:
        try:
            with open(filename, "w", encoding="utf-8") as f:
                json.dump(self.model_dump(mode="json"), f, ensure_ascii=False, indent=2)
            return True
        except OSError as e:
            log_warning("could not write %s: %s", filename, e)
            return False

    def render(self, console: Optional[Console] = None) -> None:
        console = console or Console(stderr=True)
        table = Table(title=f"oracle compare nbar={self.params.nbar} r={self.params.r} m={self.params.m}")
        table.add_column("#", justify="right")
        table.add_column("check")
        table.add_column("max abs", justify="right")
        table.add_column("max rel", justify="right")
        table.add_column("status")
        table.add_column("reason")
        for check in self.checks:
            table.add_row(
                str(check.index),
                check.name,
                f"{check.max_abs:.3e}",
                f"{check.max_rel:.3e}",
                "✅" if check.passed else "❌",
                check.reason or "",
            )
        console.print(table)
        if self.error is not None:
            console.print(f"❌ {self.error}, dim_trace: {self.dim_trace}")


def convolution_grid(params: StateParams) -> GridSpec:
    """
    Square q-p box whose border carries no initial WF weight above the convolution tail tolerance.
    """
    # widest quadrature variance of W_0 is (2nbar+1)e^{2r}/2; a^m adds a degree-2m polynomial
    sigma = math.sqrt((2.0 * params.nbar + 1.0) * math.exp(2.0 * params.r) / 2.0)
    half = max(CONVOLUTION_MIN_HALF_WIDTH, math.ceil(sigma * math.sqrt(2.0 * (23.0 + 2.0 * params.m)) + 1.0))
    n = min(int(round(2.0 * half / CONVOLUTION_STEP)) + 1, math.isqrt(GRID_MAX_POINTS))
    return GridSpec(q_min=-half, q_max=half, p_min=-half, p_max=half, nq=n, np=n)


def compare_policy(params: StateParams, max_dim: int = COMPARE_MAX_DIM) -> TruncationPolicy:
    """
    Truncation for the suite: capped at COMPARE_MAX_DIM and stopped once C_m moves less than
    COMPARE_TRUNCATION_TOL, well inside the comparison tolerance.
    """
    return TruncationPolicy.for_params(params, max_dim=max_dim, tolerance=COMPARE_TRUNCATION_TOL)


def within(closed, oracle, rtol: float = COMPARE_RTOL, atol: float = COMPARE_ATOL):
    """
    (max abs deviation, max relative deviation, passed) for |a - b| <= max(atol, rtol |b|).
    """
    closed = np.asarray(closed, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    diff = np.abs(closed - oracle)
    scale = np.abs(oracle)
    rel = diff / np.maximum(scale, max(atol, np.finfo(float).tiny))
    passed = bool(np.all(diff <= np.maximum(atol, rtol * scale)))
    return float(np.max(diff, initial=0.0)), float(np.max(rel, initial=0.0)), passed


class _Checker(object):
    def __init__(self):
        self.ledger: Ledger[CheckResult] = Ledger([])

    def run(self, name: str, compute: Callable, rtol: float = COMPARE_RTOL, atol: float = COMPARE_ATOL) -> None:
        start = time.perf_counter()
        closed, oracle = compute()
        max_abs, max_rel, passed = within(closed, oracle, rtol, atol)
        reason = None if passed else f"deviation exceeds max({atol:g}, {rtol:g}*|oracle|)"
        self.ledger.append(
            CheckResult(
                index=len(self.ledger) + 1,
                name=name,
                max_abs=max_abs,
                max_rel=max_rel,
                passed=passed,
                reason=reason,
                elapsed_seconds=time.perf_counter() - start,
                checked_at=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            )
        )
        log_info("%s %s: max abs %.3e", "✅" if passed else "❌", name, max_abs)


def run_compare(
    params: StateParams,
    channel: Optional[ChannelParams] = None,
    grid: Optional[GridSpec] = None,
    policy: Optional[TruncationPolicy] = None,
    dt: Optional[float] = None,
) -> CompareReport:
    """
    Run every closed-form vs oracle check for one parameter set.

    Oracle truncation failures end the run; they are returned in the report
    together with the dimension trace rather than raised.
    """
    grid = grid or GridSpec.from_tuple(COMPARE_GRID)
    oracle = FockOracleClient(params, policy or compare_policy(params))
    closed = closedform.ClosedFormClient(params)
    checker = _Checker()
    q, p = grid.axes()
    qq, pp = np.meshgrid(q, p)
    alpha = alpha_from_qp(qq, pp)
    try:
        checker.run("normalization C_m", lambda: (closed.normalization_cm(), oracle.normalization_cm()))
        checker.run("mean photon number", lambda: (closed.mean_photon(), oracle.mean_photon()))
        checker.run("second factorial moment", lambda: (closed.second_moment(), oracle.second_moment()))
        checker.run("Mandel Q", lambda: (closedform.mandel_q(params), oracle.mandel_q()))
        checker.run("photon-number distribution", lambda: (closed.pnd(COMPARE_PND_N_MAX), oracle.pnd(COMPARE_PND_N_MAX)))
        checker.run("Husimi function", lambda: (closed.q_function(alpha), oracle.q_function(alpha)))
        checker.run("Wigner function", lambda: (closed.wigner(alpha), oracle.wigner(alpha)))
        checker.run("fidelity", lambda: (closed.fidelity(), oracle.fidelity()))
        if channel is not None and channel.kappa_t > KAPPA_T_EPS:
            probes = np.asarray(EVOLVED_PROBES)
            oracle.evolved(channel, dt=dt)
            evolved = wigner_evolved(params, channel, probes)
            checker.run(
                "evolved Wigner vs master equation",
                lambda: (evolved, oracle.wigner(probes, channel=channel)),
                rtol=0.0,
                atol=EVOLVED_ATOL,
            )
            cq, cp = convolution_grid(params).axes()
            cqq, cpp = np.meshgrid(cq, cp)
            initial = closedform.wigner(params, alpha_from_qp(cqq, cpp))
            convolved = [gaussian_convolution_wf((initial, cq, cp), channel, zeta) for zeta in EVOLVED_PROBES]
            checker.run(
                "evolved Wigner vs Gaussian convolution",
                lambda: (evolved, convolved),
                rtol=0.0,
                atol=EVOLVED_ATOL,
            )
    except PsstsOracleError as e:
        log_warning("oracle failed for %s: %s", params, e)
        return CompareReport(params=params, channel=channel, checks=checker.ledger.data, dim_trace=e.dim_trace, error=str(e))
    return CompareReport(params=params, channel=channel, checks=checker.ledger.data, dim_trace=oracle.dim_trace)


__all__ = [
    "CheckResult",
    "CompareReport",
    "compare_policy",
    "convolution_grid",
    "within",
    "run_compare",
]
