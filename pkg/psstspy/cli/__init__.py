"""
Command line: reproducible tables and plot-ready grids.

    python -m psstspy wigner --nbar 0.1 --r 0.5 --m 1 --grid=-3,3,-3,3,101,101 --out w.csv
    python -m psstspy threshold --nbar 0.05 --r 0.3
    python -m psstspy rerun w.csv --format json
"""
import argparse
import logging
import time
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from psstspy import closedform
from psstspy.cli.report import ParamsLoader, ResultEnvelope, ResultWriter
from psstspy.closedform.evolved import threshold_time
from psstspy.config import (
    COMPARE_MAX_DIM,
    DEFAULT_GRID,
    DEFAULT_M,
    DEFAULT_NBAR,
    DEFAULT_NTH,
    DEFAULT_PND_N_MAX,
    DEFAULT_R,
    FIDELITY_SWEEP_M_LIST,
    FIDELITY_SWEEP_NBAR,
    FIDELITY_SWEEP_R_RANGE,
    MANDEL_SWEEP_M_LIST,
    MANDEL_SWEEP_NBAR,
    MANDEL_SWEEP_R_RANGE,
    VERSION,
)
from psstspy.exception import ExitCode, PsstsError, PsstsOracleError
from psstspy.fockoracle.compare import compare_policy, run_compare
from psstspy.log import log_info, log_warning, logger, setup_logging
from psstspy.model import GridSpec, OutputFormat, QuasiProbKind
from psstspy.states import ChannelParams, StateParams
from psstspy.util import parse_floats, parse_ints

COMMANDS = ("pnd", "mandel-sweep", "wigner", "threshold", "fidelity-sweep", "oracle-compare")


def _state(request: Dict[str, Any]) -> StateParams:
    return StateParams(nbar=request["nbar"], r=request["r"], m=request["m"])


def _channel(request: Dict[str, Any]) -> Optional[ChannelParams]:
    if not request.get("kappa_t"):
        return None
    return ChannelParams(kappa_t=request["kappa_t"], Nth=request.get("nth", 0.0))


def _r_values(r_range: List[float]) -> np.ndarray:
    start, stop, num = r_range
    return np.linspace(float(start), float(stop), int(num))


def cmd_pnd(params: StateParams, n_max: int) -> ResultEnvelope:
    probs = closedform.pnd_vector(params, n_max)
    frame = pd.DataFrame({"n": np.arange(n_max + 1), "P": probs})
    summary = {
        "sum": float(np.sum(probs)),
        "mean_photon": closedform.mean_photon(params),
        "mode": int(np.argmax(probs)),
    }
    return ResultEnvelope.build({}, frame, summary)


def cmd_mandel_sweep(nbar: float, r_range: List[float], m_list: List[int]) -> ResultEnvelope:
    r_values = _r_values(r_range)
    frame = pd.DataFrame({"r": r_values})
    first_negative: Dict[str, Optional[float]] = {}
    for m in m_list:
        column = [closedform.mandel_q(StateParams(nbar=nbar, r=float(r), m=m)) for r in r_values]
        frame[f"Q_m{m}"] = column
        negative = [float(r) for r, q in zip(r_values, column) if q < 0.0]
        first_negative[str(m)] = negative[0] if negative else None
    summary = {"first_sub_poissonian_r": first_negative, "caveat": closedform.MANDEL_CAVEAT}
    return ResultEnvelope.build({}, frame, summary)


def cmd_wigner(
    params: StateParams,
    grid: GridSpec,
    channel: Optional[ChannelParams] = None,
    kind: QuasiProbKind = QuasiProbKind.WIGNER,
    workers: int = 1,
) -> ResultEnvelope:
    """
    Quasi-probability on a q-p grid (alpha = (q + ip)/sqrt(2)), with value summary.
    """
    client = closedform.ClosedFormClient(params)
    if kind == QuasiProbKind.WIGNER:
        fn = lambda alpha: client.wigner(alpha, channel)  # noqa: E731
    elif kind == QuasiProbKind.HUSIMI:
        fn = client.q_function
    else:
        fn = client.p_function
    q, p = grid.axes()
    values = closedform.evaluate_grid(fn, q, p, workers=workers)
    qq, pp = np.meshgrid(q, p)
    frame = pd.DataFrame({"q": qq.ravel(), "p": pp.ravel(), "value": values.ravel()})
    i_p, i_q = np.unravel_index(int(np.argmin(values)), values.shape)
    summary = {
        "min_value": float(values[i_p, i_q]),
        "argmin": {"q": float(q[i_q]), "p": float(p[i_p])},
        "max_value": float(np.max(values)),
        "negative_volume": closedform.negative_volume(values, q, p),
        "quadrature_total": closedform.grid_quadrature(values, q, p),
    }
    return ResultEnvelope.build({}, frame, summary)


def cmd_threshold(params: StateParams, Nth: float = 0.0) -> ResultEnvelope:
    value = threshold_time(params, Nth)
    shown = "none" if value is None else value
    frame = pd.DataFrame({"kappa_t": [shown]})
    return ResultEnvelope.build({}, frame, {"threshold": shown})


def cmd_fidelity_sweep(nbar: float, r_range: List[float], m_list: List[int]) -> ResultEnvelope:
    r_values = _r_values(r_range)
    frame = pd.DataFrame({"r": r_values})
    for m in m_list:
        frame[f"F_m{m}"] = [closedform.fidelity(StateParams(nbar=nbar, r=float(r), m=m)) for r in r_values]
    summary: Dict[str, Any] = {}
    if len(m_list) >= 2:
        a, b = m_list[-2], m_list[-1]
        summary["max_gap"] = {"m": [a, b], "value": float(np.max(np.abs(frame[f"F_m{a}"] - frame[f"F_m{b}"])))}
    return ResultEnvelope.build({}, frame, summary)


def cmd_oracle_compare(
    params: StateParams,
    channel: Optional[ChannelParams] = None,
    max_dim: int = COMPARE_MAX_DIM,
    dt: Optional[float] = None,
    report_path: Optional[str] = None,
) -> ResultEnvelope:
    report = run_compare(params, channel, policy=compare_policy(params, max_dim), dt=dt)
    report.render()
    if report_path and not report.export_to_json(report_path):
        log_warning("❌ oracle report not written to %s", report_path)
    summary = {
        "passed": report.passed,
        "exit_code": int(report.exit_code),
        "dim_trace": report.dim_trace,
        "error": report.error,
    }
    return ResultEnvelope.build({}, report.to_frame(), summary)


def run_command(request: Dict[str, Any]) -> ResultEnvelope:
    """
    Execute a request dict (the embedded params block of every output file).
    """
    start = time.perf_counter()
    command = request.get("command")
    if command == "pnd":
        envelope = cmd_pnd(_state(request), int(request.get("n_max", DEFAULT_PND_N_MAX)))
    elif command == "mandel-sweep":
        envelope = cmd_mandel_sweep(request["nbar"], request["r_range"], request["m_list"])
    elif command == "wigner":
        envelope = cmd_wigner(
            _state(request),
            GridSpec.parse(request["grid"]),
            _channel(request),
            QuasiProbKind(request.get("kind", QuasiProbKind.WIGNER.value)),
            int(request.get("workers", 1)),
        )
    elif command == "threshold":
        envelope = cmd_threshold(_state(request), request.get("nth", 0.0))
    elif command == "fidelity-sweep":
        envelope = cmd_fidelity_sweep(request["nbar"], request["r_range"], request["m_list"])
    elif command == "oracle-compare":
        envelope = cmd_oracle_compare(
            _state(request),
            _channel(request),
            int(request.get("max_dim", COMPARE_MAX_DIM)),
            request.get("dt"),
            request.get("report"),
        )
    else:
        raise ValueError(f"unknown command {command!r}, expected one of {COMMANDS}")
    elapsed = time.perf_counter() - start
    metadata = dict(envelope.metadata)
    metadata["run"] = dict(metadata["run"], elapsed_seconds=elapsed)
    return envelope.model_copy(update={"params": request, "metadata": metadata})


def cmd_rerun(path: str) -> ResultEnvelope:
    request = ParamsLoader().load_params(path)
    log_info("re-running %s from %s", request.get("command"), path)
    return run_command(request)


def _request_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    command = args.command
    request: Dict[str, Any] = {"command": command}
    if command in ("mandel-sweep", "fidelity-sweep"):
        sweep_nbar = MANDEL_SWEEP_NBAR if command == "mandel-sweep" else FIDELITY_SWEEP_NBAR
        sweep_r = MANDEL_SWEEP_R_RANGE if command == "mandel-sweep" else FIDELITY_SWEEP_R_RANGE
        sweep_m = MANDEL_SWEEP_M_LIST if command == "mandel-sweep" else FIDELITY_SWEEP_M_LIST
        request["nbar"] = sweep_nbar if args.nbar is None else args.nbar
        r_range = parse_floats(args.r_range) if args.r_range else list(sweep_r)
        if len(r_range) != 3:
            raise ValueError("--r-range needs start,stop,num")
        request["r_range"] = [r_range[0], r_range[1], int(r_range[2])]
        request["m_list"] = parse_ints(args.m_list) if args.m_list else list(sweep_m)
        return request
    request["nbar"] = DEFAULT_NBAR if args.nbar is None else args.nbar
    request["r"] = args.r
    request["m"] = args.m
    if command == "pnd":
        request["n_max"] = args.n_max
    if command == "wigner":
        request["grid"] = args.grid
        request["kind"] = args.kind
        request["workers"] = args.workers
    if command in ("wigner", "oracle-compare"):
        request["kappa_t"] = args.kappa_t
    if command in ("wigner", "threshold", "oracle-compare"):
        request["nth"] = args.nth
    if command == "oracle-compare":
        request["max_dim"] = args.max_dim
        request["dt"] = args.dt
        request["report"] = args.report
    return request


def _add_cli_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nbar", type=float, default=None, help="thermal mean photon number before squeezing")
    parser.add_argument("--r", type=float, default=DEFAULT_R, help="squeezing parameter")
    parser.add_argument("--m", type=int, default=DEFAULT_M, help="number of subtracted photons")
    parser.add_argument("--kappa-t", type=float, default=0.0, help="dimensionless decay time kappa*t")
    parser.add_argument("--nth", type=float, default=DEFAULT_NTH, help="environment mean photon number")
    parser.add_argument(
        "--grid",
        default=",".join(str(v) for v in DEFAULT_GRID),
        help="qmin,qmax,pmin,pmax,nq,np (use --grid=... for negative bounds)",
    )
    parser.add_argument("--kind", choices=[k.value for k in QuasiProbKind], default=QuasiProbKind.WIGNER.value)
    parser.add_argument("--n-max", type=int, default=DEFAULT_PND_N_MAX, help="largest photon number in the table")
    parser.add_argument("--r-range", default=None, help="start,stop,num for sweeps")
    parser.add_argument("--m-list", default=None, help="comma-separated m values for sweeps")
    parser.add_argument("--out", default=None, help="output file, stdout if omitted")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    parser.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")
    parser.add_argument("--max-dim", type=int, default=COMPARE_MAX_DIM, help="oracle truncation ceiling")
    parser.add_argument("--report", default=None, help="JSON file for the per-check oracle report with timings")
    parser.add_argument("--dt", type=float, default=None, help="initial master-equation step")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psstspy", description="photon-subtracted squeezed thermal states")
    parser.add_argument("--version", action="version", version=VERSION)
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_cli_arguments(commands.add_parser(name))
    rerun = commands.add_parser("rerun", help="re-run the params block embedded in an output file")
    rerun.add_argument("path")
    _add_cli_arguments(rerun)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING)
    try:
        if args.command == "rerun":
            envelope = cmd_rerun(args.path)
        else:
            envelope = run_command(_request_from_args(args))
        ResultWriter(args.out, OutputFormat(args.format)).write(envelope)
    except (ValueError, KeyError) as e:
        logger.error("❌ invalid input: %s", e)
        return ExitCode.INPUT
    except PsstsOracleError as e:
        logger.error("❌ oracle failed: %s", e)
        return ExitCode.TRUNCATION
    except PsstsError as e:
        logger.error("❌ %s", e)
        return ExitCode.INPUT
    return ExitCode(envelope.summary.get("exit_code", ExitCode.OK))


__all__ = [
    "cmd_pnd",
    "cmd_mandel_sweep",
    "cmd_wigner",
    "cmd_threshold",
    "cmd_fidelity_sweep",
    "cmd_oracle_compare",
    "cmd_rerun",
    "run_command",
    "build_parser",
    "main",
]
