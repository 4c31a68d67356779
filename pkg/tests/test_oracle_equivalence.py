import io
import json

import numpy as np
import pytest
from rich.console import Console

from psstspy import closedform
from psstspy.config import COMPARE_MAX_DIM
from psstspy.exception import ExitCode
from psstspy.fockoracle import FockOracleClient, TruncationPolicy
from psstspy.fockoracle.compare import CompareReport, compare_policy, convolution_grid, run_compare, within
from psstspy.model import GridSpec
from psstspy.states import ChannelParams, StateParams
from psstspy.util import alpha_from_qp

SMALL_GRID = GridSpec(q_min=-2.0, q_max=2.0, p_min=-2.0, p_max=2.0, nq=5, np=5)
PROBE_GRID = GridSpec(q_min=-1.0, q_max=1.0, p_min=-1.0, p_max=1.0, nq=3, np=3)

SWEEP = [
    StateParams(nbar=0.0, r=0.0, m=0),
    StateParams(nbar=0.1, r=0.3, m=1),
    StateParams(nbar=0.5, r=0.5, m=2),
    StateParams(nbar=0.0, r=0.5, m=3),
    StateParams(nbar=0.1, r=0.0, m=2),
    StateParams(nbar=0.5, r=0.8, m=2),
]


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_closed_form_matches_oracle(params):
    report = run_compare(params, grid=SMALL_GRID)
    assert report.error is None
    assert [check.name for check in report.failed] == []
    assert len(report.checks) == 8
    assert report.exit_code == ExitCode.OK


@pytest.mark.parametrize("Nth", [0.0, 0.5])
@pytest.mark.parametrize("kappa_t", [0.05, 0.2, 1.0])
def test_evolved_wigner_triple_agreement(threshold_state, kappa_t, Nth):
    report = run_compare(threshold_state, ChannelParams(kappa_t=kappa_t, Nth=Nth), grid=PROBE_GRID)
    names = [check.name for check in report.checks]
    assert "evolved Wigner vs master equation" in names
    assert "evolved Wigner vs Gaussian convolution" in names
    assert report.passed, report.to_frame()


def test_zero_time_channel_adds_no_checks(threshold_state):
    report = run_compare(threshold_state, ChannelParams(kappa_t=0.0), grid=PROBE_GRID)
    assert len(report.checks) == 8


def test_truncation_failure_is_reported():
    report = run_compare(StateParams(nbar=0.5, r=0.5, m=2), policy=TruncationPolicy(initial_dim=4, max_dim=4))
    assert not report.passed
    assert report.error is not None
    assert report.dim_trace == [4]
    assert report.exit_code == ExitCode.TRUNCATION


def test_husimi_grid_matches_oracle(negative_state):
    q = p = np.linspace(-3.0, 3.0, 13)
    qq, pp = np.meshgrid(q, p)
    alpha = alpha_from_qp(qq, pp)
    alpha = alpha[np.abs(alpha) <= 3.0]
    closed = closedform.q_function(negative_state, alpha)
    assert np.all(closed >= 0.0)
    assert np.allclose(closed, FockOracleClient(negative_state).q_function(alpha), rtol=0, atol=1e-8)


def test_pnd_matches_oracle():
    params = StateParams(nbar=0.5, r=0.8, m=2)
    oracle = FockOracleClient(params).pnd(40)
    assert np.allclose(closedform.pnd_vector(params, 40), oracle, rtol=0, atol=1e-8)


def test_pnd_peak_moves_off_vacuum():
    probs = closedform.pnd_vector(StateParams(nbar=1.0, r=0.3, m=1), 60)
    assert np.sum(probs) == pytest.approx(1.0, abs=1e-8)
    assert int(np.argmax(probs)) > 0


def test_within():
    assert within([1.0], [1.0 + 1e-8])[2]
    max_abs, max_rel, passed = within(0.0, 1e-8, atol=1e-9)
    assert not passed
    assert max_abs == pytest.approx(1e-8)
    assert max_rel == pytest.approx(1.0)
    assert within([], [])[:2] == (0.0, 0.0)


def test_report_outputs(tmp_path):
    report = run_compare(StateParams(nbar=0.0, r=0.0, m=0), grid=PROBE_GRID)
    frame = report.to_frame()
    assert list(frame.columns) == ["index", "name", "max_abs", "max_rel", "passed", "reason"]
    assert list(frame["index"]) == list(range(1, 9))

    buffer = io.StringIO()
    report.render(Console(file=buffer, width=160))
    assert "✅" in buffer.getvalue()

    path = tmp_path / "report.json"
    assert report.export_to_json(str(path))
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["params"] == {"nbar": 0.0, "r": 0.0, "m": 0}
    assert CompareReport.model_validate(data).passed


def test_convolution_grid_widens_with_squeezing():
    narrow = convolution_grid(StateParams(nbar=0.05, r=0.3, m=1))
    wide = convolution_grid(StateParams(nbar=0.5, r=1.0, m=3))
    assert narrow.q_max == 9.0
    assert wide.q_max > narrow.q_max
    assert wide.nq * wide.np <= 4_000_000


@pytest.mark.slow
@pytest.mark.parametrize(
    "params",
    [
        StateParams(nbar=nbar, r=r, m=m)
        for nbar in (0.0, 0.1, 0.5, 1.0)
        for r in (0.0, 0.3, 0.5, 0.8)
        for m in (0, 1, 2, 3, 5)
        if nbar or r or not m
    ],
    ids=str,
)
def test_full_sweep(params):
    report = run_compare(params)
    assert report.passed, report.to_frame()
    assert max(report.dim_trace) <= COMPARE_MAX_DIM


def test_compare_policy_stays_within_cap():
    params = StateParams(nbar=1.0, r=0.8, m=5)
    policy = compare_policy(params)
    assert policy.initial_dim == TruncationPolicy.heuristic_floor(params) <= COMPARE_MAX_DIM
    assert policy.max_dim == COMPARE_MAX_DIM
    assert policy.next_dim(policy.initial_dim) == COMPARE_MAX_DIM


def test_widest_sweep_state_converges_under_cap():
    params = StateParams(nbar=1.0, r=0.8, m=5)
    report = run_compare(params, grid=PROBE_GRID)
    assert report.passed, report.to_frame()
    assert report.dim_trace[-1] <= COMPARE_MAX_DIM
