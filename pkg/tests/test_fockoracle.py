import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.linalg import expm

from psstspy import closedform
from psstspy.closedform.evolved import thermal_wigner, threshold_time, wigner_evolved
from psstspy.exception import (
    DisplacementOutOfRangeError,
    GridTooSmallError,
    MaxDimExceededError,
    PsstsOracleError,
    PsstsParameterError,
    UnitarityLossError,
)
from psstspy.fockoracle import (
    FockDensityMatrix,
    FockOracleClient,
    TruncationPolicy,
    build_pssts,
    build_squeeze,
    build_thermal,
    displacement_matrix,
    evolve_master,
    fidelity_oracle,
    gaussian_convolution_wf,
    husimi,
    rk4_step,
    squeezed_thermal,
    thermal_support,
    wigner_displaced_parity,
)
from psstspy.fockoracle.compare import convolution_grid
from psstspy.states import ChannelParams, StateParams
from psstspy.util import alpha_from_qp, trace_distance


def test_thermal_state():
    state = build_thermal(1.0, 64)
    assert state.trace_deficit < 1e-18
    assert state.trace() == pytest.approx(1.0, abs=1e-15)
    assert build_thermal(2.0, 8).trace_deficit == pytest.approx((2.0 / 3.0) ** 8, rel=1e-14)
    with pytest.raises(PsstsParameterError):
        build_thermal(0.5, 1)


def test_thermal_support():
    assert thermal_support(0.0) == 1
    # 2^-n below eps * 2
    assert thermal_support(1.0, 1e-8) == 27


def test_squeeze_operator():
    assert np.array_equal(build_squeeze(0.0, 6), np.eye(6))
    squeeze = build_squeeze(0.5, 128, check_dim=8)
    assert squeeze[0, 0].real == pytest.approx(1.0 / math.sqrt(math.cosh(0.5)), rel=1e-12)
    # S|0> has only even components
    assert np.max(np.abs(squeeze[1::2, 0])) < 1e-15
    with pytest.raises(UnitarityLossError):
        build_squeeze(0.5, 8)


def test_squeezed_thermal_is_physical():
    state = squeezed_thermal(0.3, 0.4, 96)
    state.check_physical()
    assert state.trace() == pytest.approx(1.0, abs=1e-10)
    assert state.purity() == pytest.approx(1.0 / 1.6, abs=1e-9)


def test_density_matrix_validation():
    with pytest.raises(ValidationError):
        FockDensityMatrix(dim=3, entries=np.eye(2))
    with pytest.raises(ValidationError):
        FockDensityMatrix(dim=2, entries=np.ones(4))
    skew = np.array([[0.5, 0.1], [0.0, 0.5]])
    with pytest.raises(PsstsOracleError):
        FockDensityMatrix(dim=2, entries=skew).check_physical()
    padded = build_thermal(0.5, 4).padded(9)
    assert padded.dim == 9
    assert padded.trace() == pytest.approx(build_thermal(0.5, 4).trace())


def test_truncation_policy():
    params = StateParams(nbar=0.0, r=0.0, m=0)
    assert TruncationPolicy.heuristic_floor(params) == 8
    policy = TruncationPolicy(initial_dim=10, max_dim=20)
    assert policy.next_dim(10) == 15
    assert policy.next_dim(18) == 20
    with pytest.raises(ValidationError):
        TruncationPolicy(initial_dim=10, max_dim=1024)


@pytest.mark.parametrize(
    "params,expected",
    [
        (StateParams(nbar=1.0, r=0.0, m=2), 2.0),
        (StateParams(nbar=1.0, r=0.5, m=1), (3.0 * math.cosh(1.0) - 1.0) / 2.0),
    ],
    ids=str,
)
def test_normalization_estimate(params, expected):
    _, cm = build_pssts(params)
    assert cm == pytest.approx(expected, rel=1e-8)


def test_truncation_limit_reported():
    params = StateParams(nbar=0.5, r=0.5, m=2)
    with pytest.raises(MaxDimExceededError) as info:
        build_pssts(params, TruncationPolicy(initial_dim=4, max_dim=4))
    assert info.value.dim_trace[0] == 4


@pytest.mark.parametrize("params", [StateParams(nbar=0.1, r=0.5, m=1), StateParams(nbar=0.5, r=0.3, m=2)], ids=str)
def test_moments_match_closed_form(params):
    oracle = FockOracleClient(params)
    assert oracle.mean_photon() == pytest.approx(closedform.mean_photon(params), rel=1e-7)
    assert oracle.second_moment() == pytest.approx(closedform.second_moment(params), rel=1e-7)
    assert oracle.mandel_q() == pytest.approx(closedform.mandel_q(params), rel=1e-6, abs=1e-9)
    assert oracle.dim_trace[0] == TruncationPolicy.heuristic_floor(params)


def test_parity_wigner_of_vacuum_and_thermal():
    vacuum = build_thermal(0.0, 16)
    assert wigner_displaced_parity(vacuum, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-12)
    assert wigner_displaced_parity(vacuum, 0.5 + 0.5j) == pytest.approx(math.exp(-1.0) / math.pi, rel=1e-10)
    thermal = build_thermal(1.0, 80)
    assert wigner_displaced_parity(thermal, 0.0) == pytest.approx(1.0 / (3.0 * math.pi), rel=1e-12)


def test_displacement_out_of_range():
    with pytest.raises(DisplacementOutOfRangeError):
        wigner_displaced_parity(build_thermal(0.0, 4), 2.0)


def test_displacement_matrix_matches_matrix_exponential():
    beta = 0.3 - 0.4j
    a = np.diag(np.sqrt(np.arange(1, 60, dtype=float)), k=1).astype(complex)
    reference = expm(beta * a.conj().T - np.conj(beta) * a)[:12, :12]
    assert np.allclose(displacement_matrix(beta, 12), reference, rtol=0, atol=1e-12)


def test_displacement_matrix_batches_over_points():
    beta = np.array([[0.0, 1.5j], [-2.0, 0.7 + 0.2j]])
    stacked = displacement_matrix(beta, 20)
    assert stacked.shape == (2, 2, 20, 20)
    assert np.allclose(stacked[0, 0], np.eye(20))
    assert np.allclose(stacked[1, 1], displacement_matrix(0.7 + 0.2j, 20))
    # low columns stay orthonormal when their displaced support fits in the basis
    block = displacement_matrix(1.5j, 40)[:, :4]
    assert np.allclose(block.conj().T @ block, np.eye(4), atol=1e-10)


def test_parity_wigner_of_single_photon():
    one = FockDensityMatrix(dim=8, entries=np.diag([0.0, 1.0] + [0.0] * 6).astype(complex))
    alpha = np.array([0.0, 0.6, 0.3 - 0.9j])
    expected = -np.exp(-2.0 * np.abs(alpha) ** 2) * (1.0 - 4.0 * np.abs(alpha) ** 2) / math.pi
    values = wigner_displaced_parity(one, alpha)
    assert values.shape == (3,)
    assert np.allclose(values, expected, rtol=1e-10, atol=1e-14)
    assert wigner_displaced_parity(one, 0.0) == pytest.approx(-1.0 / math.pi, rel=1e-12)


def test_parity_wigner_on_large_basis():
    state = squeezed_thermal(1.0, 0.8, 256)
    q = p = np.linspace(-3.0, 3.0, 21)
    qq, pp = np.meshgrid(q, p)
    values = wigner_displaced_parity(state, alpha_from_qp(qq, pp))
    assert values.shape == (21, 21)
    assert np.all(np.isfinite(values))
    # squeezed thermal WF is the Gaussian 1/(pi(2nbar+1))exp(-2(e^{-2r}x² + e^{2r}y²)/(2nbar+1)) at alpha = x + iy
    x, y = qq / math.sqrt(2.0), pp / math.sqrt(2.0)
    gaussian = np.exp(-2.0 * (math.exp(-1.6) * x**2 + math.exp(1.6) * y**2) / 3.0) / (3.0 * math.pi)
    assert np.allclose(values, gaussian, rtol=0, atol=1e-9)


def test_client_pads_for_large_displacement():
    oracle = FockOracleClient(StateParams(nbar=0.0, r=0.0, m=0))
    assert oracle.wigner(2.5) == pytest.approx(math.exp(-12.5) / math.pi, rel=1e-6)


def test_husimi_of_vacuum():
    alpha = np.array([0.0, 0.4 - 0.3j, 1.2j])
    values = husimi(build_thermal(0.0, 24), alpha)
    assert np.allclose(values, np.exp(-np.abs(alpha) ** 2) / math.pi, rtol=1e-12)


def test_rk4_step_exponential_decay():
    rho = np.eye(3, dtype=complex)
    stepped = rk4_step(rho, lambda x: -x, 0.1)
    assert np.allclose(stepped, math.exp(-0.1) * rho, atol=1e-7)


def test_trace_distance():
    up = np.diag([1.0, 0.0]).astype(complex)
    down = np.diag([0.0, 1.0]).astype(complex)
    assert trace_distance(up, up) == 0.0
    assert trace_distance(up, down) == pytest.approx(1.0)


def test_loss_relaxes_to_vacuum():
    relaxed = evolve_master(build_thermal(0.5, 24), ChannelParams(kappa_t=10.0))
    assert relaxed.entries[0, 0].real == pytest.approx(1.0, abs=1e-7)
    assert relaxed.trace() == pytest.approx(build_thermal(0.5, 24).trace(), abs=1e-8)


def test_thermal_environment_fixed_point():
    state = build_thermal(0.5, 24)
    evolved = evolve_master(state, ChannelParams(kappa_t=1.0, Nth=0.5))
    assert evolved.dim > state.dim
    assert np.allclose(evolved.diagonal()[:24], state.diagonal(), atol=1e-9)


def test_zero_time_is_identity():
    state = build_thermal(0.5, 12)
    assert evolve_master(state, ChannelParams(kappa_t=0.0)) is state


@pytest.mark.parametrize("Nth", [0.0, 0.5])
def test_oracle_brackets_threshold(threshold_state, Nth):
    t_c = threshold_time(threshold_state, Nth=Nth)
    oracle = FockOracleClient(threshold_state)
    assert oracle.wigner(0.0, channel=ChannelParams(kappa_t=t_c - 0.002, Nth=Nth)) < 0.0
    assert oracle.wigner(0.0, channel=ChannelParams(kappa_t=t_c + 0.002, Nth=Nth)) > 0.0


def _initial_grid(params, grid):
    q, p = grid.axes()
    qq, pp = np.meshgrid(q, p)
    return closedform.wigner(params, alpha_from_qp(qq, pp)), q, p


def test_convolution_grid_too_small(negative_state):
    q = p = np.linspace(-2.0, 2.0, 41)
    qq, pp = np.meshgrid(q, p)
    values = closedform.wigner(negative_state, alpha_from_qp(qq, pp))
    with pytest.raises(GridTooSmallError):
        gaussian_convolution_wf((values, q, p), ChannelParams(kappa_t=0.5), 0.0)


@pytest.mark.parametrize("zeta", [0.0, 0.3, -0.2 + 0.5j])
def test_convolution_matches_closed_form(negative_state, zeta):
    channel = ChannelParams(kappa_t=1.0, Nth=0.2)
    initial = _initial_grid(negative_state, convolution_grid(negative_state))
    convolved = gaussian_convolution_wf(initial, channel, zeta)
    assert convolved == pytest.approx(wigner_evolved(negative_state, channel, zeta), abs=1e-6)


def test_convolution_long_time(negative_state):
    initial = _initial_grid(negative_state, convolution_grid(negative_state))
    value = gaussian_convolution_wf(initial, ChannelParams(kappa_t=8.0), 0.3)
    assert value == pytest.approx(thermal_wigner(0.0, 0.3), abs=1e-6)


@pytest.mark.parametrize("params", [StateParams(nbar=0.2, r=0.5, m=1), StateParams(nbar=0.2, r=0.3, m=3)], ids=str)
def test_fidelity_matches_closed_form(params):
    assert fidelity_oracle(params) == pytest.approx(closedform.fidelity(params), rel=1e-7)


def test_fidelity_without_subtraction():
    assert FockOracleClient(StateParams(nbar=0.3, r=0.4, m=0)).fidelity() == pytest.approx(1.0, rel=1e-8)


def test_pnd_is_zero_padded():
    probs = FockOracleClient(StateParams(nbar=0.0, r=0.0, m=0)).pnd(500)
    assert probs.shape == (501,)
    assert probs[0] == pytest.approx(1.0)
    assert np.all(probs[1:] == 0.0)
