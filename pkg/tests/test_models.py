import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrg_coherence.coherence import coherence_triple
from qrg_coherence.errors import InvalidParam, NoSignChange
from qrg_coherence.linalg import hermitian_eig
from qrg_coherence.models import (
    ASYMPTOTIC,
    DM,
    ITF,
    block_ground_state,
    dm_block_hamiltonian,
    dm_flow_derivative,
    dm_flow_step,
    dm_ground_state,
    dm_q,
    find_fixed_point,
    iterate_flow,
    itf_block_hamiltonian,
    itf_flow_derivative,
    itf_flow_step,
    itf_ground_state,
    uncorrected_q,
)


def ground_energy(h):
    return hermitian_eig(h).eigenvalues[-1]


# ---------------------------------------------------------------------------
# flow maps
# ---------------------------------------------------------------------------

def test_itf_flow_step_examples():
    assert itf_flow_step(1.0)[0] == 1.0
    assert itf_flow_step(0.9)[0] == pytest.approx(0.81, abs=1e-15)
    assert itf_flow_step(1.0)[1] == pytest.approx(0.707107, abs=1e-6)
    assert itf_flow_step(1.0)[1] == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_itf_flow_derivative():
    h = 1e-5
    slope = (itf_flow_step(1 + h)[0] - itf_flow_step(1 - h)[0]) / (2 * h)
    assert abs(slope - 2.0) <= 1e-6
    assert itf_flow_derivative(1.0) == 2.0


def test_dm_flow_step_examples():
    d1, r1 = dm_flow_step(1.0)
    assert abs(d1 - 1.0) <= 1e-12
    assert r1 == pytest.approx((4 / 6) ** 2, abs=1e-15)
    assert dm_flow_step(0.5)[0] == pytest.approx(0.267949, abs=1e-6)
    assert dm_flow_step(0.5)[0] == pytest.approx(2 / (1 + math.sqrt(3)) ** 2, abs=1e-15)
    assert dm_flow_step(0.0)[0] == 0.0


def test_dm_flow_derivative_examples():
    assert dm_flow_derivative(1.0) == pytest.approx(5 / 3, abs=1e-15)
    h = 1e-5
    fd = (dm_flow_step(1 + h)[0] - dm_flow_step(1 - h)[0]) / (2 * h)
    assert abs(fd - 5 / 3) <= 1e-6
    for D in (1e-3, 1e-4):
        assert dm_flow_derivative(D) == pytest.approx(12 * D * D, rel=1e-4)


@pytest.mark.parametrize("D", [0.05, 0.3, 0.8, 1.7, 6.0])
def test_dm_flow_derivative_matches_finite_difference(D):
    h = 1e-6 * D
    fd = (dm_flow_step(D + h)[0] - dm_flow_step(D - h)[0]) / (2 * h)
    assert dm_flow_derivative(D) == pytest.approx(fd, rel=1e-7)


def test_uncorrected_q_breaks_the_fixed_point():
    # the reciprocal form gives q(1) = 1/3 and D' = 16/(4/3)^2 = 9
    assert dm_flow_step(1.0, uncorrected_q)[0] == pytest.approx(9.0, abs=1e-12)
    assert dm_q(1.0) == 3.0


# ---------------------------------------------------------------------------
# ground states
# ---------------------------------------------------------------------------

def test_itf_ground_state_examples():
    bell = itf_ground_state(0.0).amplitudes
    np.testing.assert_allclose(bell[[0, 3]], [0.707107, 0.707107], atol=1e-6)
    a = itf_ground_state(3.0).amplitudes
    # s = 3 + sqrt(10); alpha = s / sqrt(s^2 + 1), beta = 1 / sqrt(s^2 + 1)
    assert a[0].real == pytest.approx(0.987087, abs=1e-6)
    assert a[3].real == pytest.approx(0.160182, abs=1e-6)
    np.testing.assert_array_equal(itf_ground_state(math.inf).amplitudes, [1, 0, 0, 0])


def test_itf_partner_state():
    a, b = itf_ground_state(0.7).amplitudes, itf_ground_state(0.7, which=1).amplitudes
    assert b[1] == a[0] and b[2] == a[3]


def test_dm_ground_state_examples():
    a = dm_ground_state(1.0).amplitudes
    np.testing.assert_allclose(a[[0b100, 0b010, 0b001]], [0.408248, 0.816497j, -0.408248], atol=1e-6)
    for D in (0.1, 0.5, 1.0, 2.0, 10.0):
        assert np.linalg.norm(dm_ground_state(D).amplitudes) == pytest.approx(1.0, abs=1e-15)
    limit = dm_ground_state(math.inf).amplitudes
    np.testing.assert_allclose(limit[[0b100, 0b010, 0b001]], [0.5, 1j / math.sqrt(2), -0.5], atol=1e-15)
    far = dm_ground_state(1e7).amplitudes
    np.testing.assert_allclose(far, limit, atol=1e-7)


def test_dm_zero_coupling_needs_flag():
    with pytest.raises(InvalidParam):
        dm_ground_state(0.0)
    np.testing.assert_array_equal(dm_ground_state(0.0, allow_zero=True).amplitudes[[0b100, 0b010, 0b001]], [0, 1j, 0])


@pytest.mark.parametrize("bad", [-0.1, math.nan])
def test_negative_couplings_rejected(bad):
    with pytest.raises(InvalidParam):
        itf_ground_state(bad)
    with pytest.raises(InvalidParam):
        dm_ground_state(bad)
    with pytest.raises(InvalidParam):
        iterate_flow(ITF, bad, 3)


def test_which_must_be_binary():
    with pytest.raises(InvalidParam):
        itf_ground_state(1.0, which=2)


@pytest.mark.parametrize("model,x", [(ITF, 0.4), (ITF, 2.5), (DM, 0.4), (DM, 2.5)])
def test_partner_states_give_identical_coherence(model, x):
    a = coherence_triple(block_ground_state(model, x).density_matrix())
    b = coherence_triple(block_ground_state(model, x, which=1).density_matrix())
    assert tuple(a) == pytest.approx(tuple(b), abs=1e-12)


# ---------------------------------------------------------------------------
# Hamiltonian oracles
# ---------------------------------------------------------------------------

def test_itf_hamiltonian_examples():
    np.testing.assert_allclose(hermitian_eig(itf_block_hamiltonian(1.0, 0.0)).eigenvalues, [1, 1, -1, -1], atol=1e-13)
    h = itf_block_hamiltonian(1.0, 0.7)
    e0 = -math.sqrt(1 + 0.49)
    psi = itf_ground_state(0.7).amplitudes
    assert np.linalg.norm(h @ psi - e0 * psi) <= 1e-10
    assert ground_energy(itf_block_hamiltonian(1.0, 1.0)) == pytest.approx(-math.sqrt(2), abs=1e-12)


def test_dm_hamiltonian_examples():
    assert ground_energy(dm_block_hamiltonian(1.0, 1.0)) == pytest.approx(-1.0, abs=1e-12)
    h = dm_block_hamiltonian(1.0, 0.6)
    e0 = -(1 + dm_q(0.6)) / 4
    phi = dm_ground_state(0.6).amplitudes
    assert np.linalg.norm(h @ phi - e0 * phi) <= 1e-10
    w = hermitian_eig(dm_block_hamiltonian(1.0, 1.3)).eigenvalues
    assert abs(w[-1] - w[-2]) <= 1e-10


def test_oracles_scale_with_exchange():
    np.testing.assert_allclose(itf_block_hamiltonian(2.5, 0.3), 2.5 * itf_block_hamiltonian(1.0, 0.3))
    np.testing.assert_allclose(dm_block_hamiltonian(2.5, 0.3), 2.5 * dm_block_hamiltonian(1.0, 0.3))


def test_itf_oracle_grid():
    for g in np.linspace(0.0, 5.0, 50):
        h = itf_block_hamiltonian(1.0, g)
        w = hermitian_eig(h).eigenvalues
        e0 = -math.sqrt(1 + g * g)
        assert abs(w[-1] - e0) <= 1e-10 and abs(w[-2] - e0) <= 1e-10
        for which in (0, 1):
            psi = itf_ground_state(g, which).amplitudes
            assert np.linalg.norm(h @ psi - e0 * psi) <= 1e-10


def test_dm_oracle_grid():
    for D in np.linspace(0.05, 5.0, 50):
        h = dm_block_hamiltonian(1.0, D)
        w = hermitian_eig(h).eigenvalues
        e0 = -(1 + dm_q(D)) / 4
        assert abs(w[-1] - e0) <= 1e-10 and abs(w[-2] - e0) <= 1e-10
        for which in (0, 1):
            phi = dm_ground_state(D, which).amplitudes
            assert np.linalg.norm(h @ phi - e0 * phi) <= 1e-10


# ---------------------------------------------------------------------------
# trajectories and fixed points
# ---------------------------------------------------------------------------

def test_iterate_flow_examples():
    assert iterate_flow(ITF, 1.0, 7).couplings == (1.0,) * 8
    traj = iterate_flow(ITF, 1.2, 8)
    assert traj.frozen == "inf" and traj.final == math.inf
    assert traj.frozen_at == 7  # 1.2**128 = 1.4e10 is the first value past 1e8
    dm = iterate_flow(DM, 0.9, 6).couplings
    assert all(b < a for a, b in zip(dm, dm[1:]))
    assert 0 < dm[-1] < 1e-2


def test_trajectory_strengths_and_sizes():
    traj = iterate_flow(DM, 0.5, 3)
    assert traj.couplings[1] == pytest.approx(0.267949, abs=1e-6)
    assert traj.strengths[0] == 1.0
    assert traj.strengths[1] == pytest.approx(dm_flow_step(0.5)[1], abs=1e-15)
    assert traj.block_size == 3 and traj.depth == 3
    assert traj.system_size() == 81 and traj.system_size(0) == 3
    assert iterate_flow(ITF, 0.5, 4).system_size() == 32


def test_frozen_strength_ratios():
    up = iterate_flow(DM, 3.0, 30)
    assert up.frozen == "inf"
    k = up.frozen_at
    assert up.strengths[k + 1] == pytest.approx(up.strengths[k] * 0.25)
    down = iterate_flow(ITF, 0.1, 10)
    assert down.frozen == "zero" and down.strengths[-1] == down.strengths[down.frozen_at]


def test_iterate_flow_depth_bounds():
    with pytest.raises(InvalidParam):
        iterate_flow(ITF, 0.5, 65)
    with pytest.raises(InvalidParam):
        iterate_flow("xy", 0.5, 1)


def test_consecutive_couplings_follow_the_map():
    traj = iterate_flow(DM, 1.05, 12)
    for a, b in zip(traj.couplings, traj.couplings[1:]):
        if math.isfinite(b):
            assert abs(dm_flow_step(a)[0] - b) <= 1e-12 * max(1.0, b)


def test_find_fixed_point_examples():
    assert find_fixed_point(ITF, (0.5, 2.0)) == pytest.approx(1.0, abs=1e-12)
    assert find_fixed_point(DM, (0.5, 2.0)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(NoSignChange):
        find_fixed_point(ITF, (0.1, 0.9))


@settings(max_examples=60, deadline=None)
@given(x0=st.floats(0.05, 3.0).filter(lambda x: abs(x - 1) > 1e-2), model=st.sampled_from([ITF, DM]))
def test_flow_monotone_away_from_fixed_point(x0, model):
    traj = iterate_flow(model, x0, 40)
    live = traj.couplings if traj.frozen_at is None else traj.couplings[: traj.frozen_at]
    steps = np.diff(live)
    if x0 < 1:
        assert np.all(steps < 0)
    else:
        assert np.all(steps > 0)
    assert traj.frozen == ("zero" if x0 < 1 else "inf")


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.0, 1e6))
def test_ground_states_normalized(x):
    for model in (ITF, DM):
        assert np.linalg.norm(block_ground_state(model, x).amplitudes) == pytest.approx(1.0, abs=1e-14)


def test_freeze_thresholds():
    assert iterate_flow(ITF, 2 * ASYMPTOTIC, 0).frozen == "inf"
    assert iterate_flow(ITF, 1e-9, 0).final == 0.0
