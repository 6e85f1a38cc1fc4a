import math

import numpy as np
import pytest

from utils.closedform_utils import (
    ClosedFormResult,
    pair_correlation,
    pair_correlation_closed,
    pair_squeezing,
    psi_duality,
    psi_single_chain,
    psi_single_chain_minkowski,
    psi_two_chain,
    psi_two_chain_minkowski,
    psi_unruh_minkowski,
    psi_unruh_minkowski_intermediate,
    rho_b1_thermal,
    rho_sigma_thermal,
    thermal_entropy,
    thermal_mean,
    unruh_coefficients,
    working_cutoff,
)
from utils.dynamics_utils import evolve, h_single_chain, h_two_chain
from utils.fock_utils import (
    apply_exp_series,
    creation,
    overlap,
    partial_trace,
    restrict_state,
    state_distance,
    tail_policy_cutoff,
)
from utils.state_utils import (
    CAVITY_TOY,
    SINGLE_CHAIN,
    TWO_CHAIN,
    b_frame,
    bare_frame,
    bogoliubov_frame,
    minkowski_vacuum,
)


def test_single_chain_starts_in_minkowski_vacuum(single_chain_register, gamma):
    result = psi_single_chain(gamma, 1.0, 0.0, single_chain_register)
    assert result.construction == "single-chain"
    assert state_distance(result.state, minkowski_vacuum(gamma, single_chain_register)) < 1e-15
    assert result.leakage == pytest.approx(gamma ** (2 * (max(single_chain_register.cutoffs) + 1)), rel=1e-3, abs=1e-15)


@pytest.mark.parametrize("tau", [0.35, 1.0, 2.2])
def test_single_chain_matches_exact_evolution(single_chain_register, gamma, tau):
    evolved = evolve(h_single_chain(1.0, single_chain_register), minkowski_vacuum(gamma, single_chain_register), tau)
    closed = psi_single_chain(gamma, 1.0, tau, single_chain_register)
    assert 1.0 - abs(overlap(closed.state, evolved)) < 1e-8
    minkowski = psi_single_chain_minkowski(gamma, 1.0, tau, single_chain_register)
    assert state_distance(minkowski.state, closed.state) < 1e-10


def test_two_chain_matches_exact_evolution(two_chain_register, gamma):
    tau = 0.6
    evolved = evolve(h_two_chain(1.0, two_chain_register), minkowski_vacuum(gamma, two_chain_register), tau)
    closed = psi_two_chain(gamma, 1.0, tau, two_chain_register)
    assert 1.0 - abs(overlap(closed.state, evolved)) < 1e-8
    assert state_distance(psi_two_chain_minkowski(gamma, 1.0, tau, two_chain_register).state, closed.state) < 1e-10


def test_two_chain_field_returns_to_rindler_vacuum(two_chain_register, gamma):
    closed = psi_two_chain(gamma, 1.0, math.pi / 2, two_chain_register)
    field = partial_trace(closed.state, TWO_CHAIN.field)
    assert field.matrix[0, 0].real == pytest.approx(1.0, abs=1e-10)


def test_cavity_toy_shares_the_two_chain_numbers(gamma):
    cutoff = 6
    two_chain = psi_two_chain(gamma, 1.0, 0.8, TWO_CHAIN.register(cutoff))
    cavity = psi_two_chain(gamma, 1.0, 0.8, CAVITY_TOY.register(cutoff), CAVITY_TOY)
    np.testing.assert_allclose(cavity.state.amplitudes, two_chain.state.amplitudes, rtol=0, atol=1e-15)


def test_unruh_coefficients():
    start = unruh_coefficients(0.5, 1.0, 0.0)
    assert start["prefactor"] == pytest.approx(1.0)
    assert start["x"] == 0.0 and start["y"] == 0.0
    pair = unruh_coefficients(0.5, 1.0, math.pi)
    assert pair["y"].real == pytest.approx(pair_squeezing(0.5))
    assert pair["prefactor"] == pytest.approx(math.sqrt(1.0 - pair_squeezing(0.5) ** 2))


def test_unruh_minkowski_form_matches_single_chain(single_chain_register, gamma):
    tau = 1.0
    frame_state = psi_unruh_minkowski(gamma, 1.0, tau, single_chain_register)
    closed = psi_single_chain(gamma, 1.0, tau, single_chain_register)
    assert 1.0 - abs(overlap(frame_state.state, closed.state)) < 1e-7
    intermediate = psi_unruh_minkowski_intermediate(gamma, 1.0, tau, single_chain_register)
    assert state_distance(intermediate.state, frame_state.state) < 1e-7


def test_pair_correlation_at_half_period(gamma):
    register = SINGLE_CHAIN.register(tail_policy_cutoff(gamma, 1e-24))
    state = psi_unruh_minkowski(gamma, 1.0, math.pi, register).state
    measured = pair_correlation(state, bogoliubov_frame(gamma, register))
    assert measured == pytest.approx(pair_correlation_closed(gamma), rel=1e-6)


def test_pair_correlation_closed_value():
    assert pair_correlation_closed(0.5) == pytest.approx(8.098765432, rel=1e-9)


def test_duality_reproduces_two_chain(two_chain_register, gamma):
    tau = 0.9
    closed = psi_two_chain(gamma, 1.0, tau, two_chain_register)
    dual = psi_duality(
        gamma, 1.0, tau,
        bogoliubov_frame(gamma, two_chain_register, TWO_CHAIN.field),
        b_frame(gamma, two_chain_register, TWO_CHAIN.chains),
        two_chain_register,
    )
    assert dual.construction == "duality"
    assert 1.0 - abs(overlap(dual.state, closed.state)) < 1e-7
    bare = psi_duality(
        gamma, 1.0, tau,
        bare_frame(two_chain_register, TWO_CHAIN.chains),
        bare_frame(two_chain_register, TWO_CHAIN.field),
        two_chain_register,
    )
    assert state_distance(bare.state, closed.state) < 1e-14


def test_thermal_marginals():
    gamma = 0.5
    rho = rho_b1_thermal(gamma, 1.0, 0.0, 20)
    np.testing.assert_allclose(rho.diagonal(), (1 - gamma ** 2) * gamma ** (2 * np.arange(21)), atol=1e-15)
    swapped = rho_sigma_thermal(gamma, 1.0, math.pi / 2, 20)
    np.testing.assert_allclose(swapped.diagonal(), rho.diagonal(), atol=1e-15)
    assert rho.trace == pytest.approx(1.0 - rho.leakage)


def test_thermal_entropy_matches_distribution():
    ratio = 0.25
    p = (1 - ratio) * ratio ** np.arange(200)
    assert thermal_entropy(ratio) == pytest.approx(float(-np.sum(p * np.log(p))), rel=1e-12)
    assert thermal_entropy(0.0) == 0.0
    assert thermal_mean(0.25) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        thermal_entropy(1.0)


def test_working_cutoff_pads_the_register():
    assert working_cutoff(10, 0.0, padding=4) == 14
    assert working_cutoff(5, 0.5, padding=4) == tail_policy_cutoff(0.5) + 4
    assert working_cutoff(5, 1.0, padding=4) == 14


def test_closed_form_result_needs_a_tag(single_chain_register):
    state = minkowski_vacuum(0.3, single_chain_register)
    with pytest.raises(ValueError):
        ClosedFormResult(state, "", 0.0)
    assert ClosedFormResult(state, "x", -1e-18).leakage == 0.0


@pytest.mark.parametrize("tau", [0.5, 2.5, math.pi])
def test_single_chain_minkowski_form_under_strong_squeezing(tau):
    gamma = 0.7
    register = SINGLE_CHAIN.register(tail_policy_cutoff(gamma))
    closed = psi_single_chain(gamma, 1.0, tau, register)
    minkowski = psi_single_chain_minkowski(gamma, 1.0, tau, register)
    assert state_distance(minkowski.state, closed.state) < 1e-10


@pytest.mark.parametrize("tau", [0.4, 1.0, 2.2])
def test_unruh_minkowski_form_from_frame_operators(single_chain_register, gamma, tau):
    padded = SINGLE_CHAIN.register(30)
    frame = bogoliubov_frame(gamma, padded)
    sigma_dag = creation(padded, SINGLE_CHAIN.chains[0])
    a1_dag, a2_dag = frame.op1.dagger(), frame.op2.dagger()
    coeffs = unruh_coefficients(gamma, 1.0, tau)

    state = apply_exp_series(a1_dag @ a2_dag * coeffs["y"], frame.vacuum())
    state = apply_exp_series(a2_dag @ sigma_dag * coeffs["x"], state).scaled(coeffs["prefactor"])

    closed = psi_unruh_minkowski(gamma, 1.0, tau, single_chain_register)
    assert state_distance(restrict_state(state, single_chain_register), closed.state) < 1e-7
