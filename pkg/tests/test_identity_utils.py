import math

import numpy as np
import pytest

from utils.closedform_utils import rho_b1_thermal
from utils.identity_utils import (
    ACCEPTANCE_CUTOFF,
    SingularInputError,
    binomial_trace_oracle,
    check_b_frame_ground,
    check_conjugation_identities,
    check_duality_hamiltonian,
    check_exp_reordering,
    check_frame_vacuum,
    check_shift_identity,
    check_squeeze_rebasing,
    check_state_generator,
    cutoff_monotone,
    geometric_closure_residual,
    identity_suite,
    monotone_by_name,
    monotone_excess,
    rebasing_coefficients,
    riccati_coefficient,
)


@pytest.mark.parametrize("acting", ["b1", "b2"])
def test_shift_identity(acting):
    report = check_shift_identity(0.5, 8, acting)
    assert report.passed
    assert report.interior_levels_excluded == 2
    with pytest.raises(ValueError):
        check_shift_identity(0.5, 8, "sigma")


def test_conjugation_identities():
    reports = check_conjugation_identities(-0.7j, 8)
    assert len(reports) == 4
    assert all(r.passed for r in reports)
    assert all(r.passed for r in check_conjugation_identities(0.0, 6))


def test_riccati_matches_closed_rebasing_coefficient():
    A, gamma = 0.3 + 0.2j, 0.5
    f, _ = riccati_coefficient(**rebasing_coefficients(A, gamma))
    assert f == pytest.approx(-A / (1 + A * gamma - gamma ** 2), abs=1e-14)


def test_riccati_degenerate_frequency_limit():
    # alpha * lam = beta^2 makes mu vanish
    f, F = riccati_coefficient(1.0, 0.5, 0.25)
    assert f == pytest.approx(-2.0 / 3.0, abs=1e-12)
    assert F == pytest.approx(1.5, abs=1e-12)


def test_squeeze_rebasing():
    report = check_squeeze_rebasing(0.5 * (1 - math.cos(1.0)), 0.5, 10)
    assert report.kind == "state"
    assert report.passed
    assert report.parameters["riccati_gap"] < 1e-12
    with pytest.raises(SingularInputError):
        check_squeeze_rebasing(-1.5, 0.5, 6)


def test_exponential_reordering():
    assert check_exp_reordering(0.4j, -0.3, 8).passed


@pytest.mark.parametrize("chains", [1, 2])
def test_state_generator(chains):
    assert check_state_generator(0.5, 1.0, 0.7, 6, chains=chains).passed


def test_frame_identities():
    assert check_duality_hamiltonian(0.5, 1.0, 5).passed
    assert check_b_frame_ground(0.5, 8).passed
    assert check_frame_vacuum(0.5, 8).passed


def test_binomial_route_matches_thermal_marginal():
    for tau in (0.0, 0.4, 1.3):
        binomial = binomial_trace_oracle(0.5, 1.0, tau, 12)
        np.testing.assert_allclose(binomial.matrix, rho_b1_thermal(0.5, 1.0, tau, 12).matrix, atol=1e-12)


def test_geometric_closure():
    for m in range(6):
        assert geometric_closure_residual(0.5, m) < 1e-12


def test_monotone_helpers():
    assert monotone_excess([1e-3]) == 0.0
    assert monotone_excess([1e-3, 1e-5, 3e-5]) == pytest.approx(1e-5)
    assert cutoff_monotone([1e-3, 1e-4, 1e-5])
    assert not cutoff_monotone([1e-3, 1e-5, 3e-5])


def test_identity_suite_passes_at_acceptance_cutoff():
    reports = identity_suite(0.5, [6, ACCEPTANCE_CUTOFF])
    assert {r.cutoff for r in reports} == {6, ACCEPTANCE_CUTOFF}
    failed = [r.name for r in reports if r.cutoff == ACCEPTANCE_CUTOFF and not r.passed]
    assert failed == []
    assert all(monotone_by_name(reports).values())
