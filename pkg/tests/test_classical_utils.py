import math

import numpy as np
import pytest

from utils.classical_utils import (
    ClassicalModeParams,
    DegenerateModeError,
    amplitude_scan,
    coupling_amplitude,
    dispersion,
    far_detuned_amplitude,
    max_psi_squared,
    mode_solution,
    ode_oracle,
    rabi_frequency,
    spectral_peaks,
    trace_energy,
)


def test_resonant_dispersion_values():
    nu_plus, nu_minus = dispersion(ClassicalModeParams(omega=1.0, k=1.0, epsilon=0.1))
    assert nu_plus == pytest.approx(1.051249, abs=1e-6)
    assert nu_minus == pytest.approx(0.951249, abs=1e-6)


@pytest.mark.parametrize("k", [0.3, 1.0, 1.7])
def test_dispersion_invariants(k):
    params = ClassicalModeParams(omega=1.2, k=k, c=0.9, epsilon=0.2)
    nu_plus, nu_minus = dispersion(params)
    assert nu_plus * nu_minus == pytest.approx(params.omega * params.ck, rel=1e-14)
    assert nu_plus ** 2 + nu_minus ** 2 == pytest.approx(params.omega ** 2 + params.ck ** 2 + params.epsilon ** 2, rel=1e-14)
    assert rabi_frequency(params) == pytest.approx(nu_plus - nu_minus, rel=1e-12)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ClassicalModeParams(omega=0.0, k=1.0)
    with pytest.raises(ValueError):
        ClassicalModeParams(omega=1.0, k=1.0, epsilon=-0.1)


def test_mode_solution_initial_conditions():
    phi, psi = mode_solution(ClassicalModeParams(omega=1.0, k=0.8, epsilon=0.1), 0.0)
    assert phi == pytest.approx(1.0, abs=1e-14)
    assert psi == pytest.approx(0.0, abs=1e-14)


def test_degenerate_modes_are_rejected():
    with pytest.raises(DegenerateModeError):
        mode_solution(ClassicalModeParams(omega=1.0, k=1.0, epsilon=0.0), 1.0)
    assert max_psi_squared(ClassicalModeParams(omega=1.0, k=1.0, epsilon=0.0)) == 0.0


def test_rk4_oracle_matches_closed_form():
    params = ClassicalModeParams(omega=1.0, k=1.2, epsilon=0.1)
    trace = ode_oracle(params, 10.0, dt=1e-3)
    phi, psi = mode_solution(params, trace.tau)
    assert np.max(np.abs(trace.phi - phi)) < 1e-6
    assert np.max(np.abs(trace.psi - psi)) < 1e-6
    energies = trace_energy(params, trace)
    assert np.max(np.abs(energies - energies[0])) / energies[0] < 1e-8


def test_spectral_peaks_recover_normal_frequencies():
    params = ClassicalModeParams(omega=1.0, k=1.0, epsilon=0.1)
    trace = ode_oracle(params, 2 * math.pi / rabi_frequency(params), dt=1e-3)
    peaks = spectral_peaks(trace, 2, stride=10)
    assert peaks[0] == pytest.approx(trace.nu_plus, abs=1e-4)
    assert peaks[1] == pytest.approx(trace.nu_minus, abs=1e-4)


def test_resonant_rabi_law():
    epsilon = 0.1
    params = ClassicalModeParams(omega=1.0, k=1.0, epsilon=epsilon)
    assert coupling_amplitude(params) == pytest.approx(0.5)
    trace = ode_oracle(params, 2 * math.pi / epsilon, dt=1e-3)
    law = np.sin(epsilon * trace.tau / 2) ** 2
    assert np.max(np.abs(np.abs(trace.psi) ** 2 - law)) < 1e-3
    assert max_psi_squared(params) == pytest.approx(1.0, abs=1e-9)


def test_far_detuned_amplitude():
    params = ClassicalModeParams(omega=1.0, k=1.5, epsilon=0.1)
    exact = max_psi_squared(params)
    assert exact == pytest.approx(0.0554, abs=1e-4)
    assert far_detuned_amplitude(params) == pytest.approx(0.0576)
    assert abs(far_detuned_amplitude(params) / exact - 1) < 0.1


def test_amplitude_scan_peaks_at_resonance():
    k_grid = np.linspace(0.5, 1.5, 101)
    rows = amplitude_scan(1.0, 0.1, k_grid)
    assert len(rows) == 101
    peak = max(rows, key=lambda row: row.max_psi2)
    assert peak.kc_over_omega == pytest.approx(1.0, abs=0.005)
    assert peak.max_psi2 / max_psi_squared(ClassicalModeParams(omega=1.0, k=1.5, epsilon=0.1)) > 15
    assert all(row.max_psi2 == 0.0 for row in amplitude_scan(1.0, 0.0, [0.5, 1.5]))
    with pytest.raises(ValueError):
        amplitude_scan(1.0, 0.1, [])
