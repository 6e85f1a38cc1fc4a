import math

import numpy as np
import pytest

from utils.fock_utils import annihilation, make_register, state_distance, vacuum_state
from utils.state_utils import (
    MissingModeError,
    SqueezeParam,
    SqueezeParameterError,
    b_frame,
    b_frame_vacuum,
    bogoliubov_frame,
    frame_commutator_residuals,
    minkowski_vacuum,
    rindler_vacuum,
    two_mode_squeezed_vacuum,
)


def test_squeeze_param_validation():
    with pytest.raises(SqueezeParameterError):
        SqueezeParam(1.0)
    with pytest.raises(SqueezeParameterError):
        SqueezeParam.from_omega(-1.0)
    with pytest.raises(SqueezeParameterError):
        SqueezeParam.from_config({"gamma": 0.5, "omega": 1.0})
    assert SqueezeParam.from_omega(1.0).gamma == pytest.approx(math.exp(-math.pi))
    assert SqueezeParam.from_config({"gamma": -0.3}).gamma == -0.3
    assert SqueezeParam(0.5).mean_occupation == pytest.approx(1.0 / 3.0)


def test_two_mode_squeezed_vacuum_amplitudes():
    gamma = 0.5
    register = make_register(["b1", "b2"], [8, 8])
    psi = two_mode_squeezed_vacuum(gamma, "b1", "b2", register)
    for n in range(9):
        assert psi.amplitude([n, n]) == pytest.approx(math.sqrt(1 - gamma ** 2) * gamma ** n)
    assert psi.amplitude([1, 0]) == 0.0
    assert psi.leakage == pytest.approx(gamma ** 18)
    assert psi.is_normalized()


def test_named_vacua(single_chain_register, gamma):
    assert np.array_equal(rindler_vacuum(single_chain_register).amplitudes, vacuum_state(single_chain_register).amplitudes)
    psi = minkowski_vacuum(gamma, single_chain_register)
    assert psi.amplitude([0, 1, 1]) == pytest.approx(math.sqrt(1 - gamma ** 2) * gamma)
    with pytest.raises(MissingModeError):
        minkowski_vacuum(gamma, make_register(["sigma"], [3]))


def test_frames_annihilate_their_vacua(field_register):
    frame = bogoliubov_frame(0.5, field_register)
    assert max(frame.vacuum_residuals) < 1e-14
    chains = make_register(["sigma1", "sigma2"], [12, 12])
    collective = b_frame(0.5, chains)
    assert max(collective.vacuum_residuals) < 1e-14
    assert state_distance(collective.vacuum(), b_frame_vacuum(0.5, chains)) == 0.0


@pytest.mark.parametrize("builder,modes", [
    (bogoliubov_frame, ("b1", "b2")),
    (b_frame, ("sigma1", "sigma2")),
])
def test_frame_commutators_on_interior(builder, modes):
    frame = builder(0.5, make_register(modes, [10, 10]))
    residuals = frame_commutator_residuals(frame)
    assert max(residuals.values()) < 1e-10


def test_frame_reconstructs_sources(field_register):
    frame = bogoliubov_frame(0.4, field_register)
    m1, _ = frame.reconstruct_sources()
    gap = (m1 - annihilation(field_register, "b1")).to_dense()
    assert np.max(np.abs(gap)) < 1e-12


def test_dress_maps_bare_vacuum_to_frame_vacuum():
    register = make_register(["b1", "b2"], [30, 30])
    frame = bogoliubov_frame(0.3, register)
    dressed = frame.dress(vacuum_state(register))
    assert state_distance(dressed, frame.vacuum()) < 1e-10
    assert state_distance(frame.undress(dressed), vacuum_state(register)) < 1e-10
