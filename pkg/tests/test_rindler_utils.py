import math

import numpy as np
import pytest

from utils.rindler_utils import (
    ChainGeometry,
    Direction,
    GeometryError,
    RindlerModeSpec,
    Wedge,
    collective_coupling,
    collective_mode_norm,
    coupling_k_grid,
    coupling_selectivity_report,
    hyperbola_invariant,
    resonant_k_grid,
    rindler_mode_value,
    trajectory,
    uniform_chain,
    worldline_phase_fit,
)

OMEGAS = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]


def test_geometry_validation():
    with pytest.raises(GeometryError):
        ChainGeometry(a=0.0, positions=(0.0,))
    with pytest.raises(GeometryError):
        ChainGeometry(a=1.0, positions=())
    with pytest.raises(GeometryError):
        uniform_chain(4, spacing=0.0)
    with pytest.raises(GeometryError):
        RindlerModeSpec(-1.0)


def test_worldlines_stay_on_hyperbolae():
    geom = uniform_chain(4, 0.5, a=2.0, c=1.5)
    taus = np.linspace(-3.0, 3.0, 61)
    for z_bar in geom.positions:
        t, z = trajectory(geom, z_bar, taus)
        expected = (geom.c ** 2 / geom.a) ** 2 * math.exp(2 * geom.a * z_bar / geom.c ** 2)
        np.testing.assert_allclose(hyperbola_invariant(geom, t, z), expected, rtol=1e-12)


def test_proper_acceleration_redshifts_along_the_chain():
    geom = uniform_chain(3, 1.0, a=1.0)
    np.testing.assert_allclose(geom.proper_acceleration(geom.z_bar), np.exp(-geom.z_bar))


def test_mode_value_support():
    spec = RindlerModeSpec(2.0)
    assert rindler_mode_value(spec, 1.0, 0.5) == 0.0
    assert abs(rindler_mode_value(spec, 0.0, 2.0)) == pytest.approx(1 / math.sqrt(2.0))
    left_wedge = RindlerModeSpec(2.0, Wedge.LEFT)
    assert abs(rindler_mode_value(left_wedge, 2.0, 0.5)) == pytest.approx(1 / math.sqrt(2.0))
    assert rindler_mode_value(left_wedge, 0.0, 2.0) == 0.0


def test_left_moving_modes_mirror_right_moving():
    right = RindlerModeSpec(1.0)
    left = RindlerModeSpec(1.0, direction=Direction.LEFT_MOVING)
    assert rindler_mode_value(left, 0.2, -1.3) == pytest.approx(rindler_mode_value(right, 0.2, 1.3))
    geom = uniform_chain(2, 1.0)
    assert geom.k_omega(left) == -geom.k_omega(right)
    assert left.label == "L1"


@pytest.mark.parametrize("omega", [0.5, 2.0])
def test_worldline_phase_is_linear_in_proper_time(omega):
    geom = uniform_chain(8, 1.0, a=1.3)
    fit = worldline_phase_fit(geom, RindlerModeSpec(omega), geom.positions[-1], np.linspace(0.0, 2.0, 41))
    assert fit.slope_error < 1e-9
    assert fit.intercept_error < 1e-9
    assert fit.fit_residual < 1e-9
    assert fit.modulus_spread < 1e-12
    with pytest.raises(GeometryError):
        worldline_phase_fit(geom, RindlerModeSpec(omega, Wedge.LEFT), 0.0, [0.0, 1.0])


def test_collective_coupling_on_resonance():
    geom = uniform_chain(16, 1.0)
    spec = RindlerModeSpec(1.5)
    assert abs(collective_coupling(geom, geom.k_omega(spec), spec)) == pytest.approx(math.sqrt(16))
    assert collective_mode_norm(geom) == pytest.approx(1.0)


def test_dominance_grows_with_chain_length():
    dominance = []
    for size in (16, 64, 256):
        geom = uniform_chain(size, 1.0)
        report = coupling_selectivity_report(geom, OMEGAS, resonant_k_grid(geom, OMEGAS))
        assert report.magnitude.shape == (len(OMEGAS), len(OMEGAS))
        dominance.append(report.dominance)
    assert dominance[0] < dominance[1] < dominance[2]
    assert dominance[1] > 10.0


def test_selectivity_report_rows():
    geom = uniform_chain(16, 1.0)
    report = coupling_selectivity_report(geom, [1.0, 2.0], [0.5, 1.0, 2.0])
    rows = list(report.rows())
    assert [row[0] for row in rows] == [0.5, 1.0, 2.0]
    assert rows[1][1] == pytest.approx(4.0)
    with pytest.raises(GeometryError):
        coupling_selectivity_report(geom, [], [1.0])


def test_single_oscillator_has_no_selectivity():
    geom = uniform_chain(1, 1.0)
    assert geom.main_lobe_halfwidth == 0.0
    report = coupling_selectivity_report(geom, OMEGAS, np.linspace(0.1, 4.0, 201))
    np.testing.assert_allclose(report.magnitude, 1.0, atol=1e-12)
    assert report.dominance == pytest.approx(1.0)


def test_dominance_on_dense_grid_is_the_sidelobe_ratio():
    k_grid = np.linspace(0.2, 4.0, 2001)
    for size in (16, 64, 256):
        geom = uniform_chain(size, 1.0)
        assert geom.main_lobe_halfwidth == pytest.approx(2.0 * math.pi / size)
        report = coupling_selectivity_report(geom, [0.5, 1.0, 1.5], k_grid)
        # first sidelobe of the Dirichlet kernel sits near 0.217 of the main lobe
        assert 4.0 < report.dominance < 5.0


def test_coupling_k_grid():
    geom = uniform_chain(16, 1.0, a=2.0)
    assert coupling_k_grid(geom, [1.0, 0.5]) == resonant_k_grid(geom, [1.0, 0.5]) == (1.0, 2.0)
    axis = coupling_k_grid(geom, [1.0], k_min=0.0, k_max=1.0, points=5)
    assert axis == pytest.approx((0.0, 0.25, 0.5, 0.75, 1.0))
    with pytest.raises(GeometryError):
        coupling_k_grid(geom, [1.0], k_min=0.0, points=5)
    with pytest.raises(GeometryError):
        coupling_k_grid(geom, [1.0], k_min=1.0, k_max=0.0, points=5)
