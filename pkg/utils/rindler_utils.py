"""
Uniformly accelerated chains, Rindler mode functions and collective coupling.
"""
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class GeometryError(Exception):
    """Raised for invalid chain geometries or mode specifications"""
    pass


class Wedge(str, Enum):
    """Rindler wedge of a mode"""
    RIGHT = "1"
    LEFT = "2"


class Direction(str, Enum):
    """Propagation direction of a mode"""
    RIGHT_MOVING = "R"
    LEFT_MOVING = "L"


@dataclass(frozen=True)
class RindlerModeSpec:
    Omega: float
    wedge: Wedge = Wedge.RIGHT
    direction: Direction = Direction.RIGHT_MOVING

    def __post_init__(self):
        if not math.isfinite(self.Omega) or self.Omega <= 0.0:
            raise GeometryError(f"Rindler frequency must be positive, got {self.Omega}")
        object.__setattr__(self, "wedge", Wedge(self.wedge))
        object.__setattr__(self, "direction", Direction(self.direction))

    @property
    def label(self) -> str:
        return f"{self.direction.value}{self.wedge.value}"


@dataclass(frozen=True)
class ChainGeometry:
    """
    Oscillator chain at rest in Rindler space

    Positions are co-moving coordinates z-bar; the collective-mode normalization
    defaults to sqrt(M), which makes sigma_k bosonic for M oscillators.
    """
    a: float
    positions: Tuple[float, ...]
    c: float = 1.0
    omega: float = 1.0
    normalization: Optional[float] = None
    density: Optional[float] = None

    def __post_init__(self):
        if not self.a > 0.0:
            raise GeometryError(f"Proper acceleration must be positive, got {self.a}")
        if not self.c > 0.0:
            raise GeometryError(f"Speed of light must be positive, got {self.c}")
        positions = tuple(float(z) for z in self.positions)
        if not positions:
            raise GeometryError("A chain needs at least one oscillator")
        if not all(math.isfinite(z) for z in positions):
            raise GeometryError("Oscillator positions must be finite")
        object.__setattr__(self, "positions", positions)
        if self.normalization is None:
            object.__setattr__(self, "normalization", math.sqrt(len(positions)))
        elif self.normalization <= 0.0:
            raise GeometryError(f"Normalization must be positive, got {self.normalization}")

    @property
    def size(self) -> int:
        return len(self.positions)

    @property
    def z_bar(self) -> np.ndarray:
        return np.asarray(self.positions)

    def k_omega(self, spec: RindlerModeSpec) -> float:
        """Wavenumber +-Omega a / c^2 of the collective mode a Rindler mode couples to"""
        k = spec.Omega * self.a / self.c ** 2
        return k if spec.direction == Direction.RIGHT_MOVING else -k

    @property
    def main_lobe_halfwidth(self) -> float:
        """First null 2 pi / (M pitch) of the chain's Dirichlet kernel; 0 when the chain has no extent"""
        if self.size < 2:
            return 0.0
        pitch = (max(self.positions) - min(self.positions)) / (self.size - 1)
        if pitch == 0.0:
            return 0.0
        return 2.0 * math.pi / (self.size * pitch)

    def proper_acceleration(self, z_bar: ArrayLike) -> ArrayLike:
        return self.a * np.exp(-self.a * np.asarray(z_bar) / self.c ** 2)

    def proper_frequency(self, z_bar: ArrayLike) -> ArrayLike:
        return self.omega * np.exp(-self.a * np.asarray(z_bar) / self.c ** 2)


def uniform_chain(size: int, spacing: float, a: float = 1.0, c: float = 1.0, omega: float = 1.0, start: float = 0.0) -> ChainGeometry:
    """M oscillators at z-bar = start + m * spacing, m = 0..M-1"""
    if size < 1:
        raise GeometryError(f"Chain size must be at least 1, got {size}")
    if not spacing > 0.0:
        raise GeometryError(f"Chain spacing must be positive, got {spacing}")
    positions = tuple(start + m * spacing for m in range(size))
    return ChainGeometry(a=a, positions=positions, c=c, omega=omega, density=1.0 / spacing)


def trajectory(geom: ChainGeometry, z_bar: ArrayLike, tau: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """t = (c/a) e^{a zbar/c^2} sinh(a tau/c), z = (c^2/a) e^{a zbar/c^2} cosh(a tau/c)"""
    a, c = geom.a, geom.c
    scale = np.exp(a * np.asarray(z_bar, dtype=np.float64) / c ** 2)
    phase = a * np.asarray(tau, dtype=np.float64) / c
    t = (c / a) * scale * np.sinh(phase)
    z = (c ** 2 / a) * scale * np.cosh(phase)
    return t, z


def hyperbola_invariant(geom: ChainGeometry, t: ArrayLike, z: ArrayLike) -> ArrayLike:
    """z^2 - c^2 t^2, constant (c^2/a)^2 e^{2a zbar/c^2} along a worldline"""
    return np.asarray(z) ** 2 - geom.c ** 2 * np.asarray(t) ** 2


def rindler_mode_value(spec: RindlerModeSpec, t: ArrayLike, z: ArrayLike, c: float = 1.0):
    """
    Rindler mode function

        phi_R1 = Omega^{-1/2} (z/c - t)^{i Omega} theta(z/c - t)
        phi_R2 = Omega^{-1/2} (t - z/c)^{-i Omega} theta(t - z/c)

    Left-moving modes are the z -> -z image of the right-moving ones. The value on the
    boundary of the support is 0.
    """
    t = np.asarray(t, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if spec.direction == Direction.LEFT_MOVING:
        z = -z
    if spec.wedge == Wedge.RIGHT:
        u, exponent = z / c - t, 1.0
    else:
        u, exponent = t - z / c, -1.0
    support = u > 0.0
    safe = np.where(support, u, 1.0)
    value = np.where(support, np.exp(1j * exponent * spec.Omega * np.log(safe)) / math.sqrt(spec.Omega), 0.0)
    if value.ndim == 0:
        return complex(value)
    return value


def worldline_phase(geom: ChainGeometry, spec: RindlerModeSpec, z_bar: float, tau: ArrayLike) -> ArrayLike:
    """Phase Omega [ln(c/a) + a zbar/c^2 - a tau/c] of phi_R1 along a worldline (unwrapped)"""
    return spec.Omega * (math.log(geom.c / geom.a) + geom.a * z_bar / geom.c ** 2 - geom.a * np.asarray(tau) / geom.c)


@dataclass(frozen=True)
class WorldlineFit:
    slope: float
    intercept: float
    expected_slope: float
    expected_intercept: float
    fit_residual: float
    modulus_spread: float

    @property
    def slope_error(self) -> float:
        return abs(self.slope - self.expected_slope)

    @property
    def intercept_error(self) -> float:
        """Intercept mismatch modulo 2 pi"""
        gap = (self.intercept - self.expected_intercept + math.pi) % (2.0 * math.pi) - math.pi
        return abs(gap)


def worldline_phase_fit(geom: ChainGeometry, spec: RindlerModeSpec, z_bar: float, taus: Sequence[float]) -> WorldlineFit:
    """
    Fit the phase of a right-wedge, right-moving mode along the worldline of one oscillator

    Returns:
        WorldlineFit with the least-squares line through the unwrapped phase, the expected
        slope -Omega a/c and intercept Omega (ln(c/a) + a zbar/c^2), the largest fit
        residual and the spread of |phi| along the worldline
    """
    if spec.wedge != Wedge.RIGHT or spec.direction != Direction.RIGHT_MOVING:
        raise GeometryError("Worldline phase fits apply to right-moving right-wedge modes")
    taus = np.asarray(taus, dtype=np.float64)
    if taus.size < 2:
        raise GeometryError("A phase fit needs at least two time points")
    t, z = trajectory(geom, z_bar, taus)
    values = rindler_mode_value(spec, t, z, geom.c)
    phase = np.unwrap(np.angle(values))
    slope, intercept = np.polyfit(taus, phase, 1)
    residual = float(np.max(np.abs(phase - (slope * taus + intercept))))
    modulus = np.abs(values)
    expected = worldline_phase(geom, spec, z_bar, 0.0)
    return WorldlineFit(
        slope=float(slope),
        intercept=float(intercept),
        expected_slope=-spec.Omega * geom.a / geom.c,
        expected_intercept=float(expected),
        fit_residual=residual,
        modulus_spread=float(modulus.max() - modulus.min()),
    )


def collective_coupling(geom: ChainGeometry, k: ArrayLike, spec: RindlerModeSpec):
    """S(k, Omega) = (1/N) sum_m e^{-i k zbar_m} e^{i k_Omega zbar_m}"""
    k_arr = np.asarray(k, dtype=np.float64)
    delta = geom.k_omega(spec) - k_arr
    S = np.exp(1j * np.multiply.outer(delta, geom.z_bar)).sum(axis=-1) / geom.normalization
    if S.ndim == 0:
        return complex(S)
    return S


def collective_mode_norm(geom: ChainGeometry) -> float:
    """[sigma_k, sigma_k^dag] = M / N^2 for independent bosonic oscillators"""
    return geom.size / geom.normalization ** 2


@dataclass(frozen=True, eq=False)
class SelectivityReport:
    k_grid: Tuple[float, ...]
    omega_grid: Tuple[float, ...]
    magnitude: np.ndarray = field(repr=False)
    on_resonance: Tuple[float, ...]
    off_resonance: Tuple[float, ...]
    dominance: float

    def rows(self):
        """CSV rows: k followed by |S| for every Omega"""
        for k, row in zip(self.k_grid, self.magnitude):
            yield [k] + [float(v) for v in row]


def coupling_selectivity_report(
    geom: ChainGeometry,
    omega_grid: Sequence[float],
    k_grid: Sequence[float],
    direction: Direction = Direction.RIGHT_MOVING,
) -> SelectivityReport:
    """
    |S(k, Omega)| over a grid and its diagonal dominance

    For every Omega the on-resonance value |S(k_Omega, Omega)| is compared with the
    largest |S| on grid rows outside the main lobe, |k - k_Omega| >= 2 pi / (M pitch);
    the dominance statistic is the smallest of these ratios. It is infinite when no row
    lies outside the lobe and 1 for a single oscillator, whose |S| is flat in k. On a
    dense grid it saturates at the first-sidelobe ratio of the Dirichlet kernel (about
    4.6); it grows with M only on grids that skip the sidelobes, such as the resonant one.
    """
    if not len(omega_grid) or not len(k_grid):
        raise GeometryError("Coupling grids must be non-empty")
    ks = np.asarray(sorted(k_grid), dtype=np.float64)
    omegas = tuple(float(w) for w in omega_grid)
    specs = [RindlerModeSpec(w, Wedge.RIGHT, direction) for w in omegas]
    magnitude = np.column_stack([np.abs(collective_coupling(geom, ks, spec)) for spec in specs])
    lobe = geom.main_lobe_halfwidth

    on, off = [], []
    for j, spec in enumerate(specs):
        k0 = geom.k_omega(spec)
        on.append(abs(collective_coupling(geom, k0, spec)))
        column = magnitude[:, j]
        far = np.abs(ks - k0) >= lobe
        off.append(float(column[far].max()) if far.any() else 0.0)
    ratios = [o / f if f > 0.0 else math.inf for o, f in zip(on, off)]
    dominance = min(ratios)
    logger.debug(f"Selectivity over {len(omegas)} frequencies for M={geom.size}: dominance {dominance:.3f}")
    return SelectivityReport(tuple(float(k) for k in ks), omegas, magnitude, tuple(on), tuple(off), dominance)


def resonant_k_grid(geom: ChainGeometry, omega_grid: Sequence[float]) -> Tuple[float, ...]:
    """k_Omega of every grid frequency for right-moving modes"""
    return tuple(sorted(geom.k_omega(RindlerModeSpec(w)) for w in omega_grid))


def coupling_k_grid(
    geom: ChainGeometry,
    omega_grid: Sequence[float],
    k_min: Optional[float] = None,
    k_max: Optional[float] = None,
    points: Optional[int] = None,
) -> Tuple[float, ...]:
    """Uniform k axis when one is given, the resonant wavenumbers otherwise"""
    axis = (k_min, k_max, points)
    if all(v is None for v in axis):
        return resonant_k_grid(geom, omega_grid)
    if any(v is None for v in axis):
        raise GeometryError("A k axis needs k_min, k_max and points together")
    if points < 2 or not k_max > k_min:
        raise GeometryError(f"Invalid k axis [{k_min}, {k_max}] with {points} points")
    return tuple(float(k) for k in np.linspace(k_min, k_max, points))
