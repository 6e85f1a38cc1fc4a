"""
Classical field/oscillator-chain normal modes for a single wavenumber.

The coupled equations

    phi'' + c^2 k^2 phi - eps psi' = 0
    psi'' + omega^2 psi + eps phi' = 0

are solved exactly as a pair of positive-frequency normal modes with phi(0) = 1,
psi(0) = 0, and independently by fixed-step RK4 on (phi, phi', psi, psi').
"""
import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14


class DegenerateModeError(Exception):
    """Raised when the two normal-mode frequencies coincide (eps = 0 at resonance)"""
    pass


class StepConvergenceError(Exception):
    """Raised when halving the RK4 step changes the trace by more than the tolerance"""
    pass


@dataclass(frozen=True)
class ClassicalModeParams:
    omega: float
    k: float
    c: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError(f"Oscillator frequency must be positive, got {self.omega}")
        if not self.epsilon >= 0.0:
            raise ValueError(f"Coupling epsilon must be non-negative, got {self.epsilon}")
        if not self.c > 0.0:
            raise ValueError(f"Wave speed must be positive, got {self.c}")
        if not math.isfinite(self.k):
            raise ValueError(f"Wavenumber must be finite, got {self.k}")

    @property
    def ck(self) -> float:
        """Field frequency c|k|"""
        return self.c * abs(self.k)

    @property
    def detuning(self) -> float:
        return self.omega - self.ck


@dataclass(frozen=True, eq=False)
class ModeTrace:
    tau: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    nu_plus: float
    nu_minus: float
    rabi: float
    phi_dot: Optional[np.ndarray] = field(default=None, repr=False)
    psi_dot: Optional[np.ndarray] = field(default=None, repr=False)
    halving_error: float = 0.0

    @property
    def step(self) -> float:
        return float(self.tau[1] - self.tau[0]) if self.tau.size > 1 else 0.0


def _detuned_squares(params: ClassicalModeParams) -> Tuple[float, float, float]:
    """(sqrt(disc), omega^2 - nu_plus^2, omega^2 - nu_minus^2) without cancellation"""
    w2, f2, e2 = params.omega ** 2, params.ck ** 2, params.epsilon ** 2
    disc = (w2 + f2 + e2) ** 2 - 4.0 * w2 * f2
    if disc < -1e-12 * (w2 + f2 + e2) ** 2:
        raise ValueError(f"Negative discriminant {disc} for {params}")
    root = math.sqrt(max(disc, 0.0))
    return root, (w2 - f2 - e2 - root) / 2.0, (w2 - f2 - e2 + root) / 2.0


def dispersion(params: ClassicalModeParams) -> Tuple[float, float]:
    """
    Normal-mode frequencies

    nu^2 = (omega^2 + c^2 k^2 + eps^2 +- sqrt((omega^2 + c^2 k^2 + eps^2)^2 - 4 c^2 omega^2 k^2)) / 2,
    with nu_minus taken from nu_plus nu_minus = c omega |k| for accuracy.

    Returns:
        (nu_plus, nu_minus), both non-negative
    """
    root, _, _ = _detuned_squares(params)
    total = params.omega ** 2 + params.ck ** 2 + params.epsilon ** 2
    nu_plus = math.sqrt((total + root) / 2.0)
    nu_minus = params.omega * params.ck / nu_plus
    return nu_plus, nu_minus


def rabi_frequency(params: ClassicalModeParams) -> float:
    """|nu_plus| - |nu_minus|, which equals sqrt((omega - c|k|)^2 + eps^2)"""
    return math.hypot(params.detuning, params.epsilon)


def _coefficients(params: ClassicalModeParams):
    nu_plus, nu_minus = dispersion(params)
    rabi = rabi_frequency(params)
    denom = rabi * params.omega * (params.omega + params.ck)
    if denom <= DEGENERACY_TOL * params.omega ** 3:
        raise DegenerateModeError(f"Normal modes are degenerate for {params}")
    _, wp, wm = _detuned_squares(params)
    c_minus = nu_plus * wm / denom
    c_plus = -nu_minus * wp / denom
    K = params.epsilon * nu_plus * nu_minus / denom
    return nu_plus, nu_minus, rabi, c_plus, c_minus, K


def coupling_amplitude(params: ClassicalModeParams) -> float:
    """K = eps c|k| / (Omega_R (omega + c|k|)); max |psi|^2 = 4 K^2"""
    if params.epsilon == 0.0:
        return 0.0
    return _coefficients(params)[5]


def mode_solution(params: ClassicalModeParams, tau):
    """
    Exact solution at z-bar = 0

        phi = C+ e^{-i nu+ tau} + C- e^{-i nu- tau}
        psi = -i K (e^{-i nu+ tau} - e^{-i nu- tau})

    with C- = nu+ (omega^2 - nu-^2)/D, C+ = 1 - C-, K = eps nu+ nu-/D and
    D = nu+ (omega^2 - nu-^2) - nu- (omega^2 - nu+^2) = Omega_R omega (omega + c|k|).

    Raises:
        DegenerateModeError: nu+ = nu- (eps = 0 at exact resonance)
    """
    nu_plus, nu_minus, _, c_plus, c_minus, K = _coefficients(params)
    tau = np.asarray(tau, dtype=np.float64)
    e_plus = np.exp(-1j * nu_plus * tau)
    e_minus = np.exp(-1j * nu_minus * tau)
    phi = c_plus * e_plus + c_minus * e_minus
    psi = -1j * K * (e_plus - e_minus)
    if phi.ndim == 0:
        return complex(phi), complex(psi)
    return phi, psi


def initial_velocities(params: ClassicalModeParams) -> Tuple[complex, complex]:
    """phi'(0) and psi'(0) of the normal-mode solution; phi'(0) = -i c|k| at exact degeneracy"""
    try:
        nu_plus, nu_minus, _, c_plus, c_minus, K = _coefficients(params)
    except DegenerateModeError:
        return -1j * params.ck, 0.0j
    phi_dot = -1j * (c_plus * nu_plus + c_minus * nu_minus)
    psi_dot = -K * (nu_plus - nu_minus)
    return complex(phi_dot), complex(psi_dot)


def generator_matrix(params: ClassicalModeParams) -> np.ndarray:
    """First-order system y' = M y for y = (phi, phi', psi, psi')"""
    f2 = params.ck ** 2
    eps = params.epsilon
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-f2, 0.0, 0.0, eps],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, -eps, -params.omega ** 2, 0.0],
    ], dtype=np.complex128)


def _rk4_propagator(M: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step of a linear system is multiplication by this matrix"""
    hM = h * M
    hM2 = hM @ hM
    hM3 = hM2 @ hM
    return np.eye(M.shape[0]) + hM + hM2 / 2.0 + hM3 / 6.0 + hM3 @ hM / 24.0


def _integrate(params: ClassicalModeParams, y0: np.ndarray, steps: int, h: float) -> np.ndarray:
    P = _rk4_propagator(generator_matrix(params), h)
    out = np.empty((steps + 1, 4), dtype=np.complex128)
    out[0] = y0
    for n in range(steps):
        out[n + 1] = P @ out[n]
    return out


def ode_oracle(params: ClassicalModeParams, tau_end: float, dt: float = 1e-3, tol: float = 1e-6, check_halving: bool = True) -> ModeTrace:
    """
    Integrate the coupled equations by fixed-step RK4

    Args:
        params: Mode parameters
        tau_end: Final time
        dt: Requested step; the actual step divides tau_end evenly
        tol: Largest allowed change of (phi, psi) when the step is halved
        check_halving: Run the step-halving comparison

    Returns:
        ModeTrace sampled on the integration grid

    Raises:
        StepConvergenceError: the halved-step run differs by more than tol
    """
    if tau_end <= 0.0 or dt <= 0.0:
        raise ValueError("tau_end and dt must be positive")
    steps = max(1, int(math.ceil(tau_end / dt - 1e-9)))
    h = tau_end / steps
    phi_dot, psi_dot = initial_velocities(params)
    y0 = np.array([1.0, phi_dot, 0.0, psi_dot], dtype=np.complex128)
    ys = _integrate(params, y0, steps, h)

    halving_error = 0.0
    if check_halving:
        fine = _integrate(params, y0, 2 * steps, h / 2.0)[::2]
        halving_error = float(np.max(np.abs(fine[:, [0, 2]] - ys[:, [0, 2]])))
        if halving_error > tol:
            raise StepConvergenceError(f"Step halving changed the trace by {halving_error:.3e} (tol {tol:.1e}, dt {h:.2e})")

    nu_plus, nu_minus = dispersion(params)
    logger.debug(f"RK4 oracle: {steps} steps of {h:.2e}, halving error {halving_error:.2e}")
    return ModeTrace(
        tau=np.linspace(0.0, tau_end, steps + 1),
        phi=ys[:, 0],
        psi=ys[:, 2],
        nu_plus=nu_plus,
        nu_minus=nu_minus,
        rabi=nu_plus - nu_minus,
        phi_dot=ys[:, 1],
        psi_dot=ys[:, 3],
        halving_error=halving_error,
    )


def energy(params: ClassicalModeParams, phi, phi_dot, psi, psi_dot) -> np.ndarray:
    """|phi'|^2 + c^2 k^2 |phi|^2 + |psi'|^2 + omega^2 |psi|^2, conserved since the coupling is gyroscopic"""
    return (np.abs(phi_dot) ** 2 + params.ck ** 2 * np.abs(phi) ** 2
            + np.abs(psi_dot) ** 2 + params.omega ** 2 * np.abs(psi) ** 2)


def trace_energy(params: ClassicalModeParams, trace: ModeTrace) -> np.ndarray:
    return energy(params, trace.phi, trace.phi_dot, trace.psi, trace.psi_dot)


def spectral_peaks(trace: ModeTrace, count: int = 2, stride: int = 1) -> List[float]:
    """
    Frequencies present in phi by linear prediction

    The samples are fitted by an order-`count` recurrence (least squares); the angles of
    the roots of its characteristic polynomial give the frequencies nu = -arg(z)/h.

    Returns:
        Frequencies in descending order
    """
    x = np.asarray(trace.phi)[::stride]
    h = trace.step * stride
    n = x.size
    if n <= 2 * count:
        raise ValueError("Trace too short for the requested number of peaks")
    A = np.column_stack([x[count - j - 1:n - j - 1] for j in range(count)])
    coeffs, *_ = np.linalg.lstsq(A, x[count:], rcond=None)
    roots = np.roots(np.concatenate([[1.0], -coeffs]))
    return sorted((float(-np.angle(z) / h) for z in roots), reverse=True)


@dataclass(frozen=True)
class ScanRow:
    k: float
    kc_over_omega: float
    nu_plus: float
    nu_minus: float
    rabi: float
    max_psi2: float

    def as_list(self) -> List[float]:
        return [self.k, self.kc_over_omega, self.nu_plus, self.nu_minus, self.rabi, self.max_psi2]


SCAN_COLUMNS = ["k", "kc_over_omega", "nu_plus", "nu_minus", "rabi", "max_psi2"]


def max_psi_squared(params: ClassicalModeParams, samples: int = 1001) -> float:
    """Largest |psi|^2 of the closed form over one Rabi period (odd sample count hits the half period)"""
    if params.epsilon == 0.0:
        return 0.0
    period = 2.0 * math.pi / rabi_frequency(params)
    _, psi = mode_solution(params, np.linspace(0.0, period, samples))
    return float(np.max(np.abs(psi) ** 2))


def far_detuned_amplitude(params: ClassicalModeParams) -> float:
    """4 eps^2 c^2 k^2 / (omega^2 - c^2 k^2)^2, valid for |omega - ck| >> eps"""
    return 4.0 * params.epsilon ** 2 * params.ck ** 2 / (params.omega ** 2 - params.ck ** 2) ** 2


def amplitude_scan(omega: float, epsilon: float, k_grid: Sequence[float], c: float = 1.0) -> List[ScanRow]:
    """Per-k dispersion, Rabi frequency and oscillation amplitude of the chain"""
    if not len(k_grid):
        raise ValueError("k grid must be non-empty")
    rows = []
    for k in k_grid:
        params = ClassicalModeParams(omega=omega, k=float(k), c=c, epsilon=epsilon)
        nu_plus, nu_minus = dispersion(params)
        rows.append(ScanRow(
            k=float(k),
            kc_over_omega=params.ck / omega,
            nu_plus=nu_plus,
            nu_minus=nu_minus,
            rabi=rabi_frequency(params),
            max_psi2=max_psi_squared(params),
        ))
    return rows
