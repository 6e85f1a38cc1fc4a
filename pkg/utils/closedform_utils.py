"""
Analytical states of the chain/field system.

Every constructor returns a ClosedFormResult whose leakage is the norm deficit of the
truncated state, max(0, 1 - ||psi||^2). States written in a Bogoliubov frame are built
as the same polynomial in bare operators, dressed by the frame's squeeze unitary on a
padded working register and projected back onto the requested register.
"""
import math
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from utils.fock_utils import (
    DensityMatrix,
    FockOperator,
    ModeRegister,
    PureState,
    annihilation,
    apply_exp_series,
    check_dimension_budget,
    creation,
    make_register,
    restrict_state,
    tail_policy_cutoff,
    vacuum_state,
)
from utils.state_utils import (
    SINGLE_CHAIN,
    TWO_CHAIN,
    GammaLike,
    ModeLayout,
    SqueezedFrame,
    as_gamma,
    bogoliubov_frame,
    require_modes,
    two_mode_squeezed_vacuum,
)

logger = logging.getLogger(__name__)

StateOrDensity = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class ClosedFormResult:
    """A constructed analytical state tagged with the formula it came from"""
    state: StateOrDensity
    construction: str
    leakage: float

    def __post_init__(self):
        if not self.construction:
            raise ValueError("Closed-form results need a construction tag")
        object.__setattr__(self, "leakage", max(0.0, float(self.leakage)))


def _norm_deficit(state: PureState) -> float:
    return max(0.0, 1.0 - state.norm ** 2)


def _result(state: PureState, construction: str) -> ClosedFormResult:
    leakage = _norm_deficit(state)
    return ClosedFormResult(state.with_leakage(leakage), construction, leakage)


def _exp_creation(exponent: FockOperator, state: PureState) -> PureState:
    """Exponential of a pure-creation polynomial; terminates by nilpotency on the register"""
    return apply_exp_series(exponent, state, tol=0.0)


def _creation_slices(weight: float, gamma: float) -> int:
    """
    Slices for a pure-creation exponent applied to a gamma-squeezed input

    A large exponent acting on a geometric state cancels term against term in floating
    point. Sliced, every partial product stays geometric with ratio at most one and
    no term outgrows the input it is summed into.
    """
    step = 1.0 - abs(gamma)
    return max(1, int(math.ceil(weight / step)))


def _trig(g: float, tau: float) -> Tuple[float, float]:
    phase = g * tau
    return math.cos(phase), math.sin(phase)


def psi_single_chain(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = SINGLE_CHAIN,
) -> ClosedFormResult:
    """
    sqrt(1-gamma^2) exp[gamma b2^dag (cos(g tau) b1^dag - i sin(g tau) sigma^dag)] |G>|0_R>

    Args:
        gamma: Squeezing parameter
        g: Coupling
        tau: Rindler time
        register: Register holding the chain mode and both field modes
        layout: Mode labels (chain sigma coupled to b1)

    Returns:
        ClosedFormResult tagged "single-chain"

    Raises:
        SqueezeParameterError: |gamma| >= 1
        MissingModeError: register lacks a mode
    """
    gamma = as_gamma(gamma)
    chain = layout.chains[0]
    b1, b2 = layout.field
    require_modes(register, (chain, b1, b2))
    c, s = _trig(g, tau)
    exponent = (creation(register, b2) @ (creation(register, b1) * c - creation(register, chain) * (1j * s))) * gamma
    state = _exp_creation(exponent, vacuum_state(register)).scaled(math.sqrt(1.0 - gamma ** 2))
    return _result(state, "single-chain")


def psi_single_chain_minkowski(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = SINGLE_CHAIN,
) -> ClosedFormResult:
    """Cross-check path: exp[gamma b2^dag ((cos-1) b1^dag - i sin sigma^dag)] |G>|0_M>"""
    gamma = as_gamma(gamma)
    chain = layout.chains[0]
    b1, b2 = layout.field
    require_modes(register, (chain, b1, b2))
    c, s = _trig(g, tau)
    exponent = (creation(register, b2) @ (creation(register, b1) * (c - 1.0) - creation(register, chain) * (1j * s))) * gamma
    vacuum = two_mode_squeezed_vacuum(gamma, b1, b2, register)
    slices = _creation_slices(abs(gamma) * math.hypot(c - 1.0, s), gamma)
    state = apply_exp_series(exponent, vacuum, tol=0.0, substeps=slices)
    return _result(state, "single-chain/minkowski")


def _two_chain_exponent(register: ModeRegister, gamma: float, c: float, s: float, layout: ModeLayout) -> FockOperator:
    (s1, s2), (b1, b2) = layout.chains, layout.field
    left = creation(register, b1) * c - creation(register, s1) * (1j * s)
    right = creation(register, b2) * c - creation(register, s2) * (1j * s)
    return (left @ right) * gamma


def psi_two_chain(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = TWO_CHAIN,
) -> ClosedFormResult:
    """
    sqrt(1-gamma^2) exp[gamma (cos b1^dag - i sin sigma1^dag)(cos b2^dag - i sin sigma2^dag)] |G>|0_R>

    The layout relabels the modes, so the cavity toy model shares this constructor.
    """
    gamma = as_gamma(gamma)
    require_modes(register, layout.modes)
    c, s = _trig(g, tau)
    exponent = _two_chain_exponent(register, gamma, c, s, layout)
    state = _exp_creation(exponent, vacuum_state(register)).scaled(math.sqrt(1.0 - gamma ** 2))
    return _result(state, "two-chain")


def psi_two_chain_minkowski(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = TWO_CHAIN,
) -> ClosedFormResult:
    """
    Cross-check path on the Minkowski vacuum:
    exp[(gamma/2)((cos 2g tau - 1)(b1^dag b2^dag + s1^dag s2^dag) - i sin 2g tau (b2^dag s1^dag + b1^dag s2^dag))] |G>|0_M>
    """
    gamma = as_gamma(gamma)
    require_modes(register, layout.modes)
    (s1, s2), (b1, b2) = layout.chains, layout.field
    c2, s2g = _trig(2.0 * g, tau)
    cb1, cb2 = creation(register, b1), creation(register, b2)
    cs1, cs2 = creation(register, s1), creation(register, s2)
    exponent = ((cb1 @ cb2 + cs1 @ cs2) * (c2 - 1.0) - (cb2 @ cs1 + cb1 @ cs2) * (1j * s2g)) * (0.5 * gamma)
    vacuum = two_mode_squeezed_vacuum(gamma, b1, b2, register)
    slices = _creation_slices(abs(gamma) * math.hypot(c2 - 1.0, s2g), gamma)
    state = apply_exp_series(exponent, vacuum, tol=0.0, substeps=slices)
    return _result(state, "two-chain/minkowski")


def unruh_coefficients(gamma: float, g: float, tau: float) -> Dict[str, complex]:
    """
    Coefficients of the Unruh-Minkowski form

    Returns:
        Dict with prefactor (1-gamma^2)/(1-gamma^2 cos), x (a2^dag sigma^dag exponent),
        y (a1^dag a2^dag exponent) and x_intermediate (exponent of (a2^dag + gamma a1) sigma^dag)
    """
    c, s = _trig(g, tau)
    denom = 1.0 - gamma ** 2 * c
    return {
        "prefactor": (1.0 - gamma ** 2) / denom,
        "x": -1j * gamma * math.sqrt(1.0 - gamma ** 2) * s / denom,
        "y": -gamma * (1.0 - c) / denom,
        "x_intermediate": -1j * gamma * s / math.sqrt(1.0 - gamma ** 2),
    }


def working_cutoff(cutoff: int, tail_ratio: float, padding: Optional[int] = None) -> int:
    """Cutoff of the padded register a frame construction is evaluated on"""
    padding = settings.frame_padding if padding is None else padding
    if tail_ratio >= 1.0:
        return 2 * cutoff + padding
    needed = tail_policy_cutoff(tail_ratio) if tail_ratio > 0.0 else 1
    return max(cutoff + padding, needed + padding)


def _working_register(register: ModeRegister, tail_ratio: float) -> ModeRegister:
    cutoff = working_cutoff(max(register.cutoffs), tail_ratio)
    work = register.with_cutoffs({label: max(c, cutoff) for label, c in zip(register.modes, register.cutoffs)})
    check_dimension_budget(work)
    return work


def _dress_onto(bare: PureState, frames: Sequence[SqueezedFrame], register: ModeRegister) -> PureState:
    state = bare
    for frame in frames:
        state = frame.dress(state)
    return restrict_state(state, register).with_leakage(0.0)


def psi_unruh_minkowski(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = SINGLE_CHAIN,
) -> ClosedFormResult:
    """
    Single-chain state in the Unruh-Minkowski frame

    (1-gamma^2)/(1-gamma^2 cos) exp[x a2^dag sigma^dag] exp[y a1^dag a2^dag] |G>|0_M>
    with x, y from unruh_coefficients and a1, a2 the frame of (b1, b2).

    Since a_i = W^dag b_i W and |0_M> = W^dag |0_R>, the same polynomial in b1^dag, b2^dag
    on the Rindler vacuum, dressed by W^dag, is this state exactly. The bare form is pure
    creation, so it is built without truncation error on a padded register and dressed once.
    """
    gamma = as_gamma(gamma)
    chain = layout.chains[0]
    b1, b2 = layout.field
    require_modes(register, (chain, b1, b2))
    coeffs = unruh_coefficients(gamma, g, tau)
    ratio = math.hypot(abs(coeffs["x"]), abs(coeffs["y"]))
    work = _working_register(register, max(ratio, abs(gamma)))

    bare = _exp_creation(creation(work, b1) @ creation(work, b2) * coeffs["y"], vacuum_state(work))
    bare = _exp_creation(creation(work, b2) @ creation(work, chain) * coeffs["x"], bare)
    bare = bare.scaled(coeffs["prefactor"])
    frame = bogoliubov_frame(gamma, register, (b1, b2))
    state = _dress_onto(bare, [frame], register)
    logger.debug(f"Unruh-Minkowski state at tau={tau} built on working cutoff {max(work.cutoffs)}")
    return _result(state, "unruh-minkowski")


def psi_unruh_minkowski_intermediate(
    gamma: GammaLike,
    g: float,
    tau: float,
    register: ModeRegister,
    layout: ModeLayout = SINGLE_CHAIN,
) -> ClosedFormResult:
    """
    Frame form before reordering:
    (1-gamma^2)/(1-gamma^2 cos) exp[x' (a2^dag + gamma a1) sigma^dag] exp[y a1^dag a2^dag] |G>|0_M>
    """
    gamma = as_gamma(gamma)
    chain = layout.chains[0]
    b1, b2 = layout.field
    require_modes(register, (chain, b1, b2))
    coeffs = unruh_coefficients(gamma, g, tau)
    ratio = math.hypot(abs(coeffs["x_intermediate"]), abs(coeffs["y"]))
    work = _working_register(register, max(ratio, abs(gamma)))

    bare = _exp_creation(creation(work, b1) @ creation(work, b2) * coeffs["y"], vacuum_state(work))
    mixed = (creation(work, b2) + annihilation(work, b1) * gamma) @ creation(work, chain)
    # sigma^dag makes the exponent nilpotent, so the series still terminates
    bare = _exp_creation(mixed * coeffs["x_intermediate"], bare).scaled(coeffs["prefactor"])
    frame = bogoliubov_frame(gamma, register, (b1, b2))
    return _result(_dress_onto(bare, [frame], register), "unruh-minkowski/intermediate")


def psi_duality(
    gamma: GammaLike,
    g: float,
    tau: float,
    a_frame: SqueezedFrame,
    b_frame: SqueezedFrame,
    register: Optional[ModeRegister] = None,
) -> ClosedFormResult:
    """
    sqrt(1-gamma^2) exp[gamma (cos B1^dag - i sin A1^dag)(cos B2^dag - i sin A2^dag)] |0_B>|0_A>

    Evaluated as the bare-mode polynomial on the bare vacuum, dressed by both frames' squeeze
    unitaries; frame operators and frame vacua follow from the sources by the same conjugation.

    Args:
        gamma: Squeezing parameter of the state
        g: Coupling
        tau: Rindler time
        a_frame: Frame playing system A (bare_frame of the chains, or the Unruh-Minkowski frame)
        b_frame: Frame playing system B (bare_frame of the field, or the collective B-frame)
        register: Target register (defaults to the A frame's register)

    Returns:
        ClosedFormResult tagged "duality"
    """
    gamma = as_gamma(gamma)
    register = register or a_frame.register
    require_modes(register, a_frame.source + b_frame.source)
    c, s = _trig(g, tau)
    ratio = max(abs(gamma), abs(a_frame.gamma), abs(b_frame.gamma))
    dressed = [f for f in (a_frame, b_frame) if f.gamma != 0.0]
    work = _working_register(register, ratio) if dressed else register

    (a1, a2), (m1, m2) = a_frame.source, b_frame.source
    left = creation(work, m1) * c - creation(work, a1) * (1j * s)
    right = creation(work, m2) * c - creation(work, a2) * (1j * s)
    bare = _exp_creation((left @ right) * gamma, vacuum_state(work)).scaled(math.sqrt(1.0 - gamma ** 2))
    state = _dress_onto(bare, dressed, register) if dressed else bare
    return _result(state, "duality")


def thermal_density_matrix(label: str, cutoff: int, p: np.ndarray) -> DensityMatrix:
    register = make_register([label], [cutoff])
    leakage = max(0.0, 1.0 - float(np.sum(p)))
    return DensityMatrix(register, np.diag(p).astype(np.complex128), leakage)


def thermal_ratio(gamma: float, weight: float, other: float) -> float:
    """Geometric ratio gamma^2 weight^2 / (1 - gamma^2 other^2) of a thermal marginal"""
    return gamma ** 2 * weight ** 2 / (1.0 - gamma ** 2 * other ** 2)


def _geometric(gamma: float, weight: float, other: float, cutoff: int) -> np.ndarray:
    m = np.arange(cutoff + 1)
    base = 1.0 - gamma ** 2 * other ** 2
    return (1.0 - gamma ** 2) * np.power(gamma ** 2 * weight ** 2, m) / np.power(base, m + 1)


def rho_b1_thermal(gamma: GammaLike, g: float, tau: float, cutoff: int, label: str = "b1") -> DensityMatrix:
    """p_m = (1-gamma^2) gamma^(2m) cos^(2m) / (1 - gamma^2 sin^2)^(m+1)"""
    gamma = as_gamma(gamma)
    c, s = _trig(g, tau)
    return thermal_density_matrix(label, cutoff, _geometric(gamma, c, s, cutoff))


def rho_sigma_thermal(gamma: GammaLike, g: float, tau: float, cutoff: int, label: str = "sigma") -> DensityMatrix:
    """Chain marginal: rho_b1_thermal with sin and cos exchanged"""
    gamma = as_gamma(gamma)
    c, s = _trig(g, tau)
    return thermal_density_matrix(label, cutoff, _geometric(gamma, s, c, cutoff))


def thermal_mean(ratio: float) -> float:
    if ratio >= 1.0:
        raise ValueError(f"Geometric ratio must be below 1, got {ratio}")
    return ratio / (1.0 - ratio)


def thermal_entropy(ratio: float) -> float:
    """Entropy -ln(1-x) - x ln(x)/(1-x) of the geometric distribution (1-x) x^m"""
    if ratio <= 0.0:
        return 0.0
    if ratio >= 1.0:
        raise ValueError(f"Geometric ratio must be below 1, got {ratio}")
    return -math.log1p(-ratio) - ratio * math.log(ratio) / (1.0 - ratio)


def pair_squeezing(gamma: GammaLike) -> float:
    """Squeezing -2 gamma/(1+gamma^2) of the Unruh-Minkowski pair state at g tau = pi"""
    gamma = as_gamma(gamma)
    return -2.0 * gamma / (1.0 + gamma ** 2)


def pair_correlation_closed(gamma: GammaLike) -> float:
    """<a1^dag a2^dag a2 a1> = lam^2 (1+lam^2)/(1-lam^2)^2 for the two-mode squeezed state of parameter lam"""
    lam = pair_squeezing(gamma)
    return lam ** 2 * (1.0 + lam ** 2) / (1.0 - lam ** 2) ** 2


def pair_correlation(state: PureState, frame: SqueezedFrame) -> float:
    """<psi| F1^dag F2^dag F2 F1 |psi> = ||F2 F1 psi||^2 with frame operators on the state's register"""
    if frame.register != state.register:
        frame = frame.on_register(state.register)
    lowered = frame.op2.apply(frame.op1.apply(state))
    return lowered.norm ** 2
