"""
Named states and operator frames.

Vacua, two-mode squeezed vacua and the two Bogoliubov frames of the coupled
chain/field system: the Unruh-Minkowski frame on the field pair (b1, b2) and the
collective B-frame on the chain pair (sigma1, sigma2).
"""
import math
import logging
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from utils.fock_utils import (
    FockOperator,
    ModeRegister,
    PureState,
    annihilation,
    apply_unitary_exp,
    identity_operator,
    interior_mask,
    projected_norm,
    vacuum_state,
)

logger = logging.getLogger(__name__)

FIELD_MODES = ("b1", "b2")


class SqueezeParameterError(Exception):
    """Raised for squeezing parameters outside |gamma| < 1 or inconsistent inputs"""
    pass


class MissingModeError(Exception):
    """Raised when a register lacks modes a constructor needs"""
    pass


@dataclass(frozen=True)
class SqueezeParam:
    """Squeezing gamma in (-1, 1); optionally tied to a Rindler frequency by gamma = exp(-pi*Omega)"""
    gamma: float
    omega_rindler: Optional[float] = None

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or abs(gamma) >= 1.0:
            raise SqueezeParameterError(f"Squeezing parameter must satisfy |gamma| < 1, got {gamma}")
        if self.omega_rindler is not None:
            omega = float(self.omega_rindler)
            if omega <= 0.0:
                raise SqueezeParameterError(f"Rindler frequency must be positive, got {omega}")
            if abs(gamma - math.exp(-math.pi * omega)) > 1e-15:
                raise SqueezeParameterError(f"gamma={gamma} inconsistent with Omega={omega}")
            object.__setattr__(self, "omega_rindler", omega)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def from_gamma(cls, gamma: float) -> "SqueezeParam":
        return cls(gamma)

    @classmethod
    def from_omega(cls, omega: float) -> "SqueezeParam":
        if omega <= 0.0:
            raise SqueezeParameterError(f"Rindler frequency must be positive, got {omega}")
        return cls(math.exp(-math.pi * omega), omega)

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> "SqueezeParam":
        """Accepts {"gamma": x} or {"omega": Omega}"""
        has_gamma = data.get("gamma") is not None
        has_omega = data.get("omega") is not None
        if has_gamma == has_omega:
            raise SqueezeParameterError("Exactly one of 'gamma' or 'omega' must be given")
        if has_gamma:
            return cls.from_gamma(float(data["gamma"]))
        return cls.from_omega(float(data["omega"]))

    @property
    def squeezing_r(self) -> float:
        """Read-only rapidity r with gamma = tanh r"""
        return math.atanh(self.gamma)

    @property
    def mean_occupation(self) -> float:
        return self.gamma ** 2 / (1.0 - self.gamma ** 2)

    def __float__(self) -> float:
        return self.gamma


GammaLike = Union[SqueezeParam, float]


def as_gamma(value: GammaLike) -> float:
    """Validated float gamma from a SqueezeParam or a plain number"""
    if isinstance(value, SqueezeParam):
        return value.gamma
    return SqueezeParam(float(value)).gamma


@dataclass(frozen=True)
class ModeLayout:
    """Labels of the chain modes and the field pair; chain i couples to field[i]"""
    chains: Tuple[str, ...]
    field: Tuple[str, str] = FIELD_MODES

    @property
    def modes(self) -> Tuple[str, ...]:
        return tuple(self.chains) + tuple(self.field)

    def register(self, cutoff: int) -> ModeRegister:
        return ModeRegister(self.modes, tuple(cutoff for _ in self.modes))

    def couplings(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(zip(self.chains, self.field))


SINGLE_CHAIN = ModeLayout(("sigma",))
TWO_CHAIN = ModeLayout(("sigma1", "sigma2"))
CAVITY_TOY = ModeLayout(("oscillator1", "oscillator2"), ("cavity1", "cavity2"))


def require_modes(register: ModeRegister, labels: Sequence[str]) -> None:
    missing = [label for label in labels if label not in register.modes]
    if missing:
        raise MissingModeError(f"Register {register.modes} lacks modes {missing}")


def two_mode_squeezed_vacuum(gamma: GammaLike, mode_a: str, mode_b: str, register: ModeRegister) -> PureState:
    """
    sqrt(1-gamma^2) * sum_n gamma^n |n>_A |n>_B, all other modes empty

    Args:
        gamma: Squeezing parameter, signed
        mode_a: First mode label
        mode_b: Second mode label
        register: Register holding both modes

    Returns:
        PureState whose leakage is the truncated tail gamma^(2(n_max+1))

    Raises:
        SqueezeParameterError: |gamma| >= 1
        MissingModeError: a mode is absent
    """
    gamma = as_gamma(gamma)
    require_modes(register, (mode_a, mode_b))
    n_max = min(register.cutoff_of(mode_a), register.cutoff_of(mode_b))
    step = register.stride_of(mode_a) + register.stride_of(mode_b)
    n = np.arange(n_max + 1)
    amps = np.zeros(register.dimension, dtype=np.complex128)
    amps[n * step] = math.sqrt(1.0 - gamma ** 2) * np.power(gamma, n)
    leakage = gamma ** (2 * (n_max + 1))
    return PureState(register, amps, leakage)


def minkowski_vacuum(gamma: GammaLike, register: ModeRegister, field: Tuple[str, str] = FIELD_MODES) -> PureState:
    """Two-mode squeezed field pair tensored with the chain ground state"""
    return two_mode_squeezed_vacuum(gamma, field[0], field[1], register)


def rindler_vacuum(register: ModeRegister, field: Tuple[str, str] = FIELD_MODES) -> PureState:
    require_modes(register, field)
    return vacuum_state(register)


def chain_ground(register: ModeRegister, chains: Optional[Sequence[str]] = None) -> PureState:
    if chains is None:
        chains = [m for m in register.modes if m.startswith("sigma")]
        if not chains:
            raise MissingModeError(f"Register {register.modes} has no chain modes")
    require_modes(register, chains)
    return vacuum_state(register)


def pair_generator(register: ModeRegister, mode_a: str, mode_b: str) -> FockOperator:
    """Anti-Hermitian two-mode squeeze generator a^dag b^dag - a b"""
    a = annihilation(register, mode_a)
    b = annihilation(register, mode_b)
    return a.dagger() @ b.dagger() - a @ b


@dataclass(frozen=True, eq=False)
class SqueezedFrame:
    """
    Two-mode Bogoliubov frame on a source pair (m1, m2)

    F1 = (m1 - s*gamma*m2^dag) / sqrt(1-gamma^2), F2 = (m2 - s*gamma*m1^dag) / sqrt(1-gamma^2)
    with s = +1 for the Unruh-Minkowski frame and s = -1 for the collective B-frame.
    Both operators are materialized on `register`. The frame is generated by the
    squeeze unitary W with F_i = W^dag m_i W, so a polynomial in frame operators acting
    on the frame vacuum equals `dress` applied to the same polynomial in source
    operators acting on the bare vacuum.
    """
    gamma: float
    source: Tuple[str, str]
    sign: int
    register: ModeRegister
    op1: FockOperator
    op2: FockOperator
    vacuum_residuals: Tuple[float, float]

    @property
    def a1(self) -> FockOperator:
        return self.op1

    @property
    def a2(self) -> FockOperator:
        return self.op2

    @property
    def rapidity(self) -> float:
        return math.atanh(self.gamma)

    def generator(self, register: Optional[ModeRegister] = None) -> FockOperator:
        register = register or self.register
        return pair_generator(register, *self.source) * (self.sign * self.rapidity)

    def vacuum(self, register: Optional[ModeRegister] = None) -> PureState:
        return two_mode_squeezed_vacuum(self.sign * self.gamma, self.source[0], self.source[1],
                                        register or self.register)

    def dress(self, state: PureState) -> PureState:
        """Map a bare-mode construction into this frame (apply W^dag)"""
        if self.gamma == 0.0:
            return state
        return apply_unitary_exp(self.generator(state.register), state)

    def undress(self, state: PureState) -> PureState:
        """Inverse of dress (apply W)"""
        if self.gamma == 0.0:
            return state
        return apply_unitary_exp(-self.generator(state.register), state)

    def reconstruct_sources(self) -> Tuple[FockOperator, FockOperator]:
        """Inverse transformation m1 = (F1 + s*gamma*F2^dag)/sqrt(1-gamma^2), likewise m2"""
        scale = 1.0 / math.sqrt(1.0 - self.gamma ** 2)
        sg = self.sign * self.gamma
        m1 = (self.op1 + self.op2.dagger() * sg) * scale
        m2 = (self.op2 + self.op1.dagger() * sg) * scale
        return m1, m2

    def on_register(self, register: ModeRegister) -> "SqueezedFrame":
        return _squeezed_frame(self.gamma, register, self.source, self.sign)


def _squeezed_frame(gamma: float, register: ModeRegister, source: Tuple[str, str], sign: int) -> SqueezedFrame:
    gamma = as_gamma(gamma)
    require_modes(register, source)
    m1 = annihilation(register, source[0])
    m2 = annihilation(register, source[1])
    scale = 1.0 / math.sqrt(1.0 - gamma ** 2)
    sg = sign * gamma
    op1 = (m1 - m2.dagger() * sg) * scale
    op2 = (m2 - m1.dagger() * sg) * scale
    vacuum = two_mode_squeezed_vacuum(sg, source[0], source[1], register)
    residuals = (op1.apply(vacuum).norm, op2.apply(vacuum).norm)
    logger.debug(f"Frame on {source} (gamma={gamma}, sign={sign}): vacuum residuals {residuals}")
    return SqueezedFrame(gamma, tuple(source), sign, register, op1, op2, residuals)


BogoliubovFrame = SqueezedFrame


def bogoliubov_frame(gamma: GammaLike, register: ModeRegister, field: Tuple[str, str] = FIELD_MODES) -> SqueezedFrame:
    """
    Unruh-Minkowski frame a1 = (b1 - gamma b2^dag)/sqrt(1-gamma^2), a2 = (b2 - gamma b1^dag)/sqrt(1-gamma^2)

    The frame's vacuum_residuals report ||a1|0_M>|| and ||a2|0_M>|| on this register.
    """
    return _squeezed_frame(as_gamma(gamma), register, field, +1)


def b_frame(gamma: GammaLike, register: ModeRegister, chains: Tuple[str, str] = ("sigma1", "sigma2")) -> SqueezedFrame:
    """Collective frame B1 = (sigma1 + gamma sigma2^dag)/sqrt(1-gamma^2), B2 likewise"""
    return _squeezed_frame(as_gamma(gamma), register, chains, -1)


def bare_frame(register: ModeRegister, modes: Tuple[str, str]) -> SqueezedFrame:
    """Identity frame: the source operators themselves"""
    return _squeezed_frame(0.0, register, modes, +1)


def collective_B_frame(
    gamma: GammaLike, register: ModeRegister, chains: Tuple[str, str] = ("sigma1", "sigma2")
) -> Tuple[FockOperator, FockOperator]:
    frame = b_frame(gamma, register, chains)
    return frame.op1, frame.op2


def b_frame_vacuum(gamma: GammaLike, register: ModeRegister, chains: Tuple[str, str] = ("sigma1", "sigma2")) -> PureState:
    """|0_B> = sqrt(1-gamma^2) exp(-gamma sigma1^dag sigma2^dag)|G>"""
    return two_mode_squeezed_vacuum(-as_gamma(gamma), chains[0], chains[1], register)


def ground_in_b_frame(gamma: GammaLike, register: ModeRegister, chains: Tuple[str, str] = ("sigma1", "sigma2")) -> PureState:
    """sqrt(1-gamma^2) exp(gamma B1^dag B2^dag)|0_B>, which should reproduce the chain ground state"""
    gamma = as_gamma(gamma)
    frame = b_frame(gamma, register, chains)
    return frame.dress(two_mode_squeezed_vacuum(gamma, chains[0], chains[1], register))


def frame_commutator_residuals(frame: SqueezedFrame, exclude_top: int = 2) -> dict:
    """Interior residuals of [F1, F1^dag] = 1, [F2, F2^dag] = 1, [F1, F2] = 0, [F1, F2^dag] = 0"""
    register = frame.register
    mask = interior_mask(register, exclude_top)
    one = identity_operator(register)
    return {
        "[F1,F1+]-1": projected_norm(frame.op1.commutator(frame.op1.dagger()) - one, mask),
        "[F2,F2+]-1": projected_norm(frame.op2.commutator(frame.op2.dagger()) - one, mask),
        "[F1,F2]": projected_norm(frame.op1.commutator(frame.op2), mask),
        "[F1,F2+]": projected_norm(frame.op1.commutator(frame.op2.dagger()), mask),
    }
