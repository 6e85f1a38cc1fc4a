"""
Operator and state identities checked on truncated Fock spaces.

Identities that mix creation and annihilation operators only hold on the part of a
truncated register that the ladder operators cannot push past the cutoff. Each check
restricts its residual to such an interior: the top `exclude_top` levels of every mode
are dropped, and where an operator conserves a sum of occupations that sum is capped
as well. Operator identities report a projected operator 2-norm, state identities a
vector 2-norm.
"""
import math
import cmath
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg, sparse

from app.config import settings
from utils.closedform_utils import psi_single_chain, psi_two_chain, thermal_density_matrix, working_cutoff
from utils.dynamics_utils import h_generic_duality, h_single_chain, h_two_chain
from utils.fock_utils import (
    FockOperator,
    ModeRegister,
    PureState,
    annihilation,
    apply_exp_series,
    basis_state,
    creation,
    interior_mask,
    make_register,
    projected_norm,
    restrict_state,
    tail_policy_cutoff,
    vacuum_state,
)
from utils.state_utils import (
    SINGLE_CHAIN,
    TWO_CHAIN,
    as_gamma,
    b_frame,
    bogoliubov_frame,
    ground_in_b_frame,
    two_mode_squeezed_vacuum,
)

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 1e-8
IDENTITY_CUTOFFS = (6, 8, 10, 12)
ACCEPTANCE_CUTOFF = 10
# residuals at rounding level may wander by this much between cutoffs
MONOTONE_SLACK = 1e-11
# two-mode state checks are cheap, so their working registers use a far tighter tail
STATE_TAIL_TOL = 1e-30


class SingularInputError(Exception):
    """Raised when an identity's coefficients hit a pole"""
    pass


class OracleTruncationError(Exception):
    """Raised when a series oracle fails to converge for the requested parameters"""
    pass


class IdentityReport(BaseModel):
    """Residual of an operator or state identity on a truncated register"""
    name: str = Field(..., description="Identity name")
    residual_norm: float = Field(..., ge=0.0, description="2-norm of LHS - RHS on the interior subspace")
    interior_levels_excluded: int = Field(..., ge=0, description="Top Fock levels per mode excluded from the interior")
    bound: float = Field(..., ge=0.0, description="Tolerance the residual is held to")
    passed: bool = Field(..., description="residual_norm <= bound")
    cutoff: int = Field(..., ge=1, description="Per-mode Fock cutoff of the check register")
    kind: str = Field(default="operator", description="'operator' (projected operator norm) or 'state' (vector norm)")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Check parameters (gamma, s, alpha, ...)")

    model_config = {
        "json_schema_extra": {
            "example": {
                "name": "shift b1",
                "residual_norm": 2.2e-15,
                "interior_levels_excluded": 2,
                "bound": 1.0e-8,
                "passed": True,
                "cutoff": 10,
                "kind": "operator",
                "parameters": {"gamma": 0.5}
            }
        }
    }

    @classmethod
    def evaluate(cls, name: str, residual: float, bound: float, cutoff: int, excluded: int = 2,
                 kind: str = "operator", **parameters: Any) -> "IdentityReport":
        residual = max(0.0, float(residual))
        return cls(name=name, residual_norm=residual, interior_levels_excluded=excluded, bound=float(bound),
                   passed=bool(residual <= bound), cutoff=int(cutoff), kind=kind, parameters=parameters)


def _dense_operator(register: ModeRegister, matrix: np.ndarray) -> FockOperator:
    return FockOperator(register, sparse.csr_matrix(matrix))


def _expm(op: FockOperator) -> FockOperator:
    return _dense_operator(op.register, linalg.expm(op.to_dense()))


def check_shift_identity(
    gamma: float,
    cutoff: int,
    acting: str = "b1",
    exclude_top: int = 2,
    bound: float = DEFAULT_BOUND,
) -> IdentityReport:
    """
    b1 e^{gamma b1^dag b2^dag} - e^{gamma b1^dag b2^dag} b1 - gamma b2^dag e^{gamma b1^dag b2^dag} = 0

    With acting="b2" the roles of the two modes are exchanged.
    """
    gamma = as_gamma(gamma)
    if acting not in ("b1", "b2"):
        raise ValueError(f"acting must be 'b1' or 'b2', got {acting!r}")
    other = "b2" if acting == "b1" else "b1"
    register = make_register(["b1", "b2"], [cutoff, cutoff])
    lower = annihilation(register, acting)
    pair = creation(register, "b1") @ creation(register, "b2")
    E = _expm(pair * gamma)
    residual_op = lower @ E - E @ lower - creation(register, other) @ E * gamma
    mask = interior_mask(register, exclude_top)
    residual = projected_norm(residual_op, mask)
    return IdentityReport.evaluate(f"shift {acting}", residual, bound, cutoff, exclude_top, gamma=gamma)


def _rotation_coefficients(s: complex) -> Tuple[float, complex]:
    """cos|s| and s sin|s|/|s| (the latter tends to s as |s| -> 0)"""
    mod = abs(s)
    sinc = math.sin(mod) / mod if mod > 0.0 else 1.0
    return math.cos(mod), s * sinc


def check_conjugation_identities(
    s: complex,
    cutoff: int,
    chains: Sequence[Tuple[str, str]] = (("sigma1", "b1"), ("sigma2", "b2")),
    bound: float = DEFAULT_BOUND,
) -> List[IdentityReport]:
    """
    Beam-splitter conjugation e^{G} X^dag = (rotated X^dag) e^{G}, G = s sigma^dag b - s* sigma b^dag

        e^{G} sigma^dag = (cos|s| sigma^dag - (s*/|s|) sin|s| b^dag) e^{G}
        e^{G} b^dag     = (cos|s| b^dag + (s/|s|) sin|s| sigma^dag) e^{G}

    Each chain is checked on its own (sigma, b) register. G conserves n_sigma + n_b, so
    the input interior is n_sigma + n_b <= cutoff - 1 and the output n_sigma + n_b <= cutoff.
    """
    s = complex(s)
    cos_s, sin_s = _rotation_coefficients(s)
    reports = []
    for chain, field in chains:
        register = make_register([chain, field], [cutoff, cutoff])
        sig = annihilation(register, chain)
        b = annihilation(register, field)
        generator = sig.dagger() @ b * s - sig @ b.dagger() * s.conjugate()
        U = _expm(generator)
        rows = interior_mask(register, 0, max_total=cutoff)
        cols = interior_mask(register, 0, max_total=cutoff - 1)
        rotated = {
            chain: sig.dagger() * cos_s - b.dagger() * sin_s.conjugate(),
            field: b.dagger() * cos_s + sig.dagger() * sin_s,
        }
        for label, raised in ((chain, sig.dagger()), (field, b.dagger())):
            residual = projected_norm(U @ raised - rotated[label] @ U, rows, cols)
            reports.append(IdentityReport.evaluate(
                f"conjugation {label}", residual, bound, cutoff, 1, s=[s.real, s.imag],
            ))
    return reports


def riccati_coefficient(alpha: complex, beta: complex, lam: complex, t: float = 1.0) -> Tuple[complex, complex]:
    """
    Solution of alpha + f' + 2 beta f + lam f^2 = 0 with f(0) = 0

    beta + lam f = -mu tan(mu t + C), tan C = -beta/mu, mu = sqrt(alpha lam - beta^2),
    evaluated in the equivalent form f = -alpha sin(mu t) / (mu cos(mu t) + beta sin(mu t)),
    which stays finite as mu -> 0 where it becomes -alpha t / (1 + beta t).

    Returns:
        (f(t), F(t)) with F(t) = cos(mu t) + (beta/mu) sin(mu t), the norm factor of the rebased state
    """
    mu = cmath.sqrt(complex(alpha) * lam - complex(beta) ** 2)
    x = mu * t
    sinc = cmath.sin(x) / mu if abs(x) > 1e-8 else t * (1.0 - x * x / 6.0)
    F = cmath.cos(x) + beta * sinc
    if abs(F) < 1e-14:
        raise SingularInputError(f"Riccati solution has a pole at t={t} (alpha={alpha}, beta={beta}, lambda={lam})")
    return -alpha * sinc / F, F


def rebasing_coefficients(A: complex, gamma: float) -> Dict[str, complex]:
    """Riccati inputs of e^{-A b1^dag b2^dag}|0_M> written in the Unruh-Minkowski frame"""
    scale = 1.0 - gamma ** 2
    return {"alpha": A / scale, "beta": A * gamma / scale, "lam": A * gamma ** 2 / scale}


def check_squeeze_rebasing(
    A: complex,
    gamma: float,
    cutoff: int,
    bound: float = DEFAULT_BOUND,
) -> IdentityReport:
    """
    e^{-A b1^dag b2^dag}|0_M> = (1-gamma^2)/(1+A gamma-gamma^2) e^{-A/(1+A gamma-gamma^2) a1^dag a2^dag}|0_M>

    The right side's exponent and prefactor come from riccati_coefficient; the state
    residual is a vector norm on the cutoff register.

    Raises:
        SingularInputError: 1 + A gamma - gamma^2 = 0
    """
    gamma = as_gamma(gamma)
    A = complex(A)
    pole = 1.0 + A * gamma - gamma ** 2
    if abs(pole) < 1e-12:
        raise SingularInputError(f"1 + A*gamma - gamma^2 vanishes for A={A}, gamma={gamma}")
    f, F = riccati_coefficient(**rebasing_coefficients(A, gamma))

    register = make_register(["b1", "b2"], [cutoff, cutoff])
    pair = creation(register, "b1") @ creation(register, "b2")
    lhs = apply_exp_series(pair * (-A), two_mode_squeezed_vacuum(gamma, "b1", "b2", register), tol=0.0)

    ratio = max(abs(gamma), abs(f), abs(gamma - A))
    work_cutoff = cutoff + settings.frame_padding
    if ratio < 1.0:
        work_cutoff = max(work_cutoff, tail_policy_cutoff(ratio, STATE_TAIL_TOL) + settings.frame_padding)
    work = register.with_cutoffs(work_cutoff)
    work_pair = creation(work, "b1") @ creation(work, "b2")
    bare = apply_exp_series(work_pair * f, vacuum_state(work), tol=0.0).scaled(1.0 / F)
    rhs = restrict_state(bogoliubov_frame(gamma, register).dress(bare), register)

    residual = float(np.linalg.norm(lhs.amplitudes - rhs.amplitudes))
    closed_f = -A / pole
    logger.debug(f"Rebasing A={A}: riccati f(1)={f}, closed form {closed_f}")
    return IdentityReport.evaluate(
        "squeeze rebasing", residual, bound, cutoff, 0, kind="state",
        A=[A.real, A.imag], gamma=gamma, f=[f.real, f.imag], riccati_gap=abs(f - closed_f),
    )


def _basis_inputs(register: ModeRegister, max_quanta: int) -> List[PureState]:
    inputs = []
    for index in range(register.dimension):
        occupations = register.occupations(index)
        if sum(occupations) <= max_quanta:
            inputs.append(basis_state(register, dict(zip(register.modes, occupations))))
    return inputs


def check_exp_reordering(
    alpha: complex,
    beta: complex,
    cutoff: int,
    max_quanta: int = 2,
    exclude_top: int = 2,
    bound: float = 1e-9,
) -> IdentityReport:
    """
    e^{alpha a1 sigma^dag} e^{beta a1^dag a2^dag} = e^{alpha beta a2^dag sigma^dag} e^{beta a1^dag a2^dag} e^{alpha a1 sigma^dag}

    Both sides act on every basis state with at most `max_quanta` quanta. a1 sigma^dag
    conserves n_a1 + n_sigma, so the output interior also caps that sum at the cutoff.
    """
    alpha, beta = complex(alpha), complex(beta)
    register = make_register(["a1", "a2", "sigma"], [cutoff, cutoff, cutoff])
    a1 = annihilation(register, "a1")
    a1_up, a2_up, sig_up = creation(register, "a1"), creation(register, "a2"), creation(register, "sigma")
    hop = a1 @ sig_up * alpha
    pair = a1_up @ a2_up * beta
    cross = a2_up @ sig_up * (alpha * beta)
    mask = interior_mask(register, exclude_top, max_total=cutoff, groups=[("a1", "sigma")])

    residual = 0.0
    for basis in _basis_inputs(register, max_quanta):
        lhs = apply_exp_series(hop, apply_exp_series(pair, basis, tol=0.0), tol=0.0)
        rhs = apply_exp_series(cross, apply_exp_series(pair, apply_exp_series(hop, basis, tol=0.0), tol=0.0), tol=0.0)
        residual = max(residual, float(np.linalg.norm((lhs.amplitudes - rhs.amplitudes)[mask])))
    return IdentityReport.evaluate(
        "exponential reordering", residual, bound, cutoff, exclude_top, kind="state",
        alpha=[alpha.real, alpha.imag], beta=[beta.real, beta.imag], max_quanta=max_quanta,
    )


def binomial_trace_oracle(gamma: float, g: float, tau: float, cutoff: int, label: str = "b1", max_terms: Optional[int] = None):
    """
    Photon statistics of b1 by the binomial route

    Expanding (cos b1^dag - i sin sigma^dag)^n binomially and tracing term by term gives
    p_m = (1-gamma^2) sum_{n>=m} gamma^(2n) C(n,m) sin^(2(n-m)) cos^(2m). The inner sum
    runs until its terms underflow relative to the partial sum.

    Raises:
        OracleTruncationError: the sum did not settle within max_terms terms
    """
    gamma = as_gamma(gamma)
    max_terms = max_terms or settings.series_max_terms
    phase = g * tau
    c2, s2 = math.cos(phase) ** 2, math.sin(phase) ** 2
    q = gamma ** 2 * s2
    p = np.zeros(cutoff + 1)
    for m in range(cutoff + 1):
        term = (1.0 - gamma ** 2) * (gamma ** 2 * c2) ** m
        total = term
        n = m
        while term > 1e-18 * total and term > 0.0:
            if n - m >= max_terms:
                raise OracleTruncationError(f"Binomial sum for m={m} did not settle within {max_terms} terms (gamma={gamma})")
            term *= q * (n + 1) / (n + 1 - m)
            total += term
            n += 1
        p[m] = total
    return thermal_density_matrix(label, cutoff, p)


def geometric_closure_residual(gamma: float, m: int, max_terms: Optional[int] = None) -> float:
    """Relative residual of sum_{n>=m} gamma^(2n) n!/(n-m)! = gamma^(2m) m!/(1-gamma^2)^(m+1)"""
    gamma = as_gamma(gamma)
    max_terms = max_terms or settings.series_max_terms
    g2 = gamma ** 2
    exact = g2 ** m * math.factorial(m) / (1.0 - g2) ** (m + 1)
    if exact == 0.0:
        return 0.0
    term = g2 ** m * math.factorial(m)
    total = term
    n = m
    while term > 1e-18 * total:
        if n - m >= max_terms:
            raise OracleTruncationError(f"Geometric closure sum for m={m} did not settle within {max_terms} terms")
        term *= g2 * (n + 1) / (n + 1 - m)
        total += term
        n += 1
    return abs(total - exact) / exact


def check_state_generator(
    gamma: float,
    g: float,
    tau: float,
    cutoff: int,
    chains: int = 1,
    bound: float = DEFAULT_BOUND,
) -> IdentityReport:
    """
    The closed-form state obeys V psi = G(tau) psi with a pure-creation generator

        one chain:  G = -g gamma b2^dag (i sin b1^dag - cos sigma^dag)
        two chains: G = -i g gamma (sin 2g tau (b1^dag b2^dag + s1^dag s2^dag) + i cos 2g tau (b2^dag s1^dag + b1^dag s2^dag))

    V conserves each chain-plus-field occupation, so rows are restricted to sums <= cutoff.
    """
    gamma = as_gamma(gamma)
    if chains == 1:
        register = SINGLE_CHAIN.register(cutoff)
        psi = psi_single_chain(gamma, g, tau, register).state
        V = h_single_chain(g, register)
        c, s = math.cos(g * tau), math.sin(g * tau)
        b2_up = creation(register, "b2")
        G = b2_up @ (creation(register, "b1") * (1j * s) - creation(register, "sigma") * c) * (-g * gamma)
        groups = [("sigma", "b1")]
    else:
        register = TWO_CHAIN.register(cutoff)
        psi = psi_two_chain(gamma, g, tau, register).state
        V = h_two_chain(g, register)
        c2, s2 = math.cos(2 * g * tau), math.sin(2 * g * tau)
        up = {m: creation(register, m) for m in register.modes}
        G = (
            (up["b1"] @ up["b2"] + up["sigma1"] @ up["sigma2"]) * s2
            + (up["b2"] @ up["sigma1"] + up["b1"] @ up["sigma2"]) * (1j * c2)
        ) * (-1j * g * gamma)
        groups = [("sigma1", "b1"), ("sigma2", "b2")]
    mask = interior_mask(register, 0, max_total=cutoff, groups=groups)
    residual = float(np.linalg.norm((V.apply(psi).amplitudes - G.apply(psi).amplitudes)[mask]))
    name = "state generator single-chain" if chains == 1 else "state generator two-chain"
    return IdentityReport.evaluate(name, residual, bound, cutoff, 0, kind="state", gamma=gamma, g=g, tau=tau)


def check_duality_hamiltonian(gamma: float, g: float, cutoff: int, bound: float = 1e-10) -> IdentityReport:
    """h_generic_duality with the Unruh-Minkowski and collective frames reproduces h_two_chain on the whole register"""
    gamma = as_gamma(gamma)
    register = TWO_CHAIN.register(cutoff)
    a = bogoliubov_frame(gamma, register)
    B = b_frame(gamma, register)
    rewritten = h_generic_duality(g, a.op1, a.op2, B.op1, B.op2, check=False)
    residual_op = rewritten - h_two_chain(g, register)
    residual = projected_norm(residual_op, np.ones(register.dimension, dtype=bool))
    return IdentityReport.evaluate("duality hamiltonian", residual, bound, cutoff, 0, gamma=gamma, g=g)


def check_b_frame_ground(gamma: float, cutoff: int, bound: float = DEFAULT_BOUND) -> IdentityReport:
    """|G> = sqrt(1-gamma^2) e^{gamma B1^dag B2^dag}|0_B>, evaluated on a padded chain register"""
    gamma = as_gamma(gamma)
    register = make_register(["sigma1", "sigma2"], [cutoff, cutoff])
    work = register.with_cutoffs(max(working_cutoff(cutoff, abs(gamma)),
                                     tail_policy_cutoff(abs(gamma), STATE_TAIL_TOL) + settings.frame_padding))
    ground = restrict_state(ground_in_b_frame(gamma, work), register)
    residual = float(np.linalg.norm(ground.amplitudes - vacuum_state(register).amplitudes))
    return IdentityReport.evaluate("b-frame ground state", residual, bound, cutoff, 0, kind="state", gamma=gamma)


def check_frame_vacuum(gamma: float, cutoff: int, bound: float = DEFAULT_BOUND) -> IdentityReport:
    """a1|0_M> = a2|0_M> = 0 for the Unruh-Minkowski frame"""
    gamma = as_gamma(gamma)
    register = make_register(["b1", "b2"], [cutoff, cutoff])
    frame = bogoliubov_frame(gamma, register)
    residual = max(frame.vacuum_residuals)
    return IdentityReport.evaluate("unruh-minkowski vacuum", residual, bound, cutoff, 0, kind="state", gamma=gamma)


def monotone_excess(residuals: Sequence[float]) -> float:
    """Largest amount by which a residual exceeds twice its predecessor (0 for fewer than two)"""
    gaps = [nxt - 2.0 * prev for prev, nxt in zip(residuals, residuals[1:])]
    return max([0.0] + gaps)


def cutoff_monotone(residuals: Sequence[float], slack: float = MONOTONE_SLACK) -> bool:
    """True when every residual is at most twice its predecessor plus an absolute slack"""
    return monotone_excess(residuals) <= slack


def identity_suite(
    gamma: float = 0.5,
    cutoffs: Iterable[int] = IDENTITY_CUTOFFS,
    s: complex = -0.7j,
    alpha: complex = 0.4j,
    beta: complex = -0.3,
    g: float = 1.0,
    g_tau: float = 1.0,
    bound: float = DEFAULT_BOUND,
) -> List[IdentityReport]:
    """
    Run every identity at each cutoff

    Returns:
        Reports grouped by cutoff in ascending cutoff order
    """
    gamma = as_gamma(gamma)
    tau = g_tau / g
    reports: List[IdentityReport] = []
    for cutoff in sorted(cutoffs):
        logger.info(f"Checking identities at cutoff {cutoff}")
        reports.append(check_shift_identity(gamma, cutoff, "b1", bound=bound))
        reports.append(check_shift_identity(gamma, cutoff, "b2", bound=bound))
        reports.extend(check_conjugation_identities(s, cutoff, bound=bound))
        reports.append(check_squeeze_rebasing(gamma * (1.0 - math.cos(g_tau)), gamma, cutoff, bound=bound))
        reports.append(check_exp_reordering(alpha, beta, cutoff, bound=min(bound, 1e-9)))
        reports.append(check_state_generator(gamma, g, tau, cutoff, chains=1, bound=bound))
        reports.append(check_state_generator(gamma, g, tau, cutoff, chains=2, bound=bound))
        reports.append(check_duality_hamiltonian(gamma, g, cutoff))
        reports.append(check_b_frame_ground(gamma, cutoff, bound=bound))
        reports.append(check_frame_vacuum(gamma, cutoff, bound=bound))
    return reports


def monotone_by_name(reports: Sequence[IdentityReport]) -> Dict[str, bool]:
    """Cutoff monotonicity of each identity's residual across a suite"""
    series: Dict[str, List[Tuple[int, float]]] = {}
    for report in reports:
        series.setdefault(report.name, []).append((report.cutoff, report.residual_norm))
    return {name: cutoff_monotone([r for _, r in sorted(points)]) for name, points in series.items()}
