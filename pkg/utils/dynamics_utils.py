"""
Hamiltonians and exact time evolution.

evolve() is the brute-force oracle: e^{-iH tau} through the eigendecomposition of H,
taken block by block over the connected components of H's sparsity graph (the
conserved excitation sectors) and only for blocks the state occupies.
"""
import math
import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.csgraph import connected_components

from app.config import settings
from utils.fock_utils import (
    FockOperator,
    ModeRegister,
    PureState,
    RegisterMismatchError,
    annihilation,
    identity_operator,
    interior_mask,
    projected_norm,
)
from utils.state_utils import TWO_CHAIN, ModeLayout, as_gamma, require_modes

logger = logging.getLogger(__name__)

HERMITICITY_HARD_LIMIT = 1e-6
COMMUTATOR_WARN_TOL = 1e-10


class NonHermitianError(Exception):
    """Raised when a Hamiltonian is too far from Hermitian to symmetrize"""
    pass


@dataclass(frozen=True)
class EvolutionParams:
    g: float
    tau: float = 0.0
    tau_grid: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise ValueError(f"Coupling g must be finite, got {self.g}")
        if not math.isfinite(self.tau):
            raise ValueError(f"Rindler time must be finite, got {self.tau}")
        if self.tau_grid is not None:
            object.__setattr__(self, "tau_grid", tuple(float(t) for t in self.tau_grid))


def h_single_chain(g: float, register: ModeRegister, chain: str = "sigma", field: str = "b1") -> FockOperator:
    """V = g (sigma^dag b1 + sigma b1^dag); other modes untouched"""
    require_modes(register, (chain, field))
    s = annihilation(register, chain)
    b = annihilation(register, field)
    return (s.dagger() @ b + s @ b.dagger()) * g


def h_two_chain(g: float, register: ModeRegister, layout: ModeLayout = TWO_CHAIN) -> FockOperator:
    """V = g sum_i (sigma_i^dag b_i + sigma_i b_i^dag)"""
    require_modes(register, layout.modes)
    pairs = layout.couplings()
    total = h_single_chain(g, register, *pairs[0])
    for chain, field in pairs[1:]:
        total = total + h_single_chain(g, register, chain, field)
    return total


def h_generic_duality(
    g: float,
    A1: FockOperator,
    A2: FockOperator,
    B1: FockOperator,
    B2: FockOperator,
    check: bool = True,
    exclude_top: int = 2,
) -> FockOperator:
    """
    V = g (A1^dag B1 + A1 B1^dag + A2^dag B2 + A2 B2^dag)

    With check=True the bosonic commutators of the four operands are measured on the
    cutoff interior and a warning is logged for any residual above 1e-10.
    """
    if check:
        _warn_on_commutators({"A1": A1, "A2": A2, "B1": B1, "B2": B2}, exclude_top)
    return (A1.dagger() @ B1 + A1 @ B1.dagger() + A2.dagger() @ B2 + A2 @ B2.dagger()) * g


def _warn_on_commutators(ops: Dict[str, FockOperator], exclude_top: int) -> None:
    register = next(iter(ops.values())).register
    mask = interior_mask(register, exclude_top)
    one = identity_operator(register)
    names = list(ops)
    for i, x in enumerate(names):
        residual = projected_norm(ops[x].commutator(ops[x].dagger()) - one, mask)
        if residual > COMMUTATOR_WARN_TOL:
            logger.warning(f"[{x},{x}+] deviates from 1 by {residual:.3e} on the interior")
        for y in names[i + 1:]:
            for label, other in ((y, ops[y]), (f"{y}+", ops[y].dagger())):
                residual = projected_norm(ops[x].commutator(other), mask)
                if residual > COMMUTATOR_WARN_TOL:
                    logger.warning(f"[{x},{label}] deviates from 0 by {residual:.3e} on the interior")


def _fix_phases(evecs: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of every eigenvector real positive"""
    fixed = evecs.copy()
    for j in range(fixed.shape[1]):
        column = fixed[:, j]
        k = int(np.argmax(np.abs(column) > 1e-10))
        phase = column[k] / abs(column[k])
        fixed[:, j] = column / phase
    return fixed


class SpectralPropagator:
    """
    Lazily diagonalised Hermitian operator

    Blocks are the connected components of the operator's sparsity graph; each block's
    eigensystem is computed once (eigenvalues ascending, eigenvector phases fixed) and
    shared by all later evolutions.
    """

    def __init__(self, hamiltonian: FockOperator):
        residual = hamiltonian.hermiticity_residual()
        if residual > HERMITICITY_HARD_LIMIT:
            raise NonHermitianError(f"Hamiltonian Hermiticity residual {residual:.3e} exceeds {HERMITICITY_HARD_LIMIT:.0e}")
        if residual > settings.hermiticity_tol:
            logger.warning(f"Hamiltonian Hermiticity residual {residual:.3e} above {settings.hermiticity_tol:.0e}, symmetrizing")
        matrix = (0.5 * (hamiltonian.matrix + hamiltonian.matrix.conj().T)).tocsr()
        matrix.eliminate_zeros()

        self.register = hamiltonian.register
        self._matrix = matrix
        pattern = sparse.csr_matrix((np.ones(matrix.nnz), matrix.indices, matrix.indptr), shape=matrix.shape)
        n_blocks, labels = connected_components(pattern, directed=False)
        order = np.argsort(labels, kind="stable")
        counts = np.bincount(labels, minlength=n_blocks)
        self._labels = labels
        self._blocks = np.split(order, np.cumsum(counts)[:-1])
        self._eigen: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()
        logger.debug(f"Spectral propagator over dimension {matrix.shape[0]}: {n_blocks} blocks")

    @property
    def n_blocks(self) -> int:
        return len(self._blocks)

    def block_eigensystem(self, block: int) -> Tuple[np.ndarray, np.ndarray]:
        with self._lock:
            cached = self._eigen.get(block)
        if cached is not None:
            return cached
        idx = self._blocks[block]
        sub = self._matrix[idx][:, idx].toarray()
        evals, evecs = linalg.eigh(sub)
        result = (evals, _fix_phases(evecs))
        with self._lock:
            self._eigen.setdefault(block, result)
        return result

    def occupied_blocks(self, amplitudes: np.ndarray) -> np.ndarray:
        return np.unique(self._labels[np.flatnonzero(amplitudes)])

    def evolve(self, state: PureState, tau: float) -> PureState:
        if state.register != self.register:
            raise RegisterMismatchError(f"State register {state.register.modes} does not match Hamiltonian register")
        amps = state.amplitudes
        out = np.zeros_like(amps)
        for block in self.occupied_blocks(amps):
            idx = self._blocks[block]
            evals, evecs = self.block_eigensystem(block)
            coeffs = evecs.conj().T @ amps[idx]
            out[idx] = evecs @ (np.exp(-1j * evals * tau) * coeffs)
        return PureState(self.register, out, state.leakage)


@lru_cache(maxsize=8)
def spectral_propagator(hamiltonian: FockOperator) -> SpectralPropagator:
    return SpectralPropagator(hamiltonian)


def evolve(H: FockOperator, psi0: PureState, tau: float) -> PureState:
    """
    Exact Schrodinger evolution |psi(tau)> = exp(-i H tau)|psi0>

    Args:
        H: Hermitian Hamiltonian (symmetrized with a warning when slightly off)
        psi0: Initial state on H's register
        tau: Rindler time

    Returns:
        Evolved PureState carrying psi0's leakage

    Raises:
        NonHermitianError: H is far from Hermitian
        RegisterMismatchError: psi0 lives on another register
    """
    propagator = spectral_propagator(H)
    if tau == 0.0:
        if psi0.register != H.register:
            raise RegisterMismatchError("State and Hamiltonian registers differ")
        return psi0
    return propagator.evolve(psi0, tau)


def evolve_series(H: FockOperator, psi0: PureState, taus: Iterable[float]) -> List[PureState]:
    propagator = spectral_propagator(H)
    return [propagator.evolve(psi0, float(tau)) for tau in taus]


def heisenberg_numbers(gamma: float, g: float, tau: Union[float, np.ndarray]):
    """
    Occupations from the Heisenberg solution: N_sigma = n sin^2(g tau), N_b1 = n cos^2(g tau), n = gamma^2/(1-gamma^2)

    Returns:
        Tuple (N_sigma, N_b1); arrays when tau is an array
    """
    gamma = as_gamma(gamma)
    n = gamma ** 2 / (1.0 - gamma ** 2)
    phase = g * np.asarray(tau, dtype=np.float64)
    n_sigma = n * np.sin(phase) ** 2
    n_b1 = n * np.cos(phase) ** 2
    if n_sigma.ndim == 0:
        return float(n_sigma), float(n_b1)
    return n_sigma, n_b1


def rabi_period(g: float, chains: int = 1) -> float:
    """Period of the state: 2 pi / g for one chain, pi / g for two"""
    if g == 0.0:
        raise ValueError("Coupling g must be non-zero to define a Rabi period")
    return (2.0 * math.pi if chains == 1 else math.pi) / abs(g)


def default_tau_grid(g: float, chains: int = 1, points: int = 65) -> np.ndarray:
    return np.linspace(0.0, rabi_period(g, chains), points)
