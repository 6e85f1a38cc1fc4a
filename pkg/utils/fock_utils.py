"""
Truncated bosonic Fock-space kernel.

Registers fix the tensor-product basis (row-major in declared mode order), operators
are sparse complex matrices on that basis, and states carry their truncation leakage
explicitly instead of being renormalised.
"""
import math
import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from app.config import settings

logger = logging.getLogger(__name__)

DENSE_NORM_LIMIT = 2048


class FockError(Exception):
    """Base class for Fock-space kernel errors"""
    pass


class RegisterError(FockError):
    """Raised for malformed registers or unknown mode labels"""
    pass


class RegisterMismatchError(FockError):
    """Raised when operands live on different registers"""
    pass


class SeriesConvergenceError(FockError):
    """Raised when an exponential series does not converge within the term cap"""
    pass


class InvalidDensityMatrixError(FockError):
    """Raised when a density matrix is not Hermitian within tolerance"""
    pass


@dataclass(frozen=True)
class ModeRegister:
    """Ordered bosonic modes with per-mode Fock cutoffs"""
    modes: Tuple[str, ...]
    cutoffs: Tuple[int, ...]

    def __post_init__(self):
        modes = tuple(str(m) for m in self.modes)
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if not modes:
            raise RegisterError("A register needs at least one mode")
        if len(modes) != len(cutoffs):
            raise RegisterError(f"Got {len(modes)} labels but {len(cutoffs)} cutoffs")
        seen = set()
        for label in modes:
            if label in seen:
                raise RegisterError(f"Duplicate mode label: {label}")
            seen.add(label)
        for label, cutoff in zip(modes, cutoffs):
            if cutoff < 1:
                raise RegisterError(f"Cutoff for mode '{label}' must be >= 1, got {cutoff}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)

    def index_of(self, label: str) -> int:
        try:
            return self.modes.index(label)
        except ValueError:
            raise RegisterError(f"Unknown mode label: {label}") from None

    def cutoff_of(self, label: str) -> int:
        return self.cutoffs[self.index_of(label)]

    def has_modes(self, labels: Iterable[str]) -> bool:
        return all(label in self.modes for label in labels)

    def stride_of(self, label: str) -> int:
        i = self.index_of(label)
        return math.prod(self.dims[i + 1:])

    def basis_index(self, occupations: Sequence[int]) -> int:
        """Canonical index of an occupation vector: sum_i n_i * prod_{j>i} (n_max_j + 1)"""
        if len(occupations) != len(self.modes):
            raise RegisterError(f"Expected {len(self.modes)} occupations, got {len(occupations)}")
        for label, n, cutoff in zip(self.modes, occupations, self.cutoffs):
            if not 0 <= n <= cutoff:
                raise RegisterError(f"Occupation {n} of mode '{label}' outside [0, {cutoff}]")
        return int(np.ravel_multi_index(tuple(int(n) for n in occupations), self.dims))

    def occupations(self, index: int) -> Tuple[int, ...]:
        return tuple(int(n) for n in np.unravel_index(int(index), self.dims))

    def occupation_grid(self, label: str) -> np.ndarray:
        """Occupation of one mode for every basis index"""
        return _occupation_grid(self, label)

    def subregister(self, labels: Iterable[str]) -> "ModeRegister":
        wanted = set(labels)
        for label in wanted:
            self.index_of(label)
        kept = [(m, c) for m, c in zip(self.modes, self.cutoffs) if m in wanted]
        return ModeRegister(tuple(m for m, _ in kept), tuple(c for _, c in kept))

    def with_cutoffs(self, cutoffs: Union[int, Mapping[str, int]]) -> "ModeRegister":
        if isinstance(cutoffs, Mapping):
            new = tuple(int(cutoffs.get(m, c)) for m, c in zip(self.modes, self.cutoffs))
        else:
            new = tuple(int(cutoffs) for _ in self.modes)
        return ModeRegister(self.modes, new)

    def padded(self, levels: int) -> "ModeRegister":
        return ModeRegister(self.modes, tuple(c + levels for c in self.cutoffs))

    def relabeled(self, mapping: Mapping[str, str]) -> "ModeRegister":
        return ModeRegister(tuple(mapping.get(m, m) for m in self.modes), self.cutoffs)

    def to_dict(self) -> Dict[str, Any]:
        return {"modes": list(self.modes), "cutoffs": list(self.cutoffs)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModeRegister":
        return cls(tuple(data["modes"]), tuple(data["cutoffs"]))


@lru_cache(maxsize=64)
def _occupation_grid(register: ModeRegister, label: str) -> np.ndarray:
    i = register.index_of(label)
    stride = math.prod(register.dims[i + 1:])
    grid = (np.arange(register.dimension, dtype=np.int64) // stride) % register.dims[i]
    grid.setflags(write=False)
    return grid


def make_register(mode_labels: Sequence[str], cutoffs: Sequence[int]) -> ModeRegister:
    """
    Build a register with canonical row-major basis ordering

    Args:
        mode_labels: Unique mode labels in basis order
        cutoffs: Maximum occupation per mode (>= 1)

    Returns:
        ModeRegister

    Raises:
        RegisterError: duplicate label, zero cutoff or length mismatch
    """
    return ModeRegister(tuple(mode_labels), tuple(cutoffs))


def _check_same_register(a: ModeRegister, b: ModeRegister) -> None:
    if a != b:
        raise RegisterMismatchError(f"Register mismatch: {a.modes}{a.cutoffs} vs {b.modes}{b.cutoffs}")


def _complex_pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def _from_pairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector on a register; leakage is the weight lost to truncation"""
    register: ModeRegister
    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape[0] != self.register.dimension:
            raise RegisterMismatchError(
                f"Amplitude vector of length {amps.shape[0]} does not fit register of dimension {self.register.dimension}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "leakage", float(self.leakage))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        """True when the squared norm equals 1 - leakage within tol"""
        return abs(self.norm ** 2 - (1.0 - self.leakage)) <= tol

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.register.basis_index(occupations)])

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.register, self.amplitudes * factor, self.leakage)

    def with_leakage(self, leakage: float) -> "PureState":
        return PureState(self.register, self.amplitudes, leakage)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "register": self.register.to_dict(),
            "data": _complex_pairs(self.amplitudes),
            "leakage": self.leakage,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PureState":
        return cls(ModeRegister.from_dict(data["register"]), _from_pairs(data["data"]), data.get("leakage", 0.0))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense Hermitian matrix on a (sub-)register"""
    register: ModeRegister
    matrix: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        dim = self.register.dimension
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise RegisterMismatchError(f"Matrix of shape {mat.shape} does not fit register of dimension {dim}")
        residual = float(np.max(np.abs(mat - mat.conj().T))) if dim else 0.0
        if residual > 1e-12:
            raise InvalidDensityMatrixError(f"Density matrix is not Hermitian (residual {residual:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "leakage", float(self.leakage))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_valid(self, tol: float = 1e-12) -> bool:
        """Unit trace up to leakage and no eigenvalue below -tol"""
        if abs(self.trace - (1.0 - self.leakage)) > tol:
            return False
        return bool(self.eigenvalues().min() >= -tol)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "register": self.register.to_dict(),
            "data": _complex_pairs(self.matrix.ravel()),
            "leakage": self.leakage,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DensityMatrix":
        register = ModeRegister.from_dict(data["register"])
        dim = register.dimension
        return cls(register, _from_pairs(data["data"]).reshape(dim, dim), data.get("leakage", 0.0))


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Sparse complex matrix acting on a register's Hilbert space"""
    register: ModeRegister
    matrix: sparse.csr_matrix

    def __post_init__(self):
        mat = sparse.csr_matrix(self.matrix, dtype=np.complex128)
        dim = self.register.dimension
        if mat.shape != (dim, dim):
            raise RegisterMismatchError(f"Operator of shape {mat.shape} does not fit register of dimension {dim}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dimension(self) -> int:
        return self.register.dimension

    def dagger(self) -> "FockOperator":
        return FockOperator(self.register, self.matrix.conj().T.tocsr())

    def _coerce(self, other: "FockOperator") -> sparse.csr_matrix:
        _check_same_register(self.register, other.register)
        return other.matrix

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.register, self.matrix + self._coerce(other))

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.register, self.matrix - self._coerce(other))

    def __neg__(self) -> "FockOperator":
        return FockOperator(self.register, -self.matrix)

    def __mul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.register, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.register, self.matrix / complex(scalar))

    def __matmul__(self, other: Union["FockOperator", PureState]):
        if isinstance(other, PureState):
            return self.apply(other)
        return FockOperator(self.register, self.matrix @ self._coerce(other))

    def apply(self, state: PureState) -> PureState:
        _check_same_register(self.register, state.register)
        return PureState(self.register, self.matrix @ state.amplitudes, state.leakage)

    def commutator(self, other: "FockOperator") -> "FockOperator":
        b = self._coerce(other)
        return FockOperator(self.register, self.matrix @ b - b @ self.matrix)

    def hermiticity_residual(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_residual() <= tol

    def is_unitary(self, tol: float = 1e-12) -> bool:
        gram = self.matrix.conj().T @ self.matrix - sparse.identity(self.dimension, format="csr")
        return (float(abs(gram).max()) if gram.nnz else 0.0) <= tol

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_dict(self) -> Dict[str, Any]:
        return {"register": self.register.to_dict(), "data": _complex_pairs(self.to_dense().ravel())}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FockOperator":
        register = ModeRegister.from_dict(data["register"])
        dim = register.dimension
        return cls(register, sparse.csr_matrix(_from_pairs(data["data"]).reshape(dim, dim)))


StateLike = Union[PureState, DensityMatrix]


@lru_cache(maxsize=128)
def annihilation(register: ModeRegister, label: str) -> FockOperator:
    """
    Ladder operator lowering the named mode; <n-1|a|n> = sqrt(n), zero row at the top level

    Raises:
        RegisterError: unknown label
    """
    target = register.index_of(label)
    factors = []
    for i, cutoff in enumerate(register.cutoffs):
        if i == target:
            factors.append(sparse.diags(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), offsets=1,
                                        shape=(cutoff + 1, cutoff + 1), format="csr"))
        else:
            factors.append(sparse.identity(cutoff + 1, format="csr"))
    matrix = reduce(lambda x, y: sparse.kron(x, y, format="csr"), factors)
    return FockOperator(register, matrix)


def creation(register: ModeRegister, label: str) -> FockOperator:
    return annihilation(register, label).dagger()


def number_operator(register: ModeRegister, label: str) -> FockOperator:
    grid = register.occupation_grid(label).astype(np.float64)
    return FockOperator(register, sparse.diags(grid, format="csr"))


def identity_operator(register: ModeRegister) -> FockOperator:
    return FockOperator(register, sparse.identity(register.dimension, format="csr"))


def zero_operator(register: ModeRegister) -> FockOperator:
    return FockOperator(register, sparse.csr_matrix((register.dimension, register.dimension)))


def basis_state(register: ModeRegister, occupations: Optional[Mapping[str, int]] = None) -> PureState:
    """Fock basis state; modes missing from the mapping are empty"""
    occupations = dict(occupations or {})
    for label in occupations:
        register.index_of(label)
    amps = np.zeros(register.dimension, dtype=np.complex128)
    amps[register.basis_index([occupations.get(m, 0) for m in register.modes])] = 1.0
    return PureState(register, amps)


def vacuum_state(register: ModeRegister) -> PureState:
    return basis_state(register)


def state_from_array(register: ModeRegister, amplitudes: np.ndarray, leakage: float = 0.0) -> PureState:
    return PureState(register, amplitudes, leakage)


def norm_bound(A: FockOperator) -> float:
    """Cheap upper bound of the operator 2-norm: sqrt(||A||_1 ||A||_inf)"""
    if A.matrix.nnz == 0:
        return 0.0
    absm = abs(A.matrix)
    col = float(absm.sum(axis=0).max())
    row = float(absm.sum(axis=1).max())
    return math.sqrt(col * row)


@dataclass(frozen=True)
class SeriesReport:
    state: PureState
    terms: int
    residual: float
    substeps: int


def exp_series_report(
    A: FockOperator,
    state: PureState,
    tol: float = 1e-16,
    max_terms: Optional[int] = None,
    substeps: int = 1,
) -> SeriesReport:
    """
    Apply e^A to a state by Taylor series with a term-norm stopping rule

    The exponent may be split into `substeps` equal slices (e^A = (e^{A/s})^s) so that
    each slice has a small norm; pure-creation exponents terminate by nilpotency and
    need no slicing.

    Args:
        A: Exponent operator
        state: Input state
        tol: Stop once a term falls below tol relative to the running sum
        max_terms: Cap on terms per slice (defaults to settings.series_max_terms)
        substeps: Number of equal slices

    Returns:
        SeriesReport with the resulting state, total terms used and the norm of the last term

    Raises:
        RegisterMismatchError: operands on different registers
        SeriesConvergenceError: a slice did not converge within max_terms
    """
    _check_same_register(A.register, state.register)
    max_terms = max_terms or settings.series_max_terms
    substeps = max(1, int(substeps))
    scale = 1.0 / substeps
    bound = norm_bound(A) * scale
    min_terms = int(math.ceil(bound))
    matrix = A.matrix
    vec = np.array(state.amplitudes, dtype=np.complex128)
    total_terms = 0
    residual = 0.0

    for _ in range(substeps):
        term = vec.copy()
        total = vec.copy()
        k = 0
        while True:
            k += 1
            if k > max_terms:
                raise SeriesConvergenceError(
                    f"Exponential series did not converge within {max_terms} terms (norm bound {bound:.3g})"
                )
            term = (matrix @ term) * (scale / k)
            term_norm = float(np.linalg.norm(term))
            total += term
            if term_norm == 0.0:
                residual = 0.0
                break
            if k >= min_terms and term_norm <= tol * max(1.0, float(np.linalg.norm(total))):
                residual = term_norm
                break
        total_terms += k
        vec = total

    logger.debug(f"Exponential series: {total_terms} terms over {substeps} slice(s), last term {residual:.3e}")
    return SeriesReport(PureState(state.register, vec, state.leakage), total_terms, residual, substeps)


def apply_exp_series(
    A: FockOperator,
    state: PureState,
    tol: float = 1e-16,
    max_terms: Optional[int] = None,
    substeps: int = 1,
) -> PureState:
    """Return e^A applied to the state (see exp_series_report)"""
    return exp_series_report(A, state, tol=tol, max_terms=max_terms, substeps=substeps).state


def apply_unitary_exp(K: FockOperator, state: PureState, tol: float = 1e-16) -> PureState:
    """Apply e^K for anti-Hermitian K, slicing so every slice has norm bound <= 1"""
    substeps = max(1, int(math.ceil(norm_bound(K))))
    return apply_exp_series(K, state, tol=tol, substeps=substeps)


def partial_trace(state: StateLike, keep: Iterable[str]) -> DensityMatrix:
    """
    Reduced density matrix on the kept modes

    Args:
        state: PureState or DensityMatrix
        keep: Labels of the modes to keep (order follows the register)

    Returns:
        DensityMatrix on the sub-register of kept modes, leakage inherited

    Raises:
        RegisterError: empty keep set or unknown label
    """
    sub, kept, traced = _split_modes(state.register, keep)
    dims = state.register.dims
    d_keep = sub.dimension
    d_rest = state.register.dimension // d_keep

    if isinstance(state, PureState):
        psi = _bipartite_amplitudes(state, sub, kept, traced)
        rho = psi @ psi.conj().T
    else:
        n = len(dims)
        tensor = state.matrix.reshape(dims + dims)
        order = kept + traced + [n + i for i in kept] + [n + i for i in traced]
        tensor = tensor.transpose(order).reshape(d_keep, d_rest, d_keep, d_rest)
        rho = np.einsum("ajbj->ab", tensor)

    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(sub, rho, state.leakage)


def _split_modes(register: ModeRegister, keep: Iterable[str]) -> Tuple[ModeRegister, List[int], List[int]]:
    keep_set = set(keep)
    if not keep_set:
        raise RegisterError("Keep set must not be empty")
    sub = register.subregister(keep_set)
    kept = [register.index_of(m) for m in sub.modes]
    traced = [i for i in range(len(register.modes)) if i not in kept]
    return sub, kept, traced


def _bipartite_amplitudes(state: PureState, sub: ModeRegister, kept: List[int], traced: List[int]) -> np.ndarray:
    d_keep = sub.dimension
    psi = state.amplitudes.reshape(state.register.dims).transpose(kept + traced)
    return psi.reshape(d_keep, state.register.dimension // d_keep)


def entanglement_entropy(state: PureState, keep: Iterable[str]) -> float:
    """
    Entropy of the kept modes of a pure state, from its Schmidt coefficients

    Equals von_neumann_entropy(partial_trace(state, keep)) but never forms the reduced
    matrix: the SVD costs the smaller side of the cut, so a large field marginal is as
    cheap as the small chain marginal it complements.
    """
    sub, kept, traced = _split_modes(state.register, keep)
    schmidt = np.linalg.svd(_bipartite_amplitudes(state, sub, kept, traced), compute_uv=False)
    probs = schmidt ** 2
    probs = probs[probs > 1e-14]
    return float(-np.sum(probs * np.log(probs)))

def to_density_matrix(state: StateLike) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    psi = state.amplitudes
    return DensityMatrix(state.register, np.outer(psi, psi.conj()), state.leakage)


def expectation(state: StateLike, A: FockOperator) -> complex:
    """<psi|A|psi> for pure states, Tr(rho A) for density matrices"""
    _check_same_register(state.register, A.register)
    if isinstance(state, PureState):
        return complex(np.vdot(state.amplitudes, A.matrix @ state.amplitudes))
    return complex(np.trace(state.matrix @ A.to_dense()))


def overlap(psi: PureState, phi: PureState) -> complex:
    """<psi|phi>"""
    _check_same_register(psi.register, phi.register)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def state_distance(psi: PureState, phi: PureState) -> float:
    _check_same_register(psi.register, phi.register)
    return float(np.linalg.norm(psi.amplitudes - phi.amplitudes))


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(matrix)
    evals = np.sqrt(np.clip(evals, 0.0, None))
    return (evecs * evals) @ evecs.conj().T


def fidelity(rho: StateLike, sigma: StateLike) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2

    Pure arguments short-circuit to |<psi|phi>|^2 or <psi|sigma|psi>.
    """
    _check_same_register(rho.register, sigma.register)
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return abs(overlap(rho, sigma)) ** 2
    if isinstance(rho, PureState):
        return float(np.real(np.vdot(rho.amplitudes, sigma.matrix @ rho.amplitudes)))
    if isinstance(sigma, PureState):
        return float(np.real(np.vdot(sigma.amplitudes, rho.matrix @ sigma.amplitudes)))
    root = _psd_sqrt(rho.matrix)
    inner = root @ sigma.matrix @ root
    evals = np.clip(np.linalg.eigvalsh(0.5 * (inner + inner.conj().T)), 0.0, None)
    return float(np.sum(np.sqrt(evals)) ** 2)


def von_neumann_entropy(rho: StateLike) -> float:
    """-sum lambda ln lambda over eigenvalues above 1e-14 (natural log)"""
    if isinstance(rho, PureState):
        return 0.0
    evals = np.clip(rho.eigenvalues(), 0.0, None)
    evals = evals[evals > 1e-14]
    return float(-np.sum(evals * np.log(evals)))


def interior_mask(
    register: ModeRegister,
    exclude_top: int = 2,
    max_total: Optional[int] = None,
    groups: Optional[Sequence[Sequence[str]]] = None,
) -> np.ndarray:
    """
    Boolean mask of cutoff-interior basis states

    A basis state is interior when every mode sits at least `exclude_top` levels below
    its cutoff. With `max_total`, the summed occupation of each group of modes (default:
    all modes as one group) is additionally capped.
    """
    mask = np.ones(register.dimension, dtype=bool)
    for label, cutoff in zip(register.modes, register.cutoffs):
        mask &= register.occupation_grid(label) <= cutoff - exclude_top
    if max_total is not None:
        for group in (groups or [register.modes]):
            total = sum(register.occupation_grid(label) for label in group)
            mask &= total <= max_total
    return mask


def interior_projector(register: ModeRegister, exclude_top: int = 2) -> FockOperator:
    mask = interior_mask(register, exclude_top).astype(np.float64)
    return FockOperator(register, sparse.diags(mask, format="csr"))


def projected_norm(A: FockOperator, rows: np.ndarray, cols: Optional[np.ndarray] = None) -> float:
    """
    Operator 2-norm of P_rows A P_cols

    Exact (dense SVD) for blocks up to DENSE_NORM_LIMIT, Frobenius upper bound above.
    """
    cols = rows if cols is None else cols
    sub = A.matrix[np.flatnonzero(rows)][:, np.flatnonzero(cols)]
    if sub.nnz == 0:
        return 0.0
    if max(sub.shape) <= DENSE_NORM_LIMIT:
        return float(np.linalg.norm(sub.toarray(), 2))
    return float(sparse_linalg.norm(sub))


def restrict_state(state: PureState, register: ModeRegister) -> PureState:
    """Project a state onto a register with the same modes and smaller cutoffs"""
    if register.modes != state.register.modes:
        raise RegisterMismatchError(f"Cannot restrict {state.register.modes} onto {register.modes}")
    for label, small, big in zip(register.modes, register.cutoffs, state.register.cutoffs):
        if small > big:
            raise RegisterMismatchError(f"Mode '{label}' cutoff {small} exceeds source cutoff {big}")
    tensor = state.amplitudes.reshape(state.register.dims)
    kept = tensor[tuple(slice(0, d) for d in register.dims)]
    dropped = max(0.0, state.norm ** 2 - float(np.sum(np.abs(kept) ** 2)))
    return PureState(register, kept.ravel(), state.leakage + dropped)


def tail_policy_cutoff(gamma: float, tail_tol: Optional[float] = None) -> int:
    """Smallest n with gamma^(2(n+1)) / (1 - gamma^2) < tail_tol (at least 1)"""
    tail_tol = settings.tail_tol if tail_tol is None else tail_tol
    g2 = float(gamma) ** 2
    if g2 >= 1.0:
        raise FockError(f"Tail policy undefined for |gamma| >= 1 (got {gamma})")
    n = 0
    while g2 ** (n + 1) / (1.0 - g2) >= tail_tol:
        n += 1
    return max(1, n)


class DimensionBudgetError(FockError):
    """Raised when a register exceeds the Hilbert-space dimension budget"""

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(message)
        self.required = required
        self.budget = budget


def check_dimension_budget(register: ModeRegister, budget: Optional[int] = None) -> int:
    """Return the register dimension, raising DimensionBudgetError above the budget"""
    budget = settings.max_dimension if budget is None else budget
    required = register.dimension
    if required > budget:
        raise DimensionBudgetError(
            f"Register {register.modes} with cutoffs {register.cutoffs} needs dimension {required}, budget is {budget}",
            required=required,
            budget=budget,
        )
    return required
