"""Dense linear algebra and state generation for small qubit systems.

Qubit 0 is the most significant bit of a computational-basis index, so
``|q0 q1 ... q_{n-1}>`` maps to index ``q0 * 2**(n-1) + ... + q_{n-1}``.

Randomness comes from numpy's PCG64 generator.  Per-sample seeds are
derived with :func:`derive_seed`, which feeds ``[seed, index]`` through
``numpy.random.SeedSequence`` and keeps the first 64-bit word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
CLAMP_TOL = 1e-10
NULL_TOL = 1e-14
MAX_QUBITS = 6


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{what} has non-finite entries")


def _n_qubits_for(dim: int, what: str) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise DomainError(f"{what} dimension {dim} is not a power of two >= 2")
    return n


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        _check_finite(amps, "state")
        _n_qubits_for(amps.size, "state")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(amps / norm)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite matrix on ``n_qubits``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got {m.shape}")
        _check_finite(m, "density matrix")
        _n_qubits_for(m.shape[0], "density matrix")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"density matrix trace {tr!r} differs from 1")
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m)[0] < -CLAMP_TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues in descending order with roundoff negatives clamped to 0."""
        return clamp_spectrum(np.linalg.eigvalsh(self.matrix)[::-1])

    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))


@dataclass(frozen=True)
class QubitCut:
    """Bipartition ``side_a | side_b`` of ``n_qubits`` qubits."""

    side_a: tuple[int, ...]
    n_qubits: int

    def __post_init__(self):
        a = tuple(sorted(set(int(i) for i in self.side_a)))
        if not a:
            raise DomainError("cut side A must be nonempty")
        if a[0] < 0 or a[-1] >= self.n_qubits:
            raise DomainError(f"cut indices {a} out of range for {self.n_qubits} qubits")
        if len(a) == self.n_qubits:
            raise DomainError("cut side A must be a proper subset")
        object.__setattr__(self, "side_a", a)

    @property
    def side_b(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_qubits) if i not in self.side_a)

    @property
    def is_qubit_vs_rest(self) -> bool:
        """True for a 2 (x) d cut, i.e. one side holds a single qubit."""
        return len(self.side_a) == 1 or len(self.side_b) == 1


def as_cut(cut, n_qubits: int) -> QubitCut:
    if isinstance(cut, QubitCut):
        if cut.n_qubits != n_qubits:
            raise DomainError("cut was built for a different number of qubits")
        return cut
    if isinstance(cut, int):
        cut = (cut,)
    return QubitCut(tuple(cut), n_qubits)


def clamp_spectrum(w: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero out eigenvalues in (-tol, 0); anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise DomainError(f"eigenvalue {w.min()!r} is below -{tol}")
    return np.where(w < 0, 0.0, w)


# -- basic linear algebra ---------------------------------------------------

def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def herm_eigs(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("herm_eigs needs a square matrix")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise DomainError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def psd_sqrt(m) -> np.ndarray:
    w, v = herm_eigs(m)
    w = clamp_spectrum(w)
    return (v * np.sqrt(w)) @ v.conj().T


# -- partial traces ----------------------------------------------------------

def _keep_tuple(keep: Iterable[int], n: int) -> tuple[int, ...]:
    k = tuple(sorted(set(int(i) for i in keep)))
    if not k:
        raise DomainError("keep set must be nonempty")
    if k[0] < 0 or k[-1] >= n:
        raise DomainError(f"qubit indices {k} out of range for {n} qubits")
    return k


def reduced_from_vectors(vectors: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    """Unnormalized reduced matrices ``tr_rest |v><v|`` for a stack of vectors.

    ``vectors`` has shape ``(..., 2**n_qubits)``; the result has shape
    ``(..., 2**len(keep), 2**len(keep))``.  ``keep`` must be sorted.
    """
    lead = vectors.shape[:-1]
    rest = [i for i in range(n_qubits) if i not in keep]
    t = vectors.reshape(lead + (2,) * n_qubits)
    nl = len(lead)
    order = list(range(nl)) + [nl + i for i in keep] + [nl + i for i in rest]
    t = np.transpose(t, order).reshape(lead + (2 ** len(keep), 2 ** len(rest)))
    return t @ np.swapaxes(t.conj(), -1, -2)


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the qubits in ``keep`` (a PureState is also accepted)."""
    if isinstance(rho, PureState):
        k = _keep_tuple(keep, rho.n_qubits)
        red = reduced_from_vectors(rho.amplitudes, rho.n_qubits, k)
        return DensityMatrix(0.5 * (red + red.conj().T))
    n = rho.n_qubits
    k = _keep_tuple(keep, n)
    if len(k) == n:
        return rho
    rest = [i for i in range(n) if i not in k]
    t = rho.matrix.reshape((2,) * (2 * n))
    perm = list(k) + rest
    t = np.transpose(t, perm + [n + i for i in perm])
    dk, dr = 2 ** len(k), 2 ** len(rest)
    red = np.einsum("ajbj->ab", t.reshape(dk, dr, dk, dr))
    return DensityMatrix(0.5 * (red + red.conj().T))


def permute_qubits(psi: PureState, order: Sequence[int]) -> PureState:
    """Relabel qubits so that new qubit ``i`` is old qubit ``order[i]``."""
    n = psi.n_qubits
    if sorted(order) != list(range(n)):
        raise DomainError(f"{order} is not a permutation of {n} qubits")
    t = psi.amplitudes.reshape((2,) * n)
    return PureState(np.transpose(t, order).reshape(-1))


# -- random states -----------------------------------------------------------

def derive_seed(seed: int, index: int) -> int:
    """Mix a base seed with a sample index into an independent 64-bit seed."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    rng = make_rng(rng)
    q, r = np.linalg.qr(_ginibre(rng, (dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_random_pure(n_qubits: int, seed) -> PureState:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    v = _ginibre(make_rng(seed), 2**n_qubits)
    return PureState(v / np.linalg.norm(v))


def random_mixed(n_qubits: int, rank: int, seed) -> DensityMatrix:
    """Induced-measure mixed state: marginal of a Haar vector on C^(2^n) (x) C^rank."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    d = 2**n_qubits
    if not 1 <= rank <= d:
        raise DomainError(f"rank must be in [1, {d}], got {rank}")
    g = _ginibre(make_rng(seed), (d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(0.5 * (m + m.conj().T))


def purify(rho: DensityMatrix) -> PureState:
    """Spectral purification; the ancilla occupies the trailing qubits."""
    w, v = herm_eigs(rho.matrix)
    w = clamp_spectrum(w)
    w = np.where(w > NULL_TOL, w, 0.0)  # sqrt of roundoff would leak ~1e-9 amplitude
    d = rho.dim
    psi = np.zeros((d, d), dtype=np.complex128)
    psi[:, : len(w)] = v * np.sqrt(w)
    return PureState.normalized(psi.reshape(-1))


# -- named states ------------------------------------------------------------

def basis_state(bits: str) -> PureState:
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1.0
    return PureState(v)


def bell_state() -> PureState:
    return PureState(np.array([1, 0, 0, 1]) / math.sqrt(2))


def ghz_state(n_qubits: int = 3) -> PureState:
    v = np.zeros(2**n_qubits, dtype=np.complex128)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return PureState(v)


def w_state(n_qubits: int = 3) -> PureState:
    v = np.zeros(2**n_qubits, dtype=np.complex128)
    for i in range(n_qubits):
        v[1 << i] = 1.0
    return PureState(v / math.sqrt(n_qubits))


def werner_state(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1 - p) I/4."""
    bell = bell_state().projector().matrix
    return DensityMatrix(p * bell + (1 - p) * np.eye(4) / 4)


NAMED_STATES = {
    "ghz": ghz_state,
    "w": w_state,
    "product": lambda n: basis_state("0" * n),
}


# -- JSON state format -------------------------------------------------------

def _pairs(a: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in a]


def _complex(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1] != 2:
        raise DomainError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"n_qubits": state.n_qubits, "amplitudes": _pairs(state.amplitudes)}
    return {"n_qubits": state.n_qubits, "matrix": [_pairs(row) for row in state.matrix]}


def state_from_dict(data: dict):
    """Parse the JSON state format into a PureState or DensityMatrix."""
    if not isinstance(data, dict) or "n_qubits" not in data:
        raise DomainError("state JSON needs an 'n_qubits' field")
    n = int(data["n_qubits"])
    if "amplitudes" in data:
        state = PureState(_complex(data["amplitudes"]))
    elif "matrix" in data:
        state = DensityMatrix(_complex(data["matrix"]))
    else:
        raise DomainError("state JSON needs 'amplitudes' or 'matrix'")
    if state.n_qubits != n:
        raise DomainError(f"n_qubits={n} does not match data of {state.n_qubits} qubits")
    return state


def as_density(state) -> DensityMatrix:
    return state.projector() if isinstance(state, PureState) else state
