"""Convex-roof extremization over pure-state decompositions.

Every size-m decomposition of a rank-r state rho = sum_k mu_k |e_k><e_k| is
reached by an m x m unitary U through

    |psi~_i> = sum_k U_ik sqrt(mu_k) |e_k>,   p_i = <psi~_i|psi~_i>.

The search is a derivative-free local search on U: propose exp(i eps H) U
for a random Hermitian H of unit Frobenius norm, keep it if the average
measure improves.  All restarts advance in lockstep as one numpy batch.
Restart 0 starts from the identity (the spectral decomposition), the others
from Haar-random unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import as_index
from .qmath import (
    DensityMatrix,
    DomainError,
    PureState,
    as_cut,
    as_density,
    clamp_spectrum,
    haar_unitary,
    herm_eigs,
    make_rng,
    reduced_from_vectors,
)

MEASURES = ("tsallis", "von_neumann", "concurrence")
RANK_TOL = 1e-12
STEP_INIT = 0.3
STEP_FLOOR = 1e-4
PATIENCE = 20
CONVERGED_TOL = 1e-9


@dataclass(frozen=True)
class Budget:
    m: int | None = None  # decomposition size; None -> min(rank^2, 2 rank)
    restarts: int = 16
    iters: int = 300

    def size_for(self, rank: int) -> int:
        return self.m if self.m is not None else min(rank * rank, 2 * rank)


@dataclass(frozen=True, eq=False)
class Decomposition:
    weights: np.ndarray
    states: tuple[PureState, ...]

    def reconstruct(self) -> np.ndarray:
        vecs = np.array([s.amplitudes for s in self.states])
        return (vecs.T * self.weights) @ vecs.conj()


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    best: Decomposition
    restarts_used: int
    converged: bool


def _spectral(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    w, v = herm_eigs(rho.matrix)
    w = clamp_spectrum(w)
    keep = w > RANK_TOL
    return w[keep], v[:, keep]


def _mix(u: np.ndarray, mu: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Unnormalized decomposition vectors, shape (..., m, d), from unitaries (..., m, m)."""
    r = mu.size
    return (u[..., :, :r] * np.sqrt(mu)) @ vecs.T


def decomposition_from_unitary(rho: DensityMatrix, u) -> Decomposition:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DomainError("mixing matrix must be square")
    if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > 1e-9:
        raise DomainError("mixing matrix is not unitary")
    mu, vecs = _spectral(rho)
    if u.shape[0] < mu.size:
        raise DomainError(f"decomposition size {u.shape[0]} is below rank {mu.size}")
    return _as_decomposition(_mix(u, mu, vecs))


def _as_decomposition(tilde: np.ndarray) -> Decomposition:
    weights = np.sum(np.abs(tilde) ** 2, axis=-1)
    states = []
    for vec, p in zip(tilde, weights):
        if p > 0:
            states.append(PureState.normalized(vec))
        else:
            states.append(PureState(np.eye(vec.size, dtype=np.complex128)[0]))
    return Decomposition(weights=weights / weights.sum(), states=tuple(states))


def _weighted_measure(tilde, n_qubits, side_a, measure, q):
    """sum_i p_i f(psi_i) for unnormalized vectors of shape (..., m, d)."""
    # both marginals of a pure state share their nonzero spectrum
    side_b = [i for i in range(n_qubits) if i not in side_a]
    keep = side_a if len(side_a) <= len(side_b) else side_b
    red = reduced_from_vectors(tilde, n_qubits, keep)
    p = np.real(np.trace(red, axis1=-2, axis2=-1))
    pur = np.sum(np.abs(red) ** 2, axis=(-2, -1))
    if measure == "concurrence":
        return np.sum(np.sqrt(np.maximum(2.0 * (p * p - pur), 0.0)), axis=-1)
    if red.shape[-1] == 2:
        disc = np.sqrt(np.maximum(2.0 * pur - p * p, 0.0))
        nu = np.maximum(np.stack([(p - disc) / 2, (p + disc) / 2], axis=-1), 0.0)
    else:
        nu = np.maximum(np.linalg.eigvalsh(red), 0.0)
    psafe = np.where(p > 0, p, 1.0)[..., None]
    if measure == "von_neumann" or q.is_limit_point:
        lr = np.log(np.where(nu > 0, nu / psafe, 1.0))
        terms = -np.sum(nu * lr, axis=-1)
    else:
        terms = (p - np.sum((nu / psafe) ** q.q, axis=-1) * p) / (q.q - 1.0)
    return np.sum(np.where(p > 0, terms, 0.0), axis=-1)


def _random_hermitian(rng, shape_lead, m):
    g = rng.standard_normal(shape_lead + (m, m)) + 1j * rng.standard_normal(shape_lead + (m, m))
    h = g + np.swapaxes(g.conj(), -1, -2)
    return h / np.linalg.norm(h, axis=(-2, -1), keepdims=True)


def _expi(h, eps):
    w, v = np.linalg.eigh(h)
    phase = np.exp(1j * eps[:, None] * w)
    return (v * phase[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def roof_extremize(rho, cut, measure: str, direction: str, budget: Budget = Budget(),
                   seed=42, q=None) -> RoofResult:
    """Minimize or maximize the average pure-state measure over decompositions.

    ``measure`` is one of ``MEASURES``; ``q`` is required for "tsallis".  A
    minimum found this way upper-bounds the true roof value and a maximum
    lower-bounds it.
    """
    rho = as_density(rho)
    cut = as_cut(cut, rho.n_qubits)
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if direction not in ("min", "max"):
        raise DomainError("direction must be 'min' or 'max'")
    if measure == "tsallis":
        if q is None:
            raise DomainError("tsallis measure needs q")
        qi = as_index(q)
    else:
        qi = as_index(1.0)
    if budget.restarts < 1 or budget.iters < 0:
        raise DomainError("budget needs at least one restart")

    mu, vecs = _spectral(rho)
    rank = mu.size
    m = budget.size_for(rank)
    if m < 1 or not rank <= m <= rank * rank:
        raise DomainError(f"decomposition size {m} must lie in [rank, rank^2] = [{rank}, {rank * rank}]")

    sign = 1.0 if direction == "min" else -1.0
    n, side_a = rho.n_qubits, cut.side_a

    def objective(u):
        return sign * _weighted_measure(_mix(u, mu, vecs), n, side_a, measure, qi)

    rng = make_rng(seed)
    R = budget.restarts
    u = np.empty((R, m, m), dtype=np.complex128)
    u[0] = np.eye(m)
    for k in range(1, R):
        u[k] = haar_unitary(m, rng)
    f = objective(u)

    if m > 1:
        eps = np.full(R, STEP_INIT)
        stall = np.zeros(R, dtype=int)
        window_start = f.copy()
        recent_gain = np.full(R, np.inf)
        for it in range(budget.iters):
            cand = _expi(_random_hermitian(rng, (R,), m), eps) @ u
            fc = objective(cand)
            better = fc < f
            u[better] = cand[better]
            f = np.where(better, fc, f)
            stall = np.where(better, 0, stall + 1)
            shrink = stall >= PATIENCE
            eps = np.where(shrink, np.maximum(eps / 2, STEP_FLOOR), eps)
            stall[shrink] = 0
            if (it + 1) % PATIENCE == 0:
                recent_gain = window_start - f
                window_start = f.copy()
    else:
        recent_gain = np.zeros(R)

    best = int(np.argmin(f))  # first index wins ties
    decomp = _as_decomposition(_mix(u[best], mu, vecs))
    value = float(np.dot(decomp.weights, [
        _weighted_measure(s.amplitudes[None, None, :], n, side_a, measure, qi)[0]
        for s in decomp.states]))
    return RoofResult(value=value, best=decomp, restarts_used=R,
                      converged=bool(recent_gain[best] < CONVERGED_TOL))
