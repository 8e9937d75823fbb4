"""Concurrence of pure states and of two-qubit mixed states.

Concurrence of assistance for two qubits lives here as well.  The spin-flip
values lambda_i (square roots of the eigenvalues of
sqrt(rho) rho~ sqrt(rho)) are obtained as the singular values of
tau = A^T (Y (x) Y) A, where A = V sqrt(mu) holds the subnormalized
eigenvectors of rho.  Both routes have the same nonzero spectrum, but the
singular values are accurate to machine precision in absolute terms.  A
square root of a roundoff eigenvalue would instead leave an error of order
1e-8 on every rank-deficient input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmath import DensityMatrix, DomainError, PureState, as_cut, clamp_spectrum, reduced_from_vectors

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y).real  # real: antidiagonal (-1, 1, 1, -1)

# Eigen-components of rho below this weight are treated as numerically absent.
RANK_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class SpinFlipPair:
    rho: DensityMatrix
    rho_tilde: np.ndarray
    lambdas: np.ndarray  # descending, length 4


def _require_two_qubits(rho: DensityMatrix) -> None:
    if rho.n_qubits != 2:
        raise DomainError(f"expected a two-qubit state, got {rho.n_qubits} qubits")


def concurrence_pure(psi: PureState, cut) -> float:
    """sqrt(2 (1 - tr rho_A^2)) across the given cut."""
    cut = as_cut(cut, psi.n_qubits)
    red = reduced_from_vectors(psi.amplitudes, psi.n_qubits, cut.side_a)
    # 1 - tr rho^2 = 2 e2(spectrum) = 2 * (sum of 2x2 principal minors); the
    # minor sum avoids cancelling against 1 for nearly product states
    d = np.real(np.diag(red))
    minors = np.outer(d, d) - np.abs(red) ** 2
    e2 = 0.5 * (np.sum(minors) - np.trace(minors))
    return float(np.sqrt(max(0.0, 4.0 * e2)))


def spin_flip(rho: DensityMatrix) -> SpinFlipPair:
    _require_two_qubits(rho)
    m = rho.matrix
    rho_tilde = YY @ m.conj() @ YY
    w, v = np.linalg.eigh(m)
    w = clamp_spectrum(w)
    keep = w > RANK_TOL
    a = v[:, keep] * np.sqrt(w[keep])
    sv = np.linalg.svd(a.T @ YY @ a, compute_uv=False) if keep.any() else np.zeros(0)
    lambdas = np.zeros(4)
    lambdas[: sv.size] = np.sort(sv)[::-1]
    return SpinFlipPair(rho=rho, rho_tilde=rho_tilde, lambdas=lambdas)


def concurrence_2q(rho: DensityMatrix) -> float:
    """max(0, l1 - l2 - l3 - l4)."""
    lam = spin_flip(rho).lambdas
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def coa_2q(rho: DensityMatrix) -> float:
    """Concurrence of assistance, l1 + l2 + l3 + l4 = tr sqrt(sqrt(rho) rho~ sqrt(rho))."""
    return float(min(1.0, np.sum(spin_flip(rho).lambdas)))
