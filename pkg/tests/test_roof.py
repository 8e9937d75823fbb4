import math

import numpy as np
import pytest

from qtsallis.concurrence import coa_2q, concurrence_2q, concurrence_pure
from qtsallis.entropy import tsallis_entropy
from qtsallis.gq_analysis import g_q
from qtsallis.qmath import (
    DensityMatrix,
    DomainError,
    derive_seed,
    haar_random_pure,
    partial_trace,
    random_mixed,
)
from qtsallis.roof import Budget, decomposition_from_unitary, roof_extremize

GHZ_MARGINAL = DensityMatrix(np.diag([0.5, 0, 0, 0.5]))
SMALL = Budget(m=4, restarts=8, iters=150)


def test_identity_gives_spectral_decomposition():
    rho = DensityMatrix(np.diag([2 / 3, 1 / 3]))
    dec = decomposition_from_unitary(rho, np.eye(2))
    assert np.allclose(dec.weights, [2 / 3, 1 / 3], atol=1e-15)
    assert abs(abs(dec.states[0].amplitudes[0]) - 1) < 1e-15
    assert abs(abs(dec.states[1].amplitudes[1]) - 1) < 1e-15
    padded = decomposition_from_unitary(rho, np.eye(3))
    assert np.allclose(padded.weights, [2 / 3, 1 / 3, 0], atol=1e-15)


def test_hadamard_mixing():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    dec = decomposition_from_unitary(DensityMatrix(np.eye(2) / 2), h)
    assert np.allclose(dec.weights, [0.5, 0.5], atol=1e-15)
    overlaps = sorted(abs(s.amplitudes @ [1, 1]) / math.sqrt(2) for s in dec.states)
    minus = sorted(abs(s.amplitudes @ [1, -1]) / math.sqrt(2) for s in dec.states)
    assert np.allclose(overlaps, [0, 1], atol=1e-12) and np.allclose(minus, [0, 1], atol=1e-12)


def test_reconstruction_invariant(rng):
    from qtsallis.qmath import haar_unitary
    for i in range(50):
        rank = 1 + i % 4
        rho = random_mixed(2, rank, derive_seed(31, i))
        m = rank + int(rng.integers(0, 3))
        dec = decomposition_from_unitary(rho, haar_unitary(m, rng))
        assert abs(dec.weights.sum() - 1) <= 1e-10 and np.all(dec.weights >= 0)
        assert np.max(np.abs(dec.reconstruct() - rho.matrix)) <= 1e-8


def test_decomposition_errors():
    rho = random_mixed(2, 3, 1)
    with pytest.raises(DomainError):
        decomposition_from_unitary(rho, np.eye(2))
    with pytest.raises(DomainError):
        decomposition_from_unitary(rho, np.ones((3, 3)))


@pytest.mark.parametrize("direction", ["min", "max"])
def test_pure_input(direction):
    psi = haar_random_pure(2, 4)
    res = roof_extremize(psi.projector(), (0,), "tsallis", direction, Budget(restarts=3, iters=10), q=2)
    assert res.value == pytest.approx(tsallis_entropy(partial_trace(psi, [0]), 2), abs=1e-12)
    res = roof_extremize(psi.projector(), (0,), "concurrence", direction, Budget(restarts=2, iters=5))
    assert res.value == pytest.approx(concurrence_pure(psi, (0,)), abs=1e-12)


def test_tsallis_two_min_matches_closed_form():
    rho = random_mixed(2, 2, 77)
    res = roof_extremize(rho, (0,), "tsallis", "min", Budget(m=4, restarts=32, iters=400), q=2)
    assert res.value == pytest.approx(concurrence_2q(rho) ** 2 / 2, abs=1e-3)


def test_ghz_marginal_coa():
    res = roof_extremize(GHZ_MARGINAL, (0,), "concurrence", "max", Budget(m=4, restarts=16, iters=300))
    assert res.value == pytest.approx(1.0, abs=1e-3)
    assert np.max(np.abs(res.best.reconstruct() - GHZ_MARGINAL.matrix)) <= 1e-8


def test_value_is_weighted_average():
    rho = random_mixed(2, 3, 5)
    res = roof_extremize(rho, (0,), "tsallis", "min", SMALL, seed=3, q=1.5)
    avg = sum(w * tsallis_entropy(partial_trace(s, [0]), 1.5)
              for w, s in zip(res.best.weights, res.best.states) if w > 0)
    assert abs(res.value - avg) <= 1e-10
    assert res.restarts_used == SMALL.restarts


def test_von_neumann_measure():
    rho = random_mixed(2, 2, 8)
    res = roof_extremize(rho, (0,), "von_neumann", "min", Budget(m=4, restarts=32, iters=400))
    from qtsallis.gq_analysis import eps_eof
    assert res.value == pytest.approx(eps_eof(concurrence_2q(rho)), abs=1e-3)


def test_determinism():
    rho = random_mixed(3, 2, 6)
    a = roof_extremize(rho, (0,), "tsallis", "max", SMALL, seed=11, q=2.5)
    b = roof_extremize(rho, (0,), "tsallis", "max", SMALL, seed=11, q=2.5)
    assert a.value == b.value and a.converged == b.converged
    assert np.array_equal(a.best.weights, b.best.weights)


def test_sandwich():
    for i in range(200):
        rho = random_mixed(2, 2 + i % 3, derive_seed(41, i))
        q = (1.5, 2.0, 3.0)[i % 3]
        lo = roof_extremize(rho, (0,), "tsallis", "min", Budget(restarts=2, iters=30), seed=i, q=q)
        assert lo.value >= g_q(concurrence_2q(rho), q) - 1e-6
        hi = roof_extremize(rho, (0,), "concurrence", "max", Budget(restarts=2, iters=30), seed=i)
        assert hi.value <= coa_2q(rho) + 1e-6


def test_budget_and_tag_errors():
    rho = random_mixed(2, 2, 1)
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "negativity", "min")
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "tsallis", "min")
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "concurrence", "sideways")
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "concurrence", "min", Budget(restarts=0))
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "concurrence", "min", Budget(m=1))
    with pytest.raises(DomainError):
        roof_extremize(rho, (0,), "concurrence", "min", Budget(m=5))


def test_default_size():
    assert Budget().size_for(1) == 1
    assert Budget().size_for(2) == 4
    assert Budget().size_for(3) == 6
    assert Budget(m=9).size_for(3) == 9


def test_three_qubit_cut():
    rho = random_mixed(3, 2, 12)
    res = roof_extremize(rho, (0, 2), "tsallis", "min", SMALL, q=2)
    assert res.value >= 0
    assert np.max(np.abs(res.best.reconstruct() - rho.matrix)) <= 1e-8
