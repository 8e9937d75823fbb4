"""Tsallis-q entanglement and its assistance counterpart as state-level measures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .concurrence import coa_2q, concurrence_2q, concurrence_pure
from .entropy import as_index, tsallis_from_spectrum
from .gq_analysis import eps_eof, g_q, g_q_d2
from .qmath import DensityMatrix, DomainError, PureState, as_cut, partial_trace
from .roof import Budget, RoofResult, roof_extremize

PROVEN_Q = (1.0, 4.0)
EXTENDED_Q = (0.7, 4.2)
RELATION_TOL = 1e-9
PURE_RANK_TOL = 1e-12

METHODS = ("pure_exact", "two_qubit_closed_form", "roof_bound")


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class MeasureValue:
    value: float
    method: str
    q: float
    evidence: dict = field(default_factory=dict)


def _check_q_range(q: float, allow_extended: bool) -> dict:
    lo, hi = PROVEN_Q
    if lo <= q <= hi:
        return {}
    elo, ehi = EXTENDED_Q
    if not allow_extended:
        raise DomainError(f"q={q} is outside the proven range [{lo}, {hi}]; "
                          f"pass allow_extended=True for [{elo}, {ehi}]")
    if not elo <= q <= ehi:
        raise DomainError(f"q={q} is outside the extended range [{elo}, {ehi}]")
    xs = np.linspace(0.01, 0.99, 981)
    d2_min = float(np.min(g_q_d2(xs, q)))
    return {"range": "extended", "min_d2_on_grid": d2_min, "convex_on_grid": d2_min >= -1e-9}


def tq_pure(psi: PureState, cut, q) -> MeasureValue:
    """T_q of the marginal on side A; on 2 (x) d cuts also cross-checked against g_q(C)."""
    qi = as_index(q)
    cut = as_cut(cut, psi.n_qubits)
    small = cut.side_a if len(cut.side_a) <= len(cut.side_b) else cut.side_b
    value = tsallis_from_spectrum(partial_trace(psi, small).spectrum(), qi)
    if cut.is_qubit_vs_rest:
        via_c = g_q(concurrence_pure(psi, cut), qi)
        if abs(via_c - value) > RELATION_TOL:
            raise ConsistencyError(f"T_q of marginal {value!r} != g_q(C) {via_c!r}")
    return MeasureValue(value, "pure_exact", qi.q)


def tq_2q(rho: DensityMatrix, q, allow_extended: bool = False) -> MeasureValue:
    """Closed form g_q(C(rho)) for two qubits."""
    qi = as_index(q)
    evidence = _check_q_range(qi.q, allow_extended)
    if rho.n_qubits != 2:
        raise DomainError("closed form needs a two-qubit state")
    return MeasureValue(g_q(concurrence_2q(rho), qi), "two_qubit_closed_form", qi.q, evidence)


def eof_2q(rho: DensityMatrix) -> MeasureValue:
    if rho.n_qubits != 2:
        raise DomainError("closed form needs a two-qubit state")
    return MeasureValue(eps_eof(concurrence_2q(rho)), "two_qubit_closed_form", 1.0)


def teoa_2q_lower(rho: DensityMatrix, q) -> MeasureValue:
    """g_q(CoA), a lower bound on the Tsallis-q entanglement of assistance."""
    qi = as_index(q)
    _check_q_range(qi.q, allow_extended=False)
    if rho.n_qubits != 2:
        raise DomainError("closed form needs a two-qubit state")
    return MeasureValue(g_q(coa_2q(rho), qi), "two_qubit_closed_form", qi.q,
                        {"bound": "lower"})


def _pure_part(rho: DensityMatrix) -> PureState | None:
    w, v = np.linalg.eigh(rho.matrix)
    if w[-2] > PURE_RANK_TOL:
        return None
    return PureState.normalized(v[:, -1])


def tq_mixed_bound(rho: DensityMatrix, cut, q, budget: Budget = Budget(), seed=42) -> MeasureValue:
    """Roof minimum of the average T_q: an upper bound on the mixed-state value."""
    qi = as_index(q)
    cut = as_cut(cut, rho.n_qubits)
    psi = _pure_part(rho)
    if psi is not None:
        return tq_pure(psi, cut, qi)
    res: RoofResult = roof_extremize(rho, cut, "tsallis", "min", budget, seed=seed, q=qi)
    return MeasureValue(res.value, "roof_bound", qi.q,
                        {"bound": "upper", "converged": res.converged,
                         "restarts": res.restarts_used})


def teoa_bound(rho: DensityMatrix, cut, q, budget: Budget = Budget(), seed=42) -> MeasureValue:
    """Roof maximum of the average T_q: a lower bound on the assistance value."""
    qi = as_index(q)
    cut = as_cut(cut, rho.n_qubits)
    psi = _pure_part(rho)
    if psi is not None:
        return tq_pure(psi, cut, qi)
    res = roof_extremize(rho, cut, "tsallis", "max", budget, seed=seed, q=qi)
    return MeasureValue(res.value, "roof_bound", qi.q,
                        {"bound": "lower", "converged": res.converged,
                         "restarts": res.restarts_used})
