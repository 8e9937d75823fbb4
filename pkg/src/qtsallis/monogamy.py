"""Residuals of the CKW, dual CKW, Tsallis monogamy and Tsallis polygamy inequalities.

The focus qubit A1 is always qubit 0; permute the state beforehand to study
another focus.  Every residual is signed so that >= 0 means satisfied.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .concurrence import coa_2q, concurrence_2q, concurrence_pure
from .entropy import as_index
from .gq_analysis import g_q
from .qmath import DensityMatrix, DomainError, PureState, derive_seed, haar_random_pure, partial_trace
from .roof import Budget
from .tsallis_ent import teoa_bound, tq_2q, tq_mixed_bound, tq_pure

PASS_TOL = 1e-9
INEQUALITIES = ("ckw", "dual_ckw", "tsallis_mono", "tsallis_poly")


@dataclass
class InequalityReport:
    inequality: str
    q: float | None
    lhs: float
    rhs: float
    residual: float
    passed: bool
    state_id: str | int | None = None
    n_qubits: int | None = None
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _report(inequality, q, lhs, rhs, kind, state_id, n, notes=None) -> InequalityReport:
    residual = lhs - rhs if kind == ">=" else rhs - lhs
    return InequalityReport(inequality, q, float(lhs), float(rhs), float(residual),
                            bool(residual >= -PASS_TOL), state_id, n, notes or {})


def check_q(inequality: str, q) -> float:
    """Validate q against the range in which the inequality is proven (closed ranges)."""
    if inequality in ("ckw", "dual_ckw"):
        return None
    q = as_index(q).q
    if inequality == "tsallis_mono":
        if not 2.0 <= q <= 3.0:
            raise DomainError(f"tsallis_mono needs 2 <= q <= 3, got {q}")
    elif inequality == "tsallis_poly":
        if not (1.0 <= q <= 2.0 or 3.0 <= q <= 4.0):
            raise DomainError(f"tsallis_poly needs q in [1, 2] or [3, 4], got {q}")
    else:
        raise DomainError(f"unknown inequality {inequality!r}")
    return q


class PairData:
    """Concurrence data of one multi-qubit pure state around focus qubit 0."""

    def __init__(self, psi: PureState):
        if psi.n_qubits < 3:
            raise DomainError("monogamy relations need at least 3 qubits")
        self.psi = psi
        self.n = psi.n_qubits
        self.c_focus = concurrence_pure(psi, (0,))
        self.marginals = [partial_trace(psi, (0, i)) for i in range(1, self.n)]
        self.c_pairs = [concurrence_2q(r) for r in self.marginals]
        self.coa_pairs = [coa_2q(r) for r in self.marginals]

    def ckw(self, state_id=None):
        return _report("ckw", None, self.c_focus**2, sum(c * c for c in self.c_pairs),
                       ">=", state_id, self.n)

    def dual_ckw(self, state_id=None):
        return _report("dual_ckw", None, self.c_focus**2, sum(c * c for c in self.coa_pairs),
                       "<=", state_id, self.n)

    def tsallis_mono(self, q, state_id=None):
        q = check_q("tsallis_mono", q)
        lhs = tq_pure(self.psi, (0,), q).value
        rhs = sum(g_q(c, q) for c in self.c_pairs)
        return _report("tsallis_mono", q, lhs, rhs, ">=", state_id, self.n)

    def tsallis_poly(self, q, state_id=None, optimizer_budget: Budget | None = None, seed=42):
        q = check_q("tsallis_poly", q)
        lhs = tq_pure(self.psi, (0,), q).value
        rhs = sum(g_q(c, q) for c in self.coa_pairs)
        notes = {"rhs": "sum of g_q(CoA), a lower bound on the TEoA sum"}
        if optimizer_budget is not None:
            notes["teoa_optimizer"] = [
                teoa_bound(r, (0,), q, optimizer_budget, seed=derive_seed(seed, i)).value
                for i, r in enumerate(self.marginals)]
        return _report("tsallis_poly", q, lhs, rhs, "<=", state_id, self.n, notes)


def ckw_residual(psi: PureState, state_id=None) -> InequalityReport:
    return PairData(psi).ckw(state_id)


def dual_ckw_residual(psi: PureState, state_id=None) -> InequalityReport:
    return PairData(psi).dual_ckw(state_id)


def tsallis_mono_residual(psi: PureState, q, state_id=None) -> InequalityReport:
    check_q("tsallis_mono", q)
    return PairData(psi).tsallis_mono(q, state_id)


def tsallis_poly_residual(psi: PureState, q, state_id=None,
                          optimizer_budget: Budget | None = None, seed=42) -> InequalityReport:
    """Polygamy check with the g_q(CoA) chain on the right-hand side.

    With ``optimizer_budget`` the report also carries roof-maximizer TEoA
    estimates per marginal, for inspection only.
    """
    check_q("tsallis_poly", q)
    return PairData(psi).tsallis_poly(q, state_id, optimizer_budget, seed)


def _pair_marginals(rho: DensityMatrix):
    if rho.n_qubits < 3:
        raise DomainError("monogamy relations need at least 3 qubits")
    return [partial_trace(rho, (0, i)) for i in range(1, rho.n_qubits)]


def mixed_mono_check(rho: DensityMatrix, q, budget: Budget = Budget(), seed=42,
                     state_id=None) -> InequalityReport:
    """Monogamy for a mixed state; the left side is a roof upper bound."""
    q = check_q("tsallis_mono", q)
    lhs = tq_mixed_bound(rho, (0,), q, budget, seed)
    rhs = sum(tq_2q(r, q).value for r in _pair_marginals(rho))
    notes = {"lhs_method": lhs.method}
    if lhs.method == "roof_bound":
        notes["lhs"] = "upper bound on the roof value; a pass is conclusive only with margin"
    return _report("tsallis_mono", q, lhs.value, rhs, ">=", state_id, rho.n_qubits, notes)


def mixed_poly_check(rho: DensityMatrix, q, budget: Budget = Budget(), seed=42,
                     state_id=None) -> InequalityReport:
    """Polygamy for a mixed state: roof upper bound on the left, g_q(CoA) on the right."""
    q = check_q("tsallis_poly", q)
    lhs = tq_mixed_bound(rho, (0,), q, budget, seed)
    rhs = sum(g_q(coa_2q(r), q) for r in _pair_marginals(rho))
    notes = {"lhs_method": lhs.method, "rhs": "sum of g_q(CoA), a lower bound on the TEoA sum"}
    return _report("tsallis_poly", q, lhs.value, rhs, "<=", state_id, rho.n_qubits, notes)


# -- sweeps ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    n_qubits: int
    n_states: int
    q_values: tuple[float, ...] = ()
    seed: int = 42
    inequalities: tuple[str, ...] = ("ckw",)

    def __post_init__(self):
        if not 3 <= self.n_qubits <= 5:
            raise DomainError("sweeps support 3 to 5 qubits")
        if self.n_states < 0:
            raise DomainError("n_states must be nonnegative")
        for ineq in self.inequalities:
            if ineq not in INEQUALITIES:
                raise DomainError(f"unknown inequality {ineq!r}")
            if ineq in ("tsallis_mono", "tsallis_poly"):
                if not self.q_values:
                    raise DomainError(f"{ineq} needs at least one q value")
                for q in self.q_values:
                    check_q(ineq, q)

    def as_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "n_states": self.n_states,
                "q_values": list(self.q_values), "seed": self.seed,
                "inequalities": list(self.inequalities)}


@dataclass
class SweepSummary:
    min_residual: float | None
    argmin_seed: int | None
    violation_count: int
    n_reports: int
    config: dict

    def as_dict(self) -> dict:
        return asdict(self)


def sweep_state_seed(seed: int, index: int) -> int:
    return derive_seed(seed, index)


def run_sweep(config: SweepConfig) -> tuple[list[InequalityReport], SweepSummary]:
    """Evaluate the requested inequalities on Haar-random pure states.

    State k is ``haar_random_pure(n_qubits, sweep_state_seed(seed, k))``;
    reports are ordered by state, then inequality, then q.
    """
    reports: list[InequalityReport] = []
    for k in range(config.n_states):
        s = sweep_state_seed(config.seed, k)
        data = PairData(haar_random_pure(config.n_qubits, s))
        for ineq in config.inequalities:
            if ineq == "ckw":
                reports.append(data.ckw(s))
            elif ineq == "dual_ckw":
                reports.append(data.dual_ckw(s))
            elif ineq == "tsallis_mono":
                reports.extend(data.tsallis_mono(q, s) for q in config.q_values)
            else:
                reports.extend(data.tsallis_poly(q, s) for q in config.q_values)
    violations = sum(not r.passed for r in reports)
    if reports:
        worst = min(reports, key=lambda r: r.residual)
        summary = SweepSummary(worst.residual, worst.state_id, violations, len(reports),
                               config.as_dict())
    else:
        summary = SweepSummary(None, None, 0, 0, config.as_dict())
    return reports, summary


def min_residual(reports, inequality: str | None = None) -> float:
    vals = [r.residual for r in reports if inequality is None or r.inequality == inequality]
    return float(np.min(vals)) if vals else float("nan")
