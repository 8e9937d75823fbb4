"""The function g_q mapping concurrence to Tsallis-q entanglement, and friends.

    g_q(x) = [1 - ((1+s)/2)^q - ((1-s)/2)^q] / (q - 1),   s = sqrt(1 - x^2)

All formulas are evaluated in forms free of the 0/0 cancellation at q = 1:
u (u^(q-1) - 1) / (q - 1) is computed as u * expm1((q-1) ln u) / (q - 1).
Inside the limit window around q = 1 the exact q -> 1 expressions are used.
Scalar or array arguments are accepted; q broadcasts against x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .entropy import LIMIT_WINDOW, as_index
from .qmath import DomainError

ENDPOINT_GUARD = 1e-8
ROUNDOFF = 1e-12  # concurrences may exceed 1 by this much from roundoff
SIGN_TOL = 1e-9
INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _qval(q):
    if isinstance(q, (int, float)) or hasattr(q, "is_limit_point"):
        return as_index(q).q
    q = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(q)) or np.any(q <= 0):
        raise DomainError("entropic index must be positive")
    return q


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _sqrt_1mx2(x):
    return np.sqrt((1.0 - x) * (1.0 + x))


def _one_minus_s(x, s):
    # 1 - sqrt(1 - x^2) without cancellation for small x
    return x * x / (1.0 + s)


def _near_one(q):
    return np.abs(q - 1.0) < LIMIT_WINDOW


def _xlog_term(u, qm1):
    """u * (u^(q-1) - 1) / (q - 1); limit u ln u at q = 1; 0 at u = 0."""
    pos = u > 0
    lu = np.log(np.where(pos, u, 1.0))
    lim = _near_one(qm1 + 1.0)
    safe = np.where(lim, 1.0, qm1)
    val = np.where(lim, u * lu, u * np.expm1(qm1 * lu) / safe)
    return np.where(pos, val, 0.0)


def _pow_diff_ratio(a, b, qm1):
    """(e^{(q-1)a} - e^{(q-1)b}) / (q - 1), limit a - b at q = 1."""
    lim = _near_one(qm1 + 1.0)
    safe = np.where(lim, 1.0, qm1)
    return np.where(lim, a - b, (np.expm1(qm1 * a) - np.expm1(qm1 * b)) / safe)


def _check_closed(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1 + ROUNDOFF):
        raise DomainError("x must lie in [0, 1]")
    return np.minimum(x, 1.0)


def _check_open(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0) or np.any(x >= 1 - ENDPOINT_GUARD):
        raise DomainError("x must lie strictly inside (0, 1)")
    return x


def binary_entropy(t):
    t = np.asarray(t, dtype=float)
    return _out(-(_xlog_term(t, 0.0) + _xlog_term(1.0 - t, 0.0)))


def eps_eof(x):
    """EoF as a function of concurrence: H(1/2 + sqrt(1 - x^2)/2)."""
    x = _check_closed(x)
    s = _sqrt_1mx2(x)
    return _out(-(_xlog_term((1.0 + s) / 2, 0.0) + _xlog_term(_one_minus_s(x, s) / 2, 0.0)))


def g_q(x, q):
    x = _check_closed(x)
    q = _qval(q)
    s = _sqrt_1mx2(x)
    hi, lo = (1.0 + s) / 2.0, _one_minus_s(x, s) / 2.0
    qm1 = np.asarray(q, dtype=float) - 1.0
    return _out(-(_xlog_term(hi, qm1) + _xlog_term(lo, qm1)))


def g_q_at_one(q) -> float:
    """g_q(1) = (1 - 2^(1-q)) / (q - 1), ln 2 at q = 1."""
    return g_q(1.0, q)


def g_q_d1(x, q):
    """dg_q/dx = q x [(1+s)^(q-1) - (1-s)^(q-1)] / (2^q (q-1) s)."""
    x = _check_open(x)
    q = np.asarray(_qval(q), dtype=float)
    s = _sqrt_1mx2(x)
    ratio = _pow_diff_ratio(np.log1p(s), np.log(_one_minus_s(x, s)), q - 1.0)
    return _out(q * x * ratio / (2.0**q * s))


def g_q_d2(x, q):
    """Second derivative of g_q.

    Rearranged as (q/2^q) [N/((q-1) s^3) - x^2 ((1+s)^(q-2) + (1-s)^(q-2)) / s^2]
    with N = (1+s)^(q-1) - (1-s)^(q-1), which is the same expression with the
    1/(q-1) singularity isolated in one well-conditioned ratio.
    """
    x = _check_open(x)
    q = np.asarray(_qval(q), dtype=float)
    s = _sqrt_1mx2(x)
    a, b = np.log1p(s), np.log(_one_minus_s(x, s))
    ratio = _pow_diff_ratio(a, b, q - 1.0)
    p = np.exp((q - 2.0) * a) + np.exp((q - 2.0) * b)
    return _out(q / 2.0**q * (ratio / s**3 - x * x * p / s**2))


def h_threshold(x):
    """1 + (1 + s)/(x^2 s): the term driving non-convexity is <= 0 iff q >= h(x)."""
    x = _check_open(x)
    s = _sqrt_1mx2(x)
    return _out(1.0 + (1.0 + s) / (x * x * s))


def minimize_h(lo: float = 0.01, hi: float = 0.99) -> tuple[float, float]:
    """Numerically locate the minimum of h on [lo, hi]; returns (x, h(x))."""
    res = optimize.minimize_scalar(h_threshold, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    return float(res.x), float(res.fun)


# -- two-variable analysis ----------------------------------------------------

def m_q(x, y, q):
    """g_q(sqrt(x^2 + y^2)) - g_q(x) - g_q(y) on the quarter disk."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    if np.any(x < 0) or np.any(y < 0) or np.any(r2 > 1.0 + 1e-15):
        raise DomainError("(x, y) must satisfy x, y >= 0 and x^2 + y^2 <= 1")
    r = np.minimum(np.sqrt(r2), 1.0)
    return _out(g_q(r, q) - g_q(x, q) - g_q(y, q))


def _require_q_above_one(q):
    q = _qval(q)
    if np.any(np.asarray(q) <= 1.0):
        raise DomainError("this function is defined for q > 1")
    return q


def n_q(t, q):
    """[(1+s)^(q-1) - (1-s)^(q-1)] / s with s = sqrt(1 - t^2)."""
    t = _check_open(t)
    q = np.asarray(_require_q_above_one(q), dtype=float)
    s = _sqrt_1mx2(t)
    return _out((np.exp((q - 1) * np.log1p(s)) - np.exp((q - 1) * np.log(_one_minus_s(t, s)))) / s)


def b_q(x, q):
    """m_q on the arc x^2 + y^2 = 1, written out in closed form."""
    x = _check_closed(x)
    q = np.asarray(_require_q_above_one(q), dtype=float)
    s = _sqrt_1mx2(x)
    beta = 1.0 / ((q - 1.0) * 2.0**q)
    return _out(beta * ((1 + s) ** q + _one_minus_s(x, s) ** q
                        + (1 + x) ** q + (1 - x) ** q - 2.0 - 2.0**q))


def b_q_at_half_sqrt2(q):
    q = np.asarray(_require_q_above_one(q), dtype=float)
    beta = 1.0 / ((q - 1.0) * 2.0**q)
    return _out(2 * beta * ((1 + INV_SQRT2) ** q + (1 - INV_SQRT2) ** q) - beta * (2.0 + 2.0**q))


# -- scans --------------------------------------------------------------------

@dataclass(frozen=True)
class ScanGrid:
    x_min: float
    x_max: float
    x_steps: int
    q_min: float
    q_max: float
    q_steps: int

    def __post_init__(self):
        if self.x_steps < 2 or self.q_steps < 2:
            raise DomainError("grid needs at least 2 steps per axis")
        if not (0 < self.x_min < self.x_max < 1):
            raise DomainError("x bounds must satisfy 0 < x_min < x_max < 1")
        if not (0 < self.q_min <= self.q_max):
            raise DomainError("q bounds must satisfy 0 < q_min <= q_max")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.x_min, self.x_max, self.x_steps),
                np.linspace(self.q_min, self.q_max, self.q_steps))


@dataclass
class RegionReport:
    grid: ScanGrid
    values: np.ndarray  # shape (q_steps, x_steps)
    min_value: float
    min_location: tuple[float, float]  # (x, q)
    sign_violations: list[tuple[float, float]] = field(default_factory=list)

    def rows(self):
        """(x, q, value) triples, q-major then x, matching the CSV layout."""
        xs, qs = self.grid.axes()
        for i, q in enumerate(qs):
            for j, x in enumerate(xs):
                yield float(x), float(q), float(self.values[i, j])

    def summary(self) -> dict:
        xs, qs = self.grid.axes()
        bad = self.values < -SIGN_TOL
        iq, ix = np.nonzero(bad)
        return {
            "min_value": self.min_value,
            "min_x": self.min_location[0],
            "min_q": self.min_location[1],
            "violations": [{"x": float(xs[j]), "q": float(qs[i]), "value": float(self.values[i, j])}
                           for i, j in zip(iq, ix)],
        }


def scan_convexity(grid: ScanGrid, tol: float = SIGN_TOL) -> RegionReport:
    """Evaluate d^2 g_q / dx^2 on the grid and collect cells below -tol."""
    xs, qs = grid.axes()
    values = g_q_d2(xs[None, :], qs[:, None])
    i, j = np.unravel_index(np.argmin(values), values.shape)
    iq, ix = np.nonzero(values < -tol)
    return RegionReport(
        grid=grid,
        values=values,
        min_value=float(values[i, j]),
        min_location=(float(xs[j]), float(qs[i])),
        sign_violations=[(float(xs[b]), float(qs[a])) for a, b in zip(iq, ix)],
    )


def scan_bq(q_min: float, q_max: float, steps: int) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """b_q(1/sqrt 2) along a q grid plus the zero crossings found by bracketing."""
    if q_min <= 1.0:
        raise DomainError("q_min must exceed 1")
    if steps < 2 or q_max <= q_min:
        raise DomainError("need q_max > q_min and at least 2 steps")
    qs = np.linspace(q_min, q_max, steps)
    vals = b_q_at_half_sqrt2(qs)
    roots = []
    for k in range(steps - 1):
        if vals[k] == 0.0:
            roots.append(float(qs[k]))
        elif vals[k] * vals[k + 1] < 0:
            roots.append(float(optimize.brentq(b_q_at_half_sqrt2, qs[k], qs[k + 1], xtol=1e-13)))
    if vals[-1] == 0.0:
        roots.append(float(qs[-1]))
    return qs, vals, roots


def convexity_boundary(q_lo: float, q_hi: float, x_steps: int = 981,
                       tol: float = 1e-10) -> float:
    """Bisect for the q where min_x g_q'' on [0.01, 0.99] changes sign.

    Exactly one of the two endpoints must be convex on the x grid.  The
    answer depends on the x window, since the violations first appear near
    its edges.
    """
    xs = np.linspace(0.01, 0.99, x_steps)

    def convex(q):
        return bool(np.min(g_q_d2(xs, q)) >= -SIGN_TOL)

    lo_ok, hi_ok = convex(q_lo), convex(q_hi)
    if lo_ok == hi_ok:
        raise DomainError("bracket does not straddle a convexity boundary")
    while q_hi - q_lo > tol:
        mid = 0.5 * (q_lo + q_hi)
        if convex(mid) == lo_ok:
            q_lo = mid
        else:
            q_hi = mid
    return 0.5 * (q_lo + q_hi)
