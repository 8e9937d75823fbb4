import math

import numpy as np
import pytest

from qtsallis import gq_analysis as gqa
from qtsallis.qmath import DomainError

X = np.linspace(0, 1, 1001)


def g_plain(x, q):
    """Textbook formula, no cancellation guards; oracle for the derivatives."""
    s = math.sqrt(1 - x * x)
    return (1 - ((1 + s) / 2) ** q - ((1 - s) / 2) ** q) / (q - 1)


def test_integer_polynomials():
    assert np.max(np.abs(gqa.g_q(X, 2) - X**2 / 2)) <= 1e-12
    assert np.max(np.abs(gqa.g_q(X, 3) - 3 * X**2 / 8)) <= 1e-12
    assert np.max(np.abs(gqa.g_q(X, 4) - (8 * X**2 - X**4) / 24)) <= 1e-12


def test_g_examples():
    assert gqa.g_q(0.6, 2) == pytest.approx(0.18, abs=1e-15)
    assert gqa.g_q(1, 4) == pytest.approx(7 / 24, abs=1e-15)
    assert gqa.g_q(1, 3) == pytest.approx(3 / 8, abs=1e-15)
    assert gqa.g_q(1, 1) == pytest.approx(math.log(2), abs=1e-15)
    assert gqa.g_q(0, 2.7) == 0.0
    for q in (0.5, 1.5, 2.5, 4.2):
        assert gqa.g_q_at_one(q) == pytest.approx((1 - 2 ** (1 - q)) / (q - 1), abs=1e-14)


def test_g_domain():
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(DomainError):
            gqa.g_q(bad, 2)
    with pytest.raises(DomainError):
        gqa.g_q(0.5, 0)
    # roundoff above 1 is tolerated
    assert gqa.g_q(1 + 1e-15, 2) == pytest.approx(0.5)


def test_eps_eof():
    assert gqa.eps_eof(0.6) == pytest.approx(-0.9 * math.log(0.9) - 0.1 * math.log(0.1), abs=1e-14)
    assert gqa.eps_eof(1.0) == pytest.approx(math.log(2), abs=1e-15)
    assert gqa.binary_entropy(0.5) == pytest.approx(math.log(2))


def test_q_one_continuity():
    for q in (1 - 1e-5, 1 + 1e-5):
        assert np.max(np.abs(gqa.g_q(X, q) - gqa.eps_eof(X))) <= 1e-4
    assert np.max(np.abs(gqa.g_q(X, 1.0) - gqa.eps_eof(X))) <= 1e-15


@pytest.mark.parametrize("q", [0.5, 1, 2, 3, 4, 4.2])
def test_strictly_increasing(q):
    assert np.all(np.diff(gqa.g_q(X, q)) > 0)


def test_derivative_examples():
    assert gqa.g_q_d1(0.5, 2) == pytest.approx(0.5, abs=1e-14)
    assert gqa.g_q_d1(0.5, 3) == pytest.approx(0.375, abs=1e-14)
    h = 1e-5
    fd = (g_plain(0.3 + h, 1.5) - g_plain(0.3 - h, 1.5)) / (2 * h)
    assert gqa.g_q_d1(0.3, 1.5) == pytest.approx(fd, rel=1e-6)
    assert np.allclose(gqa.g_q_d2(np.linspace(0.05, 0.95, 19), 2), 1.0, atol=1e-12)
    assert gqa.g_q_d2(0.5, 4) == pytest.approx(13 / 24, abs=1e-13)
    assert gqa.g_q_d2(0.97, 4.5) < 0


def test_derivatives_positive():
    xs = np.linspace(0.01, 0.99, 99)
    for q in (0.3, 1, 2.5, 6):
        assert np.all(gqa.g_q_d1(xs, q) > 0)


def test_derivative_endpoints_refused():
    for x in (0.0, 1.0, 1 - 1e-9):
        with pytest.raises(DomainError):
            gqa.g_q_d1(x, 2)
        with pytest.raises(DomainError):
            gqa.g_q_d2(x, 2)


def test_derivatives_at_q_one_limit():
    x = 0.4
    h = 1e-5
    fd = (gqa.eps_eof(x + h) - gqa.eps_eof(x - h)) / (2 * h)
    assert gqa.g_q_d1(x, 1.0) == pytest.approx(fd, rel=1e-7)
    assert gqa.g_q_d1(x, 1 + 1e-7) == pytest.approx(gqa.g_q_d1(x, 1.0), rel=1e-6)


def test_h_threshold():
    x0 = math.sqrt(3) / 2
    assert gqa.h_threshold(x0) == pytest.approx(5.0, abs=1e-12)
    assert gqa.h_threshold(0.5) == pytest.approx(1 + (1 + math.sqrt(0.75)) / (0.25 * math.sqrt(0.75)))
    assert gqa.h_threshold(0.5) == pytest.approx(9.6188, abs=1e-4)
    for x in (0.1, 0.5, 0.99):
        assert gqa.h_threshold(x) > 5
    xm, hm = gqa.minimize_h()
    assert xm == pytest.approx(x0, abs=1e-4) and hm == pytest.approx(5, abs=1e-6)


def test_non_convex_beyond_five():
    assert gqa.g_q_d2(math.sqrt(3) / 2, 5.5) < 0


def test_scan_examples():
    conv = gqa.scan_convexity(gqa.ScanGrid(0.01, 0.99, 200, 1, 4, 200))
    assert conv.sign_violations == [] and conv.min_value >= -1e-9
    assert conv.values.shape == (200, 200)
    assert conv.min_value == conv.values.min()

    bad = gqa.scan_convexity(gqa.ScanGrid(0.01, 0.99, 300, 4.4, 4.5, 100))
    assert bad.sign_violations
    assert all(gqa.g_q_d2(x, q) < -1e-9 for x, q in bad.sign_violations[:20])

    low = gqa.scan_convexity(gqa.ScanGrid(0.01, 0.99, 300, 0.7, 1.0, 100))
    assert low.sign_violations == []


def test_region_report_layout():
    grid = gqa.ScanGrid(0.1, 0.9, 3, 4.4, 4.5, 2)
    rep = gqa.scan_convexity(grid)
    rows = list(rep.rows())
    assert [r[:2] for r in rows[:3]] == [(0.1, 4.4), (0.5, 4.4), (0.9, 4.4)]
    summ = rep.summary()
    assert set(summ) == {"min_value", "min_x", "min_q", "violations"}
    assert all(v["value"] < -1e-9 for v in summ["violations"])


def test_scan_grid_validation():
    with pytest.raises(DomainError):
        gqa.ScanGrid(0.0, 0.9, 10, 1, 4, 10)
    with pytest.raises(DomainError):
        gqa.ScanGrid(0.1, 0.9, 1, 1, 4, 10)
    with pytest.raises(DomainError):
        gqa.ScanGrid(0.1, 0.9, 10, 4, 1, 10)


def test_m_q_examples():
    assert gqa.m_q(0.3, 0.7, 2) == pytest.approx(0, abs=1e-15)
    assert gqa.m_q(0.5, 0.5, 3) == pytest.approx(0, abs=1e-15)
    assert gqa.m_q(0.6, 0.6, 2.5) > 0
    assert gqa.m_q(0.6, 0.6, 1.5) < 0
    assert gqa.m_q(0.0, 0.4, 1.7) == pytest.approx(0, abs=1e-15)
    with pytest.raises(DomainError):
        gqa.m_q(0.8, 0.8, 2)


def test_m_q_signs_random(rng):
    r = np.sqrt(rng.uniform(0, 1, 10_000))
    t = rng.uniform(0, np.pi / 2, 10_000)
    x, y = r * np.cos(t), r * np.sin(t)
    for q in (2, 2.25, 2.5, 2.75, 3):
        assert gqa.m_q(x, y, q).min() >= -1e-12
    for q in (1.25, 1.75, 3.25, 3.75):
        assert gqa.m_q(x, y, q).max() <= 1e-12


def test_n_q():
    ts = np.linspace(0.05, 0.95, 50)
    assert np.allclose(gqa.n_q(ts, 2), 2, atol=1e-12)
    assert np.allclose(gqa.n_q(ts, 3), 4, atol=1e-12)
    # strictly monotone off the integers; the direction flips on (2, 3)
    assert gqa.n_q(0.3, 2.5) < gqa.n_q(0.7, 2.5)
    for q in (1.01, 1.5, 1.99, 3.01, 3.5, 4.0):
        assert np.all(np.diff(gqa.n_q(ts, q)) < 0)
    for q in (2.01, 2.5, 2.99):
        assert np.all(np.diff(gqa.n_q(ts, q)) > 0)
    with pytest.raises(DomainError):
        gqa.n_q(0.5, 1.0)


def test_b_q():
    assert gqa.b_q(0.4, 2) == pytest.approx(0, abs=1e-14)
    assert gqa.b_q(gqa.INV_SQRT2, 3) == pytest.approx(0, abs=1e-14)
    assert gqa.b_q(gqa.INV_SQRT2, 2.5) > 0
    assert gqa.b_q(gqa.INV_SQRT2, 3.5) < 0
    for q in (1.3, 2.5, 3.9):
        assert gqa.b_q(0.0, q) == pytest.approx(0, abs=1e-14)
        assert gqa.b_q(1.0, q) == pytest.approx(0, abs=1e-14)
        for x in (0.2, 0.5, 0.9):
            assert gqa.b_q(x, q) == pytest.approx(gqa.m_q(x, math.sqrt(1 - x * x), q), abs=1e-12)
    with pytest.raises(DomainError):
        gqa.b_q(0.5, 1)


def test_b_q_at_half_sqrt2():
    assert gqa.b_q_at_half_sqrt2(2) == pytest.approx(0, abs=1e-14)
    assert gqa.b_q_at_half_sqrt2(3) == pytest.approx(0, abs=1e-14)
    for q in np.linspace(1.05, 4, 60):
        assert gqa.b_q_at_half_sqrt2(q) == pytest.approx(gqa.b_q(gqa.INV_SQRT2, q), abs=1e-12)
    qs, vals, roots = gqa.scan_bq(1.01, 4, 600)
    assert len(roots) == 2
    assert roots[0] == pytest.approx(2, abs=1e-3) and roots[1] == pytest.approx(3, abs=1e-3)
    assert np.all(vals[qs < 1.999] < 0) and np.all(vals[(qs > 2.001) & (qs < 2.999)] > 0)
    assert np.all(vals[qs > 3.001] < 0)
    with pytest.raises(DomainError):
        gqa.scan_bq(1.0, 4, 10)


def test_convexity_boundaries():
    upper = gqa.convexity_boundary(4.0, 4.5)
    assert 4.2 < upper < 4.5
    assert gqa.scan_convexity(gqa.ScanGrid(0.01, 0.99, 981, upper - 1e-3, upper - 1e-3, 2)).sign_violations == []
    lower = gqa.convexity_boundary(0.4, 0.8)
    assert 0.6 < lower < 0.7
    with pytest.raises(DomainError):
        gqa.convexity_boundary(1.0, 4.0)
