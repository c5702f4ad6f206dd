"""Second-moment integrals, windowed averages, and kernel machinery,
checked against brute-force quadrature and closed forms."""

import math

import numpy as np
import pytest

from gbavg.analysis import (PiecewiseConstant, SequenceWindow, _drift_prefixes,
                            _en_spectrum, _k_window, dirichlet_bound,
                            dirichlet_eval, en_average_k, en_average_s0sq,
                            fejer_eval, _fejer_sum_form, gallagher_inequality_check,
                            gallagher_lhs, gallagher_rhs, i_integral,
                            j_integral, k_integral, lemma7_check,
                            nearest_int_distance, s0_eval, s0sq_weighted_integral,
                            weighted_bigr_sum)
from gbavg.errors import DegenerateWindowError
from gbavg.mangoldt import build_mangoldt, psi

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)


@pytest.fixture(scope="module")
def table4k():
    return build_mangoldt(4096)


# ---------------------------------------------------------------- step funcs

def test_piecewise_constant_eval_and_validation():
    f = PiecewiseConstant([0.0, 1.0, 3.0], [2.0, -1.0])
    assert f(0.0) == 2.0
    assert f(0.999) == 2.0
    assert f(1.0) == -1.0  # right-continuous
    assert f(3.0) == -1.0  # closed right endpoint
    with pytest.raises(ValueError):
        f(3.5)
    with pytest.raises(ValueError, match="ascending"):
        PiecewiseConstant([0.0, 2.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError, match="interval values"):
        PiecewiseConstant([0.0, 1.0, 2.0], [1.0])
    with pytest.raises(ValueError, match="breakpoints"):
        PiecewiseConstant([0.0], [])


def test_integral_sq_affine_hand_case():
    # step 0 on [0,1), 2 on [1,3), against the line t:
    # int_0^1 t^2 + int_1^3 (2-t)^2 = 1/3 + 2/3
    f = PiecewiseConstant([0.0, 1.0, 3.0], [0.0, 2.0])
    assert f.integral_sq_affine(0.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    # constant reference line
    assert f.integral_sq_affine(1.0, 0.0) == pytest.approx(1.0 + 2.0, rel=1e-14)


# ------------------------------------------------------- drift integrals

def test_i_integral_small_closed_form(table600):
    # psi vanishes below 2, so the drift is -t
    assert i_integral(table600, 2.0) == pytest.approx(8.0 / 3.0, rel=1e-12)


def test_j_integral_small_closed_form(table600):
    want = 1.0 + (LOG2 - 1.0) ** 2
    assert j_integral(table600, 2.0, 1.0) == pytest.approx(want, rel=1e-12)


def test_k_integral_small_closed_form(table600):
    want = (LOG3 ** 3 - (LOG3 - 1.0) ** 3) / 3.0
    assert k_integral(table600, 3.0, 1.0) == pytest.approx(want, rel=1e-12)


def _brute_grid(x0: float, x1: float, m: int) -> np.ndarray:
    return x0 + (np.arange(m) + 0.5) * ((x1 - x0) / m)


def test_drift_integrals_match_riemann_brute(table600):
    pref = table600.psi_prefix
    rng = np.random.default_rng(20260814)
    m = 1_000_000
    for _ in range(10):
        x = float(rng.uniform(10.0, 100.0))
        h = float(rng.uniform(1.0, x / 2))
        t = _brute_grid(0.0, x, m)
        ps = pref[np.floor(t).astype(np.int64)]

        want = float(np.mean((ps - t) ** 2) * x)
        assert abs(i_integral(table600, x) - want) <= 5e-5 * max(1.0, want)

        ps2 = pref[np.floor(t + h).astype(np.int64)]
        want = float(np.mean((ps2 - ps - h) ** 2) * x)
        assert abs(j_integral(table600, x, h) - want) <= 5e-5 * max(1.0, want)

        t = _brute_grid(x - h, x, m)
        ps = pref[np.floor(t).astype(np.int64)]
        px = pref[int(math.floor(x))]
        want = float(np.mean((px - ps - (x - t)) ** 2) * h)
        assert abs(k_integral(table600, x, h) - want) <= 5e-5 * max(1.0, want)


def test_k_chain_inequality(table600):
    # K(x,h) <= 2h (psi(x)-x)^2 + 2 (I(x) - I(x-h)) + 4h^3
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = float(rng.uniform(20.0, 500.0))
        h = float(rng.uniform(1.0, x / 2))
        drift = psi(table600, x) - x
        lhs = k_integral(table600, x, h)
        rhs = (2.0 * h * drift * drift
               + 2.0 * (i_integral(table600, x) - i_integral(table600, x - h))
               + 4.0 * h ** 3)
        assert lhs <= rhs


def test_k_tiny_window_is_tiny(table600):
    assert k_integral(table600, 100.0, 0.001) < 1e-2


def test_k_window_fast_path_matches_exact(table600):
    pre = _drift_prefixes(table600)
    rng = np.random.default_rng(99)
    for _ in range(300):
        x = float(rng.uniform(5.0, 590.0))
        h = float(rng.uniform(0.01, min(x, 80.0)))
        a = k_integral(table600, x, h)
        b = _k_window(pre, x, h)
        assert abs(a - b) <= 1e-6 * max(1.0, abs(a))


def test_integral_domain_guards(table600):
    with pytest.raises(ValueError):
        i_integral(table600, 0.0)
    with pytest.raises(ValueError):
        i_integral(table600, 601.0)
    with pytest.raises(ValueError):
        j_integral(table600, 10.0, 0.5)
    with pytest.raises(ValueError):
        j_integral(table600, 599.0, 2.0)
    with pytest.raises(ValueError):
        k_integral(table600, 10.0, 11.0)
    with pytest.raises(ValueError):
        k_integral(table600, 601.0, 1.0)


# ------------------------------------------------------------ window means

def test_en_average_k_error_estimate_is_honest(table4k):
    # self-validating brute: midpoint means at two resolutions bound their
    # own quadrature error, and the reported estimate must cover the rest
    for N, h, m in ((50, 2.0, 2000), (200, 5.0, 2000), (1000, 13.0, 2500)):
        det = {}
        got = en_average_k(table4k, N, h, detail=det)
        assert det["converged"]

        def brute(mm):
            xs = _brute_grid(float(N), float(2 * N), mm)
            return math.fsum(k_integral(table4k, float(x), h) for x in xs) / mm

        b1, b2 = brute(m), brute(2 * m)
        assert abs(got - b2) <= det["error_estimate"] + abs(b2 - b1), (N, h)


def test_en_average_k_full_window(table600):
    val = en_average_k(table600, 300, 300.0)
    assert math.isfinite(val)
    assert val >= 0.0


def test_en_average_k_guards(table600):
    with pytest.raises(ValueError):
        en_average_k(table600, 300, 0.0)
    with pytest.raises(ValueError):
        en_average_k(table600, 300, 301.0)
    with pytest.raises(ValueError):
        en_average_k(table600, 500, 1.0)


def test_en_average_s0sq_matches_unit_interval_means(table600):
    N, alpha = 100, 0.3
    want = np.mean([abs(s0_eval(table600, alpha, m + 0.5)) ** 2
                    for m in range(N, 2 * N)])
    assert en_average_s0sq(table600, N, alpha) == pytest.approx(float(want), rel=1e-9)


def test_en_average_s0sq_at_zero_is_mean_square_drift(table600):
    N = 100
    want = np.mean([(psi(table600, float(m)) - m) ** 2 for m in range(N, 2 * N)])
    assert en_average_s0sq(table600, N, 0.0) == pytest.approx(float(want), rel=1e-12)


def test_en_average_s0sq_guards(table600):
    with pytest.raises(ValueError):
        en_average_s0sq(table600, 0, 0.3)
    with pytest.raises(ValueError):
        en_average_s0sq(table600, 301, 0.3)


def test_en_spectrum_reproduces_pointwise_values(table600):
    N = 64
    B = _en_spectrum(table600, N)
    d = np.arange(1, B.size)
    for alpha in (0.0, 0.17, 0.5, 0.83):
        want = en_average_s0sq(table600, N, alpha)
        got = float(B[0] + 2.0 * np.dot(B[1:], np.cos(2 * math.pi * d * alpha)))
        assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


# ------------------------------------------------- low-frequency mass check

def test_lemma7_matches_coefficient_integral(table4k):
    # the spectrum integrates in closed form over |alpha| <= 1/(2h)
    for N, h in ((1000, 1), (1000, 4), (2000, 16)):
        B = _en_spectrum(table4k, N)
        d = np.arange(1, B.size)
        closed = (B[0] / h
                  + 2.0 * float(np.dot(B[1:], np.sin(math.pi * d / h) / (math.pi * d))))
        scale = N * math.log(N) ** 2 / h
        got = lemma7_check(table4k, N, h) * scale
        assert got == pytest.approx(closed, rel=1e-7), (N, h)


def test_lemma7_ratio_bounded_over_grid(big_table):
    for N in (1_000, 10_000, 100_000):
        for h in (1, 4, 16, 64):
            r = lemma7_check(big_table, N, h)
            assert 0.0 < r < 1.0, (N, h)


def test_lemma7_h_doubling_drop(big_table):
    # doubling h should shed low-frequency mass at a stable geometric rate
    for N in (1_000, 10_000):
        ratios = [lemma7_check(big_table, N, h) for h in (1, 2, 4, 8, 16, 32)]
        for a, b in zip(ratios, ratios[1:]):
            assert 0.3 <= b / a <= 0.9, N


def test_lemma7_guards(table600):
    with pytest.raises(ValueError):
        lemma7_check(table600, 100, 0)
    with pytest.raises(ValueError):
        lemma7_check(table600, 100, 101)
    with pytest.raises(ValueError):
        lemma7_check(table600, 500, 1)


# ---------------------------------------------------------------- gallagher

def test_gallagher_hand_values():
    pair = SequenceWindow({1: 1.0, 2: 1.0})
    assert gallagher_lhs(pair, 2) == pytest.approx(3.0, rel=1e-14)
    spike = SequenceWindow({5: 3.0})
    assert gallagher_rhs(spike, 7) == pytest.approx(9.0, rel=1e-14)
    rnd = SequenceWindow({2: 1.5, 9: -0.5, 11: 2.0})
    assert gallagher_lhs(rnd, 1) == pytest.approx(1.5 ** 2 + 0.5 ** 2 + 4.0, rel=1e-14)


def test_gallagher_lhs_is_kernel_integral():
    # lhs == mean over a uniform grid of |S(alpha)|^2 fejer(alpha, H), the
    # grid mean being exact for trig polynomials below the grid size
    rng = np.random.default_rng(20260814)
    M = 512
    alphas = np.arange(M) / M
    for _ in range(100):
        support = rng.choice(np.arange(1, 40), size=rng.integers(2, 12),
                             replace=False)
        coeffs = rng.normal(size=support.size)
        H = int(rng.integers(1, 10))
        seq = SequenceWindow(dict(zip(support.tolist(), coeffs.tolist())))
        phases = np.exp(2j * math.pi * np.outer(alphas, support))
        s_sq = np.abs(phases @ coeffs) ** 2
        kern = np.array([fejer_eval(float(a), H) for a in alphas])
        want = float(np.mean(s_sq * kern))
        assert gallagher_lhs(seq, H) == pytest.approx(want, abs=1e-10, rel=1e-10)


def test_gallagher_ratio_respects_kernel_constant():
    rng = np.random.default_rng(11)
    for _ in range(12):
        support = rng.choice(np.arange(1, 60), size=rng.integers(3, 15),
                             replace=False)
        coeffs = rng.normal(size=support.size)
        h = int(rng.integers(1, 12))
        seq = SequenceWindow(dict(zip(support.tolist(), coeffs.tolist())))
        ratio = gallagher_inequality_check(seq, h)
        assert 0.0 < ratio <= math.pi ** 2 / 4.0 + 1e-3


def test_gallagher_spike_ratio_is_unity():
    det = {}
    ratio = gallagher_inequality_check(SequenceWindow({5: 3.0}), 4, detail=det)
    assert ratio == pytest.approx(1.0, rel=1e-10)
    assert det["error_estimate"] < 1e-9


def test_gallagher_degenerate_window():
    with pytest.raises(DegenerateWindowError):
        gallagher_inequality_check(SequenceWindow({}), 3)
    with pytest.raises(ValueError):
        gallagher_lhs(SequenceWindow({1: 1.0}), 0)
    with pytest.raises(ValueError):
        gallagher_rhs(SequenceWindow({1: 1.0}), 0)


# ------------------------------------------------------------------ kernels

def test_fejer_closed_and_sum_forms_agree():
    rng = np.random.default_rng(20260814)
    for _ in range(10_000):
        alpha = float(rng.uniform(1e-6, 1.0 - 1e-6))
        N = int(rng.integers(1, 50))
        assert abs(fejer_eval(alpha, N) - _fejer_sum_form(alpha, N)) <= 1e-10


def test_fejer_point_values_and_positivity():
    assert fejer_eval(0.0, 7) == 7.0
    assert fejer_eval(3.0, 7) == 7.0  # periodic
    assert fejer_eval(0.5, 2) == pytest.approx(0.0, abs=1e-30)
    rng = np.random.default_rng(1)
    for alpha in rng.uniform(-20.0, 20.0, size=10_000):
        assert fejer_eval(float(alpha), 9) >= 0.0
    with pytest.raises(ValueError):
        fejer_eval(0.3, 0)


def test_fejer_unit_mean():
    # frequencies stop below N, so a 2N-point grid mean is the exact integral
    N, M = 7, 16
    mean = np.mean([fejer_eval(j / M, N) for j in range(M)])
    assert mean == pytest.approx(1.0, rel=1e-12)


def test_dirichlet_matches_brute():
    rng = np.random.default_rng(20260814)
    for _ in range(200):
        alpha = float(rng.uniform(-3.0, 3.0))
        N = int(rng.integers(1, 300))
        n = np.arange(1, N + 1)
        want = complex(np.sum(np.exp(2j * math.pi * alpha * n)))
        got = dirichlet_eval(alpha, N)
        assert abs(got - want) <= 1e-9 * N


def test_dirichlet_point_values_and_bound():
    assert dirichlet_eval(0.0, 12) == complex(12)
    assert abs(dirichlet_eval(1.0 / 3.0, 3)) <= 1e-12
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        alpha = float(rng.uniform(0.0, 1.0))
        N = int(rng.integers(1, 1_000))
        assert abs(dirichlet_eval(alpha, N)) <= dirichlet_bound(alpha, N) + 1e-9
    with pytest.raises(ValueError):
        dirichlet_eval(0.3, 0)


def test_nearest_int_distance():
    assert nearest_int_distance(2.25) == 0.25
    assert nearest_int_distance(-0.4) == pytest.approx(0.4, rel=1e-15)
    assert nearest_int_distance(0.5) == 0.5
    assert nearest_int_distance(7.0) == 0.0


# ------------------------------------------------- weighted window identity

def test_weighted_sum_equals_spectral_integral(table600):
    rng = np.random.default_rng(20260814)
    N = 50
    support = rng.choice(np.arange(2, N + 1), size=20, replace=False)
    t = SequenceWindow(dict(zip(support.tolist(),
                                rng.normal(size=support.size).tolist())))
    closed = weighted_bigr_sum(table600, t, N, 100)
    grids = [s0sq_weighted_integral(table600, t, N, x) for x in (50, 100)]
    assert abs(grids[0] - grids[1]) <= 1e-9  # x drops out for x >= N
    for g in grids:
        assert abs(g - closed) <= 1e-9


def test_weighted_integral_guards(table600):
    t = SequenceWindow({3: 1.0})
    with pytest.raises(ValueError):
        s0sq_weighted_integral(table600, t, 100, 50)
    with pytest.raises(ValueError):
        s0sq_weighted_integral(table600, t, 0, 50)
