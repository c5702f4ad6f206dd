"""Zero-table ingestion and truncated zero sums, cross-checked against
high-precision brute-force evaluation."""

import math

import mpmath
import numpy as np
import pytest

from gbavg.errors import CapacityError
from gbavg.zeros import (double_zero_sum, gamma_weighted_sum, load_zeros,
                         rvm_count, tail_estimate, zero_sum)


def test_bundled_table_shape(zeros):
    assert zeros.count == 100_000
    assert zeros.ordinates.size == 100_000
    assert zeros.ordinates[0] == pytest.approx(14.134725142, abs=1e-8)
    assert zeros.t_max == pytest.approx(74920.827498994, abs=1e-6)
    zeros.validate()


def test_first_ordinates_against_mp(zeros):
    mpmath.mp.dps = 20
    for k in range(1, 31):
        want = float(mpmath.im(mpmath.zetazero(k)))
        assert zeros.ordinates[k - 1] == pytest.approx(want, abs=1e-9), k


def test_counting_function_tracks_table(zeros):
    for idx in (1, 10, 100, 1_000, 10_000, 100_000):
        gamma = float(zeros.ordinates[idx - 1])
        assert abs(rvm_count(gamma) - idx) < 2.2


def test_parse_rejects_bad_tables(tmp_path):
    p = tmp_path / "zeros.txt"

    p.write_text("# comment\n14.134725142\nnot-a-number\n")
    with pytest.raises(ValueError, match="line 3"):
        load_zeros(p)

    p.write_text("14.134725142\n25.01\n21.02\n")
    with pytest.raises(ValueError, match="ascending"):
        load_zeros(p)

    p.write_text("21.022039639\n25.010857580\n")
    with pytest.raises(ValueError, match="first"):
        load_zeros(p)


def test_parse_accepts_comments_and_blanks(tmp_path, zeros):
    p = tmp_path / "zeros.txt"
    head = [repr(float(g)) for g in zeros.ordinates[:5]]
    p.write_text("# header\n\n" + "\n".join(head) + "\n")
    small = load_zeros(p)
    assert small.count == 5
    assert np.array_equal(small.ordinates, zeros.ordinates[:5])


def _mp_rho(gamma):
    return mpmath.mpc(0.5, gamma)


def test_zero_sum_brute_mp(zeros):
    mpmath.mp.dps = 30
    T, N = 60.0, 37.0
    g = [float(v) for v in zeros.ordinates[zeros.ordinates <= T]]
    for order in (2, 3):
        total = mpmath.mpf(0)
        for gamma in g:
            rho = _mp_rho(gamma)
            den = rho * (rho + 1)
            if order == 3:
                den *= rho + 2
            total += 2 * mpmath.re(mpmath.power(N, rho + 1) / den)
        got = zero_sum(zeros, N, T, denom_order=order)
        assert got.terms_used == len(g)
        assert got.value == pytest.approx(float(total), rel=1e-10)


def test_gamma_weighted_brute_mp(zeros):
    mpmath.mp.dps = 30
    T, N, k = 60.0, 37.0, 2.0
    g = [float(v) for v in zeros.ordinates[zeros.ordinates <= T]]
    total = mpmath.mpf(0)
    for gamma in g:
        rho = _mp_rho(gamma)
        ratio = mpmath.gamma(rho) / mpmath.gamma(rho + k + 2)
        total += 2 * mpmath.re(mpmath.power(N, rho + 1) * ratio)
    got = gamma_weighted_sum(zeros, N, k, T)
    assert got.value == pytest.approx(float(total), rel=1e-9)


def test_gamma_weight_collapses_to_rational_denominator(zeros):
    # at k = 1 the weight is exactly 1/(rho (rho+1) (rho+2))
    a = gamma_weighted_sum(zeros, 100.0, 1.0, 1_000.0)
    b = zero_sum(zeros, 100.0, 1_000.0, denom_order=3)
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_double_zero_sum_brute_mp(zeros):
    mpmath.mp.dps = 25
    T, N, k = 50.0, 23.0, 2.0
    g = [float(v) for v in zeros.ordinates[zeros.ordinates <= T]]
    total = mpmath.mpc(0)
    for s1 in (1, -1):
        for s2 in (1, -1):
            for g1 in g:
                for g2 in g:
                    r1 = mpmath.mpc(0.5, s1 * g1)
                    r2 = mpmath.mpc(0.5, s2 * g2)
                    w = (mpmath.gamma(r1) * mpmath.gamma(r2)
                         / mpmath.gamma(r1 + r2 + k + 1))
                    total += w * mpmath.power(N, r1 + r2)
    assert abs(float(mpmath.im(total))) < 1e-20
    got = double_zero_sum(zeros, N, k, T)
    assert got.terms_used == len(g)
    assert got.value == pytest.approx(float(mpmath.re(total)), rel=1e-9)


def test_tail_estimates_monotone(zeros):
    N = 1_000.0
    heights = (100.0, 1_000.0, 10_000.0, zeros.t_max)
    tails = [tail_estimate(zeros, N, T, denom_order=2) for T in heights]
    assert all(a >= b > 0.0 for a, b in zip(tails, tails[1:]))
    d2 = double_zero_sum(zeros, N, 2.0, 200.0).tail_bound
    d4 = double_zero_sum(zeros, N, 2.0, 400.0).tail_bound
    assert d2 > d4 > 0.0


def test_height_and_order_guards(zeros):
    with pytest.raises(ValueError, match="height"):
        zero_sum(zeros, 100.0, zeros.t_max + 1.0, denom_order=2)
    with pytest.raises(ValueError):
        zero_sum(zeros, 100.0, 10.0, denom_order=2)
    with pytest.raises(ValueError):
        zero_sum(zeros, 100.0, 100.0, denom_order=4)
    with pytest.raises(ValueError):
        zero_sum(zeros, 1.0, 100.0, denom_order=2)
    with pytest.raises(ValueError, match="k="):
        gamma_weighted_sum(zeros, 100.0, 0.4, 100.0)
    with pytest.raises(ValueError, match="k="):
        double_zero_sum(zeros, 100.0, 1.0, 100.0)
    with pytest.raises(CapacityError):
        double_zero_sum(zeros, 100.0, 2.0, zeros.t_max)


def test_zero_density_beyond_table_is_smooth(zeros):
    # the tail estimator keeps decreasing smoothly past the table edge
    t1 = tail_estimate(zeros, 500.0, zeros.t_max - 1.0, denom_order=3)
    t2 = tail_estimate(zeros, 500.0, zeros.t_max, denom_order=3)
    assert t1 >= t2
    assert t2 > 0.0
