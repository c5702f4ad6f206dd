"""Explicit-formula assembly: main terms, zero terms, residuals, and scans.

Sign convention for every report: residual = data_sum - main_term +
zero_term - lower_order, so the explicit-formula prediction for the data is
main_term - zero_term + lower_order and the residual is what the truncated
formula fails to explain.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .goldbach import R2Series, cesaro_r2, cumulative_r2
from .mangoldt import MangoldtTable, psi1
from .zeros import ZeroTable, double_zero_sum, gamma_weighted_sum, zero_sum

LOG_2PI = 1.8378770664093456
ZETA_LOG_DERIV_AT_MINUS1 = 1.9850537244054112  # zeta'/zeta(-1) = 12 log A - 1


@dataclass(frozen=True)
class Constants:
    log_2pi: float = LOG_2PI
    zeta_log_deriv_at_minus1: float = ZETA_LOG_DERIV_AT_MINUS1


@dataclass(frozen=True)
class ResidualReport:
    N: int
    data_sum: float
    main_term: float
    zero_term: float
    lower_order: float
    residual: float
    T: float
    tail_bound: float
    coefficient_c: float


@dataclass(frozen=True)
class ScanResult:
    reports: list[ResidualReport]
    exponent: float
    exponent_rms: float
    excluded: int


def trivial_zero_series(x: float) -> float:
    """sum_{k>=1} x^(1-2k) / (2k(2k-1)), truncated once a term drops
    below 1e-16 (geometric-like decay in x^-2)."""
    total = 0.0
    k = 1
    while True:
        term = x ** (1 - 2 * k) / (2 * k * (2 * k - 1))
        total += term
        if term < 1e-16:
            return total
        k += 1


def psi1_explicit(zeros: ZeroTable, x: float, T: float) -> float:
    """Truncated explicit formula for psi1(x):
    x^2/2 - sum_rho x^(rho+1)/(rho(rho+1)) - (log 2pi) x + zeta'/zeta(-1)
    - trivial-zero series."""
    if x < 2:
        raise ValueError("x must be >= 2")
    zs = zero_sum(zeros, x, T, denom_order=2)
    return (0.5 * x * x - zs.value - LOG_2PI * x
            + ZETA_LOG_DERIV_AT_MINUS1 - trivial_zero_series(x))


def fujii_rhs(zeros: ZeroTable, N: int, T: float) -> float:
    """Full main-plus-lower-order expansion for the cumulative r2 sum:
    N^2/2 - 2 sum_rho N^(rho+1)/(rho(rho+1)) - (2 log 2pi - 1/2) N
    + 2 zeta'/zeta(-1) - 2 * trivial-zero series."""
    if N < 2:
        raise ValueError("N must be >= 2")
    zs = zero_sum(zeros, float(N), T, denom_order=2)
    return (0.5 * N * N - 2.0 * zs.value - (2.0 * LOG_2PI - 0.5) * N
            + 2.0 * ZETA_LOG_DERIV_AT_MINUS1 - 2.0 * trivial_zero_series(N))


def psi1_report(table: MangoldtTable, zeros: ZeroTable, x: float, T: float) -> ResidualReport:
    """Residual row for the psi1 explicit formula at height T."""
    zs = zero_sum(zeros, x, T, denom_order=2)
    data = psi1(table, x)
    main = 0.5 * x * x
    lower = -LOG_2PI * x + ZETA_LOG_DERIV_AT_MINUS1 - trivial_zero_series(x)
    residual = data - main + zs.value - lower
    return ResidualReport(N=int(x), data_sum=data, main_term=main,
                          zero_term=zs.value, lower_order=lower,
                          residual=residual, T=T, tail_bound=zs.tail_bound,
                          coefficient_c=1.0)


def theorem1_residual(series: R2Series, zeros: ZeroTable, N: int, T: float,
                      c: float = 2.0) -> ResidualReport:
    """Residual of the cumulative r2 sum against N^2/2 - c * zero sum.

    The zero-sum multiplier c defaults to 2 (the value forced by the
    mean-corrected convolution expansion); c = 1 is exposed so the scan can
    show it leaves an N^(3/2)-sized remainder.
    """
    data = cumulative_r2(series, N).value
    zs = zero_sum(zeros, float(N), T, denom_order=2)
    main = 0.5 * float(N) * float(N)
    zero_term = c * zs.value
    residual = data - main + zero_term
    return ResidualReport(N=N, data_sum=data, main_term=main,
                          zero_term=zero_term, lower_order=0.0,
                          residual=residual, T=T,
                          tail_bound=abs(c) * zs.tail_bound, coefficient_c=c)


def theorem2_residual(series: R2Series, zeros: ZeroTable, N: int, T: float) -> ResidualReport:
    """Residual of the order-1 Cesaro sum against N^2/6 - 2 * (order-3 zero sum)."""
    data = cesaro_r2(series, N, 1.0).value
    zs = zero_sum(zeros, float(N), T, denom_order=3)
    main = float(N) * float(N) / 6.0
    zero_term = 2.0 * zs.value
    residual = data - main + zero_term
    return ResidualReport(N=N, data_sum=data, main_term=main,
                          zero_term=zero_term, lower_order=0.0,
                          residual=residual, T=T, tail_bound=2.0 * zs.tail_bound,
                          coefficient_c=2.0)


def lz_cesaro_residual(series: R2Series, zeros: ZeroTable, N: int, k: float,
                       T: float, t_double: float | None = None) -> ResidualReport:
    """Residual of the order-k Cesaro sum against
    N^2/Gamma(k+3) - 2 * Gamma-weighted single sum + double zero sum.

    The double sum is quadratic in the zero count, so it gets its own
    truncation height ``t_double`` (default min(T, 500)).  Requires k > 1
    for absolute convergence of the double sum.

    The smooth lower-order term -2 log(2pi) N / Gamma(k+2) is included: it
    is the cross term between the 1/z pole and the -log(2pi) constant in
    the weighted expansion, and without it the residual carries an exact
    linear deficit of that coefficient (0.6126 N at k = 2) instead of
    being O(sqrt(N))-sized.
    """
    if k <= 1.0:
        raise ValueError(f"k={k} rejected: the weighted formula requires k > 1")
    if t_double is None:
        t_double = min(T, 500.0)
    data = cesaro_r2(series, N, k).value
    main = float(N) * float(N) / math.gamma(k + 3.0)
    gws = gamma_weighted_sum(zeros, float(N), k, T)
    dzs = double_zero_sum(zeros, float(N), k, t_double)
    zero_term = 2.0 * gws.value - dzs.value
    lower = -2.0 * LOG_2PI * float(N) / math.gamma(k + 2.0)
    residual = data - main + zero_term - lower
    return ResidualReport(N=N, data_sum=data, main_term=main,
                          zero_term=zero_term, lower_order=lower,
                          residual=residual, T=T,
                          tail_bound=2.0 * gws.tail_bound + dzs.tail_bound,
                          coefficient_c=2.0)


def fit_exponent(n_values: Sequence[float], magnitudes: Sequence[float]) -> float:
    """Least-squares slope of log|value| against log N."""
    ln = np.log(np.asarray(n_values, dtype=np.float64))
    lv = np.log(np.asarray(magnitudes, dtype=np.float64))
    return float(np.polyfit(ln, lv, 1)[0])


def error_scan(series: R2Series, zeros: ZeroTable, N_list: Sequence[int],
               T: float, mode: str, k: float | None = None, c: float = 2.0,
               workers: int = 1) -> ScanResult:
    """Residual reports over ascending N_list plus fitted error exponents.

    The primary fit uses log|residual| vs log N, excluding near-zero
    residuals (|residual| < 1, where a sign change would poison the log);
    the exclusion count is reported.  A 3-point RMS-windowed fit over all N
    is emitted alongside as a robustness check.  Fewer than 4 usable points
    is a fit error.
    """
    if list(N_list) != sorted(N_list):
        raise ValueError("N_list must be ascending")

    def one(N: int) -> ResidualReport:
        if mode == "thm1":
            return theorem1_residual(series, zeros, N, T, c=c)
        if mode == "thm2":
            return theorem2_residual(series, zeros, N, T)
        if mode == "lz":
            if k is None:
                raise ValueError("mode 'lz' needs the Cesaro order k")
            return lz_cesaro_residual(series, zeros, N, k, T)
        raise ValueError(f"unknown scan mode {mode!r}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, N_list))
    else:
        reports = [one(N) for N in N_list]

    res = np.array([abs(r.residual) for r in reports])
    ns = np.array([float(r.N) for r in reports])
    usable = res >= 1.0
    excluded = int(np.sum(~usable))
    if int(np.sum(usable)) < 4:
        raise ValueError(
            f"only {int(np.sum(usable))} scan points with |residual| >= 1; "
            "need at least 4 for the exponent fit")
    exponent = fit_exponent(ns[usable], res[usable])

    # centered 3-point RMS smoothing, edges clamped
    rms = np.empty_like(res)
    for i in range(res.size):
        lo, hi = max(0, i - 1), min(res.size, i + 2)
        rms[i] = math.sqrt(float(np.mean(res[lo:hi] ** 2)))
    pos = rms > 0.0
    exponent_rms = fit_exponent(ns[pos], rms[pos]) if int(np.sum(pos)) >= 2 else math.nan
    return ScanResult(reports=reports, exponent=exponent,
                      exponent_rms=exponent_rms, excluded=excluded)
