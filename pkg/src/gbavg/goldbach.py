"""Goldbach representation sums r2, g2 and their weighted aggregates.

r2(n) = sum_{m+m'=n} Lambda(m) Lambda(m') counts prime-power decompositions
with log weights; g2(n) counts ordered prime pairs p + p' = n.  Both are
built either by a direct quadratic loop (oracle scale) or by an FFT
self-convolution.  The mean-corrected convolution big_r and the correction
e2_term tie the two to the identity big_r(n, x) = r2(n) - e2_term(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .mangoldt import MangoldtTable, psi

DIRECT_CAP = 10_000
DEFAULT_FFT_BUDGET = 2 * 1024 ** 3


@dataclass(frozen=True)
class R2Series:
    """r2 values for 1..n_limit; r2[0] unused."""

    n_limit: int
    r2: np.ndarray = field(repr=False)
    method_tag: str = "direct"  # "direct" | "fft"


@dataclass(frozen=True)
class WeightedSum:
    N: int
    k: float
    value: float


def _padded_size(n_limit: int) -> int:
    # power-of-two padding: linear convolution of length-n inputs needs
    # >= 2*n_limit + 1 points to avoid circular wrap-around
    return 1 << int(2 * n_limit + 1).bit_length()


def r2_direct(table: MangoldtTable, n_limit: int) -> R2Series:
    """Quadratic-time oracle for r2, capped at n_limit <= 10^4.

    Each r2[n] is accumulated left-to-right over ascending m; terms with
    Lambda(m) = 0 add exactly 0.0 and are skipped without changing the
    floating-point result.
    """
    if n_limit > DIRECT_CAP:
        raise ValueError(
            f"n_limit={n_limit} exceeds the direct-oracle cap {DIRECT_CAP}; "
            "use r2_fft for large ranges")
    if n_limit > table.n_max:
        raise ValueError("n_limit exceeds table.n_max")
    lam = table.lam
    pps = np.nonzero(lam[:n_limit + 1])[0].tolist()
    lam_list = lam.tolist()
    r2 = np.zeros(n_limit + 1)
    for n in range(4, n_limit + 1):
        acc = 0.0
        for m in pps:
            if m >= n:
                break
            acc += lam_list[m] * lam_list[n - m]
        r2[n] = acc
    return R2Series(n_limit=n_limit, r2=r2, method_tag="direct")


def r2_fft(table: MangoldtTable, n_limit: int,
           memory_budget: int = DEFAULT_FFT_BUDGET) -> R2Series:
    """r2 via real-input FFT self-convolution of Lambda(1..n_limit).

    Rounding-error budget is O(log L * eps * ||Lambda||_1^2 / L)-scale per
    entry; the acceptance gate pins it at 1e-6 absolute against the direct
    oracle.  Entries below n = 4 are structurally zero (Lambda(1) = 0) and
    are set to exact 0.0; other entries are clamped at 0 from below.
    """
    if n_limit > table.n_max:
        raise ValueError("n_limit exceeds table.n_max")
    size = _padded_size(n_limit)
    need = 26 * size
    if need > memory_budget:
        raise CapacityError(
            f"FFT size {size} needs ~{need} bytes, over the budget of "
            f"{memory_budget} bytes")
    a = np.zeros(size)
    a[1:n_limit + 1] = table.lam[1:n_limit + 1]
    spec = np.fft.rfft(a)
    np.multiply(spec, spec, out=spec)
    conv = np.fft.irfft(spec, size)
    r2 = np.maximum(conv[:n_limit + 1], 0.0)
    r2[:min(4, n_limit + 1)] = 0.0
    return R2Series(n_limit=n_limit, r2=r2, method_tag="fft")


def g2_count(n_limit: int) -> np.ndarray:
    """Ordered prime-pair counts g2[n] = #{(p, p'): p + p' = n}, n <= n_limit."""
    if n_limit < 4:
        raise ValueError("n_limit must be >= 4")
    composite = np.zeros(n_limit + 1, dtype=bool)
    composite[:2] = True
    for p in range(2, math.isqrt(n_limit) + 1):
        if not composite[p]:
            composite[p * p::p] = True
    ind = (~composite).astype(np.float64)
    size = _padded_size(n_limit)
    spec = np.fft.rfft(ind, size)
    np.multiply(spec, spec, out=spec)
    conv = np.fft.irfft(spec, size)[:n_limit + 1]
    rounded = np.rint(conv)
    if np.max(np.abs(conv - rounded)) > 0.01:
        raise ArithmeticError("FFT pair counts too noisy to round safely")
    return np.maximum(rounded, 0.0).astype(np.int64)


def landau_ratio(x: int) -> float:
    """(sum_{n<=x} g2[n]) / (x^2 / (2 log^2 x)); drifts toward 1 for large x."""
    if x < 100:
        raise ValueError("x must be >= 100")
    g2 = g2_count(int(x))
    total = float(g2.sum())
    return total / (x * x / (2.0 * math.log(x) ** 2))


def e2_term(table: MangoldtTable, n: int) -> float:
    """Correction term 2*psi(n-1) - (n-1)."""
    if not 2 <= n <= table.n_max:
        raise ValueError(f"n={n} outside [2, {table.n_max}]")
    return 2.0 * psi(table, n - 1) - (n - 1)


def big_r(table: MangoldtTable, n: int, x: int) -> float:
    """Mean-corrected self-convolution sum_{n1+n2=n, n1,n2<=x} L0(n1) L0(n2).

    For n <= x (enforced) this equals r2[n] - e2_term(n).
    """
    if not n <= x <= table.n_max:
        raise ValueError(f"need n <= x <= n_max, got n={n}, x={x}")
    lam = table.lam.tolist()
    lo = max(1, n - x)
    hi = min(n - 1, x)
    acc = 0.0
    for m in range(lo, hi + 1):
        acc += (lam[m] - 1.0) * (lam[n - m] - 1.0)
    return acc


def cumulative_r2(series: R2Series, N: int) -> WeightedSum:
    """Plain cumulative sum_{n<=N} r2[n] (exact compensated summation)."""
    if N > series.n_limit:
        raise ValueError(f"N={N} exceeds series n_limit={series.n_limit}")
    return WeightedSum(N=N, k=0.0, value=math.fsum(series.r2[1:N + 1]))


def cesaro_r2(series: R2Series, N: int, k: float) -> WeightedSum:
    """Cesaro-weighted sum_{n<=N} r2[n] (1 - n/N)^k / Gamma(k+1)."""
    if k < 0:
        raise ValueError("Cesaro order k must be >= 0")
    if N > series.n_limit:
        raise ValueError(f"N={N} exceeds series n_limit={series.n_limit}")
    n = np.arange(1, N + 1, dtype=np.float64)
    w = np.power(1.0 - n / N, k)
    total = math.fsum(series.r2[1:N + 1] * w)
    return WeightedSum(N=N, k=k, value=total / math.gamma(k + 1.0))
