"""Step-function variance integrals and trigonometric-kernel identities.

The psi-drift integrals (i/j/k below) have step-function integrands, so
they are integrated exactly from breakpoint structure; quadrature appears
only for genuine alpha-continuum integrals (gallagher_inequality_check,
lemma7_check) and always carries a Richardson error estimate that the
caller can collect.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWindowError
from .goldbach import big_r
from .mangoldt import MangoldtTable

TWO_PI = 2.0 * math.pi

# prime-power index per table, keyed by id; the strong table reference
# keeps the id from being recycled
_PP_CACHE: dict[int, tuple[MangoldtTable, np.ndarray]] = {}
_DRIFT_CACHE: dict[int, tuple[MangoldtTable, tuple[np.ndarray, ...]]] = {}


def _prime_powers(table: MangoldtTable) -> np.ndarray:
    key = id(table)
    hit = _PP_CACHE.get(key)
    if hit is not None and hit[0] is table:
        return hit[1]
    pp = np.flatnonzero(table.lam > 0.0)
    _PP_CACHE[key] = (table, pp)
    return pp


def _drift_prefixes(table: MangoldtTable) -> tuple[np.ndarray, ...]:
    """Breakpoint grid of psi with prefix antiderivatives of the drift.

    Returns (b, P, S1, S2): psi equals P[j] on [b[j], b[j+1]), and
    S1[j] / S2[j] hold the exact integrals of (psi(t)-t) and (psi(t)-t)^2
    over (0, b[j]), so any window integral of the drift or its square is
    a prefix difference plus one closed-form partial segment.
    """
    key = id(table)
    hit = _DRIFT_CACHE.get(key)
    if hit is not None and hit[0] is table:
        return hit[1]
    pp = _prime_powers(table)
    b = np.concatenate(([0.0], pp.astype(np.float64)))
    P = np.concatenate(([0.0], table.psi_prefix[pp]))
    t1, t2 = b[:-1], b[1:]
    seg1 = P[:-1] * (t2 - t1) - 0.5 * (t2 - t1) * (t2 + t1)
    ua = P[:-1] - t1
    ub = P[:-1] - t2
    seg2 = (ua ** 3 - ub ** 3) / 3.0
    S1 = np.concatenate(([0.0], np.cumsum(seg1)))
    S2 = np.concatenate(([0.0], np.cumsum(seg2)))
    out = (b, P, S1, S2)
    _DRIFT_CACHE[key] = (table, out)
    return out


def _drift_point(pre: tuple[np.ndarray, ...], x: float) -> tuple[float, float, float]:
    """(psi(x)-x, integral of drift over (0,x), integral of drift^2 over (0,x))."""
    b, P, S1, S2 = pre
    j = min(int(np.searchsorted(b, x, side="right")) - 1, P.size - 1)
    p, bj = float(P[j]), float(b[j])
    a1 = float(S1[j]) + p * (x - bj) - 0.5 * (x - bj) * (x + bj)
    a2 = float(S2[j]) + ((p - bj) ** 3 - (p - x) ** 3) / 3.0
    return p - x, a1, a2


def _k_window(pre: tuple[np.ndarray, ...], x: float, h: float) -> float:
    """k_integral via prefix antiderivatives: same exact piecewise pieces,
    assembled as (0,x) minus (0,x-h) differences in O(log) time."""
    dx, a1x, a2x = _drift_point(pre, x)
    _, a1l, a2l = _drift_point(pre, x - h)
    return h * dx * dx - 2.0 * dx * (a1x - a1l) + (a2x - a2l)


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


@dataclass(frozen=True, eq=False)
class PiecewiseConstant:
    """Right-continuous step function on [breakpoints[0], breakpoints[-1]].

    values[i] holds on [breakpoints[i], breakpoints[i+1]).
    """

    breakpoints: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.diff(bp) > 0.0):
            raise ValueError("breakpoints must be strictly ascending")
        if v.shape != (bp.size - 1,):
            raise ValueError(
                f"expected {bp.size - 1} interval values, got {v.size}")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", v)

    def __call__(self, t: float) -> float:
        bp = self.breakpoints
        if not bp[0] <= t <= bp[-1]:
            raise ValueError(f"t={t} outside [{bp[0]}, {bp[-1]}]")
        i = int(np.searchsorted(bp, t, side="right")) - 1
        return float(self.values[min(i, self.values.size - 1)])

    def integral_sq_affine(self, c0: float, c1: float) -> float:
        """Exact integral of (value - (c0 + c1*t))**2 over the support.

        Per piece the integrand is a parabola (or a constant when c1 = 0),
        so each contribution is a cubic antiderivative difference; pieces
        are combined with exact-rounded summation.
        """
        a = self.breakpoints[:-1]
        b = self.breakpoints[1:]
        v = self.values
        if c1 == 0.0:
            pieces = (v - c0) ** 2 * (b - a)
        else:
            ua = v - c0 - c1 * a
            ub = v - c0 - c1 * b
            pieces = (ua ** 3 - ub ** 3) / (3.0 * c1)
        return math.fsum(pieces.tolist())


@dataclass(frozen=True, eq=False)
class SequenceWindow:
    """Finitely supported real coefficient sequence over integer indices."""

    coeffs: dict[int, float]

    def __post_init__(self):
        clean = {int(n): float(c) for n, c in self.coeffs.items()}
        object.__setattr__(self, "coeffs", clean)

    def as_array(self) -> tuple[int, np.ndarray]:
        """Dense view: (offset, vector) with vector[i] = c_(offset+i)."""
        if not self.coeffs:
            return 0, np.zeros(1)
        lo = min(self.coeffs)
        hi = max(self.coeffs)
        v = np.zeros(hi - lo + 1)
        for n, c in self.coeffs.items():
            v[n - lo] = c
        return lo, v


def _psi_steps(table: MangoldtTable, lo: float, hi: float) -> PiecewiseConstant:
    """psi restricted to [lo, hi] as a step function."""
    pp = _prime_powers(table)
    inner = pp[np.searchsorted(pp, lo, side="right"):
               np.searchsorted(pp, hi, side="left")]
    bp = np.concatenate(([lo], inner.astype(np.float64), [hi]))
    vals = table.psi_prefix[np.floor(bp[:-1]).astype(np.int64)]
    return PiecewiseConstant(bp, vals)


def i_integral(table: MangoldtTable, x: float) -> float:
    """Exact integral over (0, x) of the squared drift (psi(t) - t)^2."""
    x = float(x)
    if not 0.0 < x <= table.n_max:
        raise ValueError(f"x={x} outside (0, {table.n_max}]")
    return _psi_steps(table, 0.0, x).integral_sq_affine(0.0, 1.0)


def j_integral(table: MangoldtTable, x: float, h: float) -> float:
    """Exact integral over (0, x) of the squared increment defect
    (psi(t+h) - psi(t) - h)^2.

    Both psi terms are constant between breakpoints drawn from the prime
    powers and their h-shifts, so every piece contributes a constant times
    its length.
    """
    x, h = float(x), float(h)
    if not 1.0 <= h <= x:
        raise ValueError(f"need 1 <= h <= x, got h={h}, x={x}")
    if x + h > table.n_max:
        raise ValueError(f"x+h={x + h} exceeds table n_max={table.n_max}")
    pp = _prime_powers(table).astype(np.float64)
    cuts = np.concatenate((pp, pp - h))
    cuts = np.unique(cuts[(cuts > 0.0) & (cuts < x)])
    bp = np.concatenate(([0.0], cuts, [x]))
    mid = 0.5 * (bp[:-1] + bp[1:])
    pref = table.psi_prefix
    vals = (pref[np.floor(mid + h).astype(np.int64)]
            - pref[np.floor(mid).astype(np.int64)])
    return PiecewiseConstant(bp, vals).integral_sq_affine(h, 0.0)


def k_integral(table: MangoldtTable, x: float, h: float) -> float:
    """Exact integral over (x-h, x) of (psi(x) - psi(t) - (x-t))^2."""
    x, h = float(x), float(h)
    if not 0.0 < h <= x:
        raise ValueError(f"need 0 < h <= x, got h={h}, x={x}")
    if x > table.n_max:
        raise ValueError(f"x={x} exceeds table n_max={table.n_max}")
    steps = _psi_steps(table, x - h, x)
    psix = float(table.psi_prefix[int(math.floor(x))])
    # (psix - v - (x-t))^2 == (v - (psix - x) - t)^2
    return steps.integral_sq_affine(psix - x, 1.0)


def en_average_k(table: MangoldtTable, N: int, h: float, *,
                 rel_tol: float = 5e-4, max_evals: int = 500_000,
                 detail: dict | None = None) -> float:
    """Mean over x in [N, 2N] of k_integral(x, h), by adaptive quadrature.

    Inner integrals are exact; the outer x-integral uses globally adaptive
    Simpson refinement (worst interval first) until the summed Richardson
    estimate drops below rel_tol of the running total or the evaluation
    budget runs out.  If ``detail`` is a dict, the achieved absolute error
    estimate, evaluation count, and convergence flag are recorded there.
    """
    if not 0.0 < h <= N:
        raise ValueError(f"need 0 < h <= N, got h={h}, N={N}")
    if 2 * N > table.n_max:
        raise ValueError(f"need 2N <= n_max, got N={N}, n_max={table.n_max}")
    pre = _drift_prefixes(table)

    def f(x: float) -> float:
        return _k_window(pre, x, h)

    evals = 0

    def node(a: float, b: float, fa: float, fm: float, fb: float):
        # one refinement level gives both the Richardson value and an
        # error estimate for the interval; the estimate keeps the raw
        # defect |S2 - S1| (no /15): the integrand has slope breaks at
        # every prime power, where the smooth-case factor is unearned
        nonlocal evals
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        evals += 2
        s1 = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = abs(sl + sr - s1)
        value = sl + sr + (sl + sr - s1) / 15.0
        return (-err, a, b, fa, fm, fb, flm, frm, value)

    a, b = float(N), float(2 * N)
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    evals += 3
    heap = [node(a, b, fa, fm, fb)]
    total = heap[0][-1]
    err_sum = -heap[0][0]  # maintained incrementally; O(1) per refinement
    converged = False
    while evals < max_evals:
        if err_sum <= rel_tol * abs(total):
            converged = True
            break
        neg, a0, b0, f0, f1, f2, fl, fr, val = heapq.heappop(heap)
        m0 = 0.5 * (a0 + b0)
        left = node(a0, m0, f0, fl, f1)
        right = node(m0, b0, f1, fr, f2)
        total += left[-1] + right[-1] - val
        err_sum += neg - left[0] - right[0]
        heapq.heappush(heap, left)
        heapq.heappush(heap, right)
    if detail is not None:
        # recomputed exactly (no incremental drift) and scaled like the
        # returned mean, so it bounds |result - truth|
        detail["error_estimate"] = -sum(e[0] for e in heap) / float(N)
        detail["evals"] = evals
        detail["converged"] = converged
        detail["intervals"] = len(heap)
    return total / float(N)


def s0_eval(table: MangoldtTable, alpha: float, x: float) -> complex:
    """Mean-corrected exponential sum over n <= x of (Lambda(n)-1) e(n alpha)."""
    m = int(math.floor(x))
    if not 1 <= m <= table.n_max:
        raise ValueError(f"x={x} outside [1, {table.n_max}]")
    n = np.arange(1, m + 1)
    lam0 = table.lam[1:m + 1] - 1.0
    return complex(np.sum(lam0 * np.exp(2j * math.pi * alpha * n)))


def en_average_s0sq(table: MangoldtTable, N: int, alpha: float) -> float:
    """Mean over x in [N, 2N] of |s0_eval(alpha, x)|^2, exactly.

    The sum is constant between consecutive integers, so the x-average
    collapses to a finite mean over the unit intervals [m, m+1).
    """
    if N < 1:
        raise ValueError(f"N={N} must be >= 1")
    if 2 * N > table.n_max:
        raise ValueError(f"need 2N <= n_max, got N={N}, n_max={table.n_max}")
    n = np.arange(1, 2 * N)
    z = (table.lam[1:2 * N] - 1.0) * np.exp(2j * math.pi * alpha * n)
    csum = np.cumsum(z)
    block = csum[N - 1:2 * N - 1]
    return float(np.mean(block.real ** 2 + block.imag ** 2))


def _en_spectrum(table: MangoldtTable, N: int) -> np.ndarray:
    """Cosine coefficients B of en_average_s0sq as a function of alpha:
    E(alpha) = B[0] + 2 * sum_d B[d] cos(2 pi d alpha).

    B[d] is a lag-d correlation of the mean-corrected coefficients where
    the later index carries the number of unit intervals that see it.
    """
    m = 2 * N - 1
    c = table.lam[1:m + 1] - 1.0
    w = np.minimum(float(N), 2.0 * N - np.arange(1, m + 1, dtype=np.float64))
    size = 1 << (2 * m).bit_length()
    X = np.fft.rfft(c, size)
    Y = np.fft.rfft(c * w, size)
    corr = np.fft.irfft(np.conj(X) * Y, size)
    return corr[:m] / float(N)


def _en_eval(B: np.ndarray, alpha: float) -> float:
    d = np.arange(1, B.size)
    return float(B[0] + 2.0 * np.dot(B[1:], np.cos(TWO_PI * d * alpha)))


def _simpson(y: np.ndarray, step: float) -> float:
    if y.size % 2 == 0:
        raise ValueError("composite rule needs an odd sample count")
    w = np.ones(y.size)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.dot(w, y) * step / 3.0)


def lemma7_check(table: MangoldtTable, N: int, h: int, *,
                 detail: dict | None = None) -> float:
    """Low-frequency mass of the windowed mean square: integrates
    en_average_s0sq over |alpha| <= 1/(2h) and divides by N log^2(N) / h.

    The integrand is a cosine polynomial, evaluated on a dyadic uniform
    grid via its coefficient spectrum (pointwise identical to
    en_average_s0sq); the integral uses composite Simpson with one
    Richardson halving, and the error estimate lands in ``detail``.
    """
    if h < 1:
        raise ValueError(f"h={h} must be >= 1")
    if h > N:
        raise ValueError(f"need h <= N, got h={h}, N={N}")
    if 2 * N > table.n_max:
        raise ValueError(f"need 2N <= n_max, got N={N}, n_max={table.n_max}")
    B = _en_spectrum(table, N)
    upper = 0.5 / h

    def grid_integral(L: int) -> float:
        # samples at j/L for j = 0..J, then a short exact-endpoint patch
        # [J/L, upper] when 2h does not divide L; irfft supplies the
        # conjugate-mirror factor 2 on positive lags itself
        grid = np.fft.irfft(B, L) * float(L)
        J = int(math.floor(upper * L))
        if J % 2 == 1:
            J -= 1
        main = _simpson(grid[:J + 1], 1.0 / L)
        a = J / L
        if a >= upper:
            return main
        pts = np.array([a, 0.5 * (a + upper), upper])
        y = np.array([grid[J], _en_eval(B, pts[1]), _en_eval(B, pts[2])])
        return main + (upper - a) / 6.0 * (y[0] + 4.0 * y[1] + y[2])

    L1 = _next_pow2(8 * N)
    s1 = grid_integral(L1)
    s2 = grid_integral(2 * L1)
    half = s2 + (s2 - s1) / 15.0
    if detail is not None:
        detail["error_estimate"] = 2.0 * abs(s2 - s1) / 15.0
        detail["grid"] = 2 * L1
    integral = 2.0 * half  # even integrand
    scale = float(N) * math.log(float(N)) ** 2 / float(h)
    return integral / scale


def gallagher_lhs(seq: SequenceWindow, H: int) -> float:
    """Triangular-weighted autocorrelation sum: A(0) + 2 sum_(0<j<H)
    (1 - j/H) A(j), with A(j) the lag-j correlation of the coefficients.

    Equals the unit-interval integral of |S(alpha)|^2 against the
    nonnegative kernel fejer_eval(alpha, H).
    """
    if H < 1:
        raise ValueError(f"H={H} must be >= 1")
    _, v = seq.as_array()
    acf = np.correlate(v, v, mode="full")[v.size - 1:]
    out = acf[0]
    top = min(H, acf.size)
    for j in range(1, top):
        out += 2.0 * (1.0 - j / H) * acf[j]
    return float(out)


def gallagher_rhs(seq: SequenceWindow, H: int) -> float:
    """(1/H) times the exact integral over all x of the squared window sum
    of coefficients with indices in the open interval (x, x+H).

    The window sum is a step function of x with breakpoints at n and n-H,
    so the integral is a finite weighted sum of squares.
    """
    if H < 1:
        raise ValueError(f"H={H} must be >= 1")
    if not seq.coeffs:
        return 0.0
    events: dict[float, float] = {}
    for n, c in seq.coeffs.items():
        events[n - H] = events.get(n - H, 0.0) + c
        events[n] = events.get(n, 0.0) - c
    bp = np.array(sorted(events))
    jumps = np.array([events[t] for t in bp])
    level = np.cumsum(jumps)[:-1]
    length = np.diff(bp)
    return float(math.fsum((level ** 2 * length).tolist())) / H


def gallagher_inequality_check(seq: SequenceWindow, h: int, *,
                               panels: int = 4096,
                               detail: dict | None = None) -> float:
    """Ratio of the low-frequency spectral mass of S to its window bound:

        integral over |alpha| <= 1/(2h) of |S(alpha)|^2
        -----------------------------------------------
        (1/h^2) * integral over x of (window sum)^2

    Numerator by composite Simpson (``panels`` panels) with one Richardson
    halving (estimate in ``detail``); denominator exact.  All-zero window
    sums raise DegenerateWindowError.
    """
    if h < 1:
        raise ValueError(f"h={h} must be >= 1")
    denom = gallagher_rhs(seq, h) / h
    if denom == 0.0:
        raise DegenerateWindowError(
            "window sums vanish identically; the ratio is undefined")
    offset, v = seq.as_array()
    n = offset + np.arange(v.size)

    def num_integral(m: int) -> float:
        alphas = np.linspace(-0.5 / h, 0.5 / h, m + 1)
        phases = np.exp(2j * math.pi * np.outer(alphas, n))
        s = phases @ v
        return _simpson(s.real ** 2 + s.imag ** 2, 1.0 / (h * m))

    s1 = num_integral(panels)
    s2 = num_integral(2 * panels)
    num = s2 + (s2 - s1) / 15.0
    if detail is not None:
        detail["error_estimate"] = abs(s2 - s1) / 15.0
        detail["panels"] = 2 * panels
    return num / denom


def fejer_eval(alpha: float, N: int) -> float:
    """Nonnegative kernel (1/N) (sin(pi N alpha) / sin(pi alpha))^2, with
    the continuous-limit value N at integer alpha.

    Identical to the triangular-weighted cosine sum
    sum_(|n|<N) (1 - |n|/N) e(n alpha).
    """
    if N < 1:
        raise ValueError(f"N={N} must be >= 1")
    d = alpha - round(alpha)
    if d == 0.0:
        return float(N)
    r = math.sin(math.pi * N * d) / math.sin(math.pi * d)
    return r * r / N


def _fejer_sum_form(alpha: float, N: int) -> float:
    n = np.arange(1, N)
    return float(1.0 + 2.0 * np.dot(1.0 - n / N, np.cos(TWO_PI * n * alpha)))


def nearest_int_distance(alpha: float) -> float:
    """Distance from alpha to the nearest integer (1/2 at half-integers)."""
    return abs(alpha - round(alpha + 0.0))


def dirichlet_eval(alpha: float, N: int) -> complex:
    """Geometric exponential sum over n = 1..N of e(n alpha)."""
    if N < 1:
        raise ValueError(f"N={N} must be >= 1")
    f = alpha - math.floor(alpha)
    d = f if f <= 0.5 else f - 1.0
    if d == 0.0:
        return complex(N)
    ratio = math.sin(math.pi * N * d) / math.sin(math.pi * d)
    phase = complex(math.cos(math.pi * (N + 1) * d),
                    math.sin(math.pi * (N + 1) * d))
    return phase * ratio


def dirichlet_bound(alpha: float, N: int) -> float:
    """min(N, 1/(2 ||alpha||)): the standard magnitude bound for
    dirichlet_eval."""
    dist = nearest_int_distance(alpha)
    if dist == 0.0:
        return float(N)
    return min(float(N), 0.5 / dist)


def weighted_bigr_sum(table: MangoldtTable, t: SequenceWindow, N: int,
                      x: int) -> float:
    """sum over n <= N of big_r(n, x) t(n): the coefficient-matched value
    of the unit-interval integral of s0_eval(alpha, x)^2 against the
    conjugate weight polynomial of t; independent of x once x >= N."""
    terms = [c * big_r(table, n, x)
             for n, c in sorted(t.coeffs.items()) if 2 <= n <= N]
    return math.fsum(terms)


def s0sq_weighted_integral(table: MangoldtTable, t: SequenceWindow, N: int,
                           x: int) -> float:
    """Unit-interval integral of s0_eval(alpha, x)^2 * sum_n t(n) e(-n alpha),
    via a uniform alpha-grid sized past the top frequency, where the
    Riemann sum of a trigonometric polynomial is exact."""
    if not 1 <= N <= x <= table.n_max:
        raise ValueError(f"need 1 <= N <= x <= n_max, got N={N}, x={x}")
    M = _next_pow2(2 * x + N + 1)
    c = np.zeros(M)
    c[1:x + 1] = table.lam[1:x + 1] - 1.0
    s0 = np.conj(np.fft.fft(c))
    tv = np.zeros(M)
    for n, cn in t.coeffs.items():
        if 1 <= n <= N:
            tv[n] = cn
    tpoly = np.fft.fft(tv)
    vals = s0 * s0 * tpoly
    return float(np.mean(vals).real)
