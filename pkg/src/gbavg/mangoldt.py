"""Sieve construction of the von Mangoldt function and Chebyshev sums.

Builds Lambda(n) = log p for prime powers n = p^k (else 0) up to a limit,
together with compensated prefix sums so that psi(x) = sum_{n<=x} Lambda(n)
and psi1(x) = sum_{n<=x} (x-n) Lambda(n) are O(1) lookups.

Accuracy contract for the prefix array: between prime powers the stored
values are the *same float* (repeated, so differences are exactly 0.0), and
across a prime-power jump the stored difference matches Lambda(n) to within
2 ulp of the prefix value.  A bit-exact difference at every jump is not
achievable in double precision once psi(n) has grown past Lambda's last
mantissa bits; `MangoldtTable.validate` checks the strongest form that is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3  # bytes
_BYTES_PER_N = 26  # three float64 arrays + bool sieve + slack


@dataclass(frozen=True)
class MangoldtTable:
    """Immutable Lambda table with prefix sums, indices 1..n_max.

    Attributes
    ----------
    n_max : int
        Largest argument covered.
    lam : ndarray
        lam[n] = Lambda(n); lam[0] unused (0).
    psi_prefix : ndarray
        psi_prefix[n] = sum_{m<=n} Lambda(m).
    nlam_prefix : ndarray
        nlam_prefix[n] = sum_{m<=n} m*Lambda(m), used by psi1.
    """

    n_max: int
    lam: np.ndarray = field(repr=False)
    psi_prefix: np.ndarray = field(repr=False)
    nlam_prefix: np.ndarray = field(repr=False)

    def validate(self) -> None:
        """Check structural invariants; raise ValueError on violation."""
        if self.n_max < 2 or self.lam.shape != (self.n_max + 1,):
            raise ValueError("inconsistent table shape")
        if self.psi_prefix[0] != 0.0 or self.psi_prefix[1] != 0.0:
            raise ValueError("psi_prefix must start at 0")
        diffs = np.diff(self.psi_prefix)
        if np.any(diffs < 0.0):
            raise ValueError("psi_prefix not nondecreasing")
        jump = self.lam[1:] != 0.0
        if np.any(diffs[~jump] != 0.0):
            raise ValueError("prefix moves where Lambda vanishes")
        tol = 2.0 * np.spacing(self.psi_prefix[1:][jump])
        if np.any(np.abs(diffs[jump] - self.lam[1:][jump]) > tol):
            raise ValueError("prefix jump differs from Lambda beyond 2 ulp")


def _compensated_prefix_at(idx: np.ndarray, vals: np.ndarray, size: int) -> np.ndarray:
    """Prefix-sum array of ``vals`` placed at positions ``idx`` (ascending),
    constant between positions.  Kahan accumulation at the jumps; runs are
    filled by repeating the stored float, so flat differences are exactly 0."""
    out = np.zeros(size)
    s = 0.0
    c = 0.0
    stored = np.empty(vals.size)
    for i, v in enumerate(vals.tolist()):
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
        stored[i] = s
    out[idx] = stored
    np.maximum.accumulate(out, out=out)
    return out


def build_mangoldt(n_max: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> MangoldtTable:
    """Sieve Lambda(1..n_max) and its prefix sums.

    Parameters
    ----------
    n_max : int
        Upper limit, >= 2.
    memory_budget : int
        Rough byte cap; ~26 bytes per n are needed.

    Returns
    -------
    MangoldtTable
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    need = _BYTES_PER_N * (n_max + 1)
    if need > memory_budget:
        raise CapacityError(
            f"n_max={n_max} needs ~{need} bytes of working memory, over the "
            f"budget of {memory_budget} bytes")

    composite = np.zeros(n_max + 1, dtype=bool)
    composite[:2] = True
    for p in range(2, math.isqrt(n_max) + 1):
        if not composite[p]:
            composite[p * p::p] = True
    primes = np.nonzero(~composite)[0]

    lam = np.zeros(n_max + 1)
    lam[primes] = np.log(primes.astype(np.float64))
    # powers reuse the prime's stored log so Lambda(p^k) == Lambda(p) bitwise
    for p in primes[primes <= math.isqrt(n_max)].tolist():
        logp = lam[p]
        q = p * p
        while q <= n_max:
            lam[q] = logp
            q *= p

    return _assemble_table(n_max, lam)


def _assemble_table(n_max: int, lam: np.ndarray) -> MangoldtTable:
    """Table from a finished Lambda array (sieve output or cache payload);
    prefix sums are rebuilt here so they are deterministic either way."""
    jumps = np.nonzero(lam)[0]
    vals = lam[jumps]
    psi_prefix = _compensated_prefix_at(jumps, vals, n_max + 1)
    nlam_prefix = _compensated_prefix_at(jumps, jumps.astype(np.float64) * vals,
                                         n_max + 1)
    return MangoldtTable(n_max=n_max, lam=lam, psi_prefix=psi_prefix,
                         nlam_prefix=nlam_prefix)


def psi(table: MangoldtTable, x: float) -> float:
    """Chebyshev psi(x) = sum_{n<=x} Lambda(n); right-continuous step."""
    if x < 0 or x > table.n_max:
        raise ValueError(f"x={x} outside [0, {table.n_max}]")
    return float(table.psi_prefix[int(math.floor(x))])


def psi1(table: MangoldtTable, x: float) -> float:
    """psi1(x) = sum_{n<=x} (x-n) Lambda(n) = integral of psi from 1 to x."""
    if x < 1 or x > table.n_max:
        raise ValueError(f"x={x} outside [1, {table.n_max}]")
    m = int(math.floor(x))
    return x * float(table.psi_prefix[m]) - float(table.nlam_prefix[m])


def lambda0(table: MangoldtTable, n: int) -> float:
    """Mean-corrected von Mangoldt value Lambda(n) - 1."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside [1, {table.n_max}]")
    return float(table.lam[n]) - 1.0
