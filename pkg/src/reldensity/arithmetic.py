"""Number-theoretic kernels: distinct-prime-factor sieve, binary digits, and
the Erdős–Kac and sum-of-digits experiments built on them."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from ._chunks import ordered_map, split_range
from .distributions import DiscreteLaw
from .stats import PHI, EmpiricalCDF

SEGMENT = 1 << 22
MAX_SIEVE = 10**9
DEFAULT_BUDGET = 2 << 30
# bytes held per integer while a segment is sieved: index + cofactor + count
_BYTES_PER_N = 17
OMEGA_BINS = 16  # omega(n) <= 9 for n <= 10^9


class MemoryBudgetError(MemoryError):
    def __init__(self, required: int, budget: int, what: str = "computation"):
        self.required, self.budget = required, budget
        super().__init__(f"{what} needs about {required} bytes, budget is {budget} "
                         f"(set RELDENSITY_MEMORY_BUDGET to raise it)")


def memory_budget() -> int:
    return int(os.environ.get("RELDENSITY_MEMORY_BUDGET", DEFAULT_BUDGET))


def _check_budget(required: int, what: str):
    budget = memory_budget()
    if required > budget:
        raise MemoryBudgetError(required, budget, what)


def small_primes(n: int) -> np.ndarray:
    """All primes <= n (plain sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p::p] = False
    return np.flatnonzero(s).astype(np.int64)


@dataclass(frozen=True)
class SieveTable:
    lo: int
    hi: int
    omega_values: np.ndarray  # omega(n) for n in [lo, hi)

    def __getitem__(self, n: int) -> int:
        return int(self.omega_values[n - self.lo])


def sieve_segment(lo: int, hi: int, primes: np.ndarray) -> SieveTable:
    """omega(n) for lo <= n < hi, given all primes up to sqrt(hi - 1).

    Each small prime adds one to its multiples and is divided out of a
    cofactor array; whatever cofactor is left above 1 is a single prime
    larger than sqrt(n), which contributes the final +1.
    """
    if lo < 1 or hi <= lo:
        raise ValueError("need 1 <= lo < hi")
    rem = np.arange(lo, hi, dtype=np.int64)
    om = np.zeros(hi - lo, dtype=np.uint8)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        om[(-lo) % p::p] += 1
        q = p
        while q < hi:
            rem[(-lo) % q::q] //= p
            q *= p
    om += (rem > 1).astype(np.uint8)
    return SieveTable(lo, hi, om)


def sieve_memory_estimate(n_max: int, segment: int = SEGMENT, threads: int = 1) -> int:
    seg = min(segment, n_max)
    return seg * _BYTES_PER_N * max(threads, 1) + 8 * (math.isqrt(n_max) + 1)


def _prepare(n_max, segment, threads):
    if not 2 <= n_max <= MAX_SIEVE:
        raise ValueError(f"n_max must lie in [2, {MAX_SIEVE}]")
    _check_budget(sieve_memory_estimate(n_max, segment, threads or 1), "sieve")
    return small_primes(math.isqrt(n_max) + 1), split_range(1, n_max + 1, segment)


def omega_segments(n_max: int, segment: int = SEGMENT) -> Iterator[SieveTable]:
    """SieveTables covering 1..n_max in increasing order."""
    primes, pieces = _prepare(n_max, segment, 1)
    for a, b in pieces:
        yield sieve_segment(a, b, primes)


def omega_range(n_max: int, segment: int = SEGMENT) -> Iterator[tuple[int, int]]:
    """Stream (n, omega(n)) for n = 1..n_max."""
    for tab in omega_segments(n_max, segment):
        for i, w in enumerate(tab.omega_values.tolist()):
            yield tab.lo + i, w


def omega_histogram(n_max: int, segment: int = SEGMENT,
                    threads: int | None = None) -> np.ndarray:
    """counts[w] = |{n <= n_max : omega(n) = w}|."""
    primes, pieces = _prepare(n_max, segment, threads)
    parts = ordered_map(
        lambda a, b: np.bincount(sieve_segment(a, b, primes).omega_values,
                                 minlength=OMEGA_BINS),
        pieces, threads)
    return np.sum(parts, axis=0, dtype=np.int64)


def omega(n: int) -> int:
    """omega(n) by trial division (reference implementation)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    count, p = 0, 2
    while p * p <= n:
        if n % p == 0:
            count += 1
            while n % p == 0:
                n //= p
        p += 1
    return count + (n > 1)


def s2(n):
    """Number of ones in the binary expansion of n (scalar or int array)."""
    if isinstance(n, np.ndarray):
        return np.bitwise_count(n.astype(np.uint64)).astype(np.int64)
    if n < 1:
        raise ValueError("n >= 1 required")
    return bin(int(n)).count("1")


def binary_digit(j: int, n):
    """j-th binary digit (j = 1 is the units digit): parity of floor(n / 2^(j-1))."""
    if j < 1:
        raise ValueError("j >= 1 required")
    if isinstance(n, np.ndarray):
        return (n.astype(np.int64) >> (j - 1)) & 1
    return (int(n) >> (j - 1)) & 1


@dataclass(frozen=True)
class PrimeReciprocalSum:
    x: int
    total: float
    bound: float
    holds: bool
    prime_count: int


def prime_reciprocal_sum(x: int) -> PrimeReciprocalSum:
    """Sum of 1/p over primes p <= x, with the lower bound ln ln x - 1/2."""
    if x < 2:
        raise ValueError("x >= 2 required")
    primes = small_primes(int(x))
    total = math.fsum(1.0 / primes)
    bound = math.log(math.log(x)) - 0.5
    return PrimeReciprocalSum(int(x), total, bound, total > bound, int(primes.size))


# ------------------------------------------------------------ Erdős–Kac


@dataclass
class ErdosKacSummary:
    n_max: int
    mode: str
    ks_to_phi: float
    mean: float
    variance: float
    mean_omega: float
    lnln: float
    histogram: np.ndarray | None = None

    @property
    def shift(self) -> float:
        return self.mean_omega - self.lnln

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "mode": self.mode, "ks_to_phi": self.ks_to_phi,
                "mean": self.mean, "variance": self.variance,
                "mean_omega": self.mean_omega, "shift": self.shift}


LNLN_CUTOFF = 2  # ln ln n > 0 needs n >= 3


def _omega_all(n_max, segment, threads):
    _check_budget(n_max * 9 + sieve_memory_estimate(n_max, segment, threads or 1),
                  "per-n statistic")
    primes, pieces = _prepare(n_max, segment, threads)
    return np.concatenate(ordered_map(
        lambda a, b: sieve_segment(a, b, primes).omega_values, pieces, threads))


def erdos_kac_cdf(n_max: int, normalization: str = "lnln_N", cutoff: int = LNLN_CUTOFF,
                  segment: int = SEGMENT, threads: int | None = None,
                  histogram: np.ndarray | None = None) -> EmpiricalCDF:
    """Empirical CDF of the normalized number of distinct prime factors.

    ``lnln_N``: (omega(n) - ln ln N)/sqrt(ln ln N) over n = 1..N, N = n_max.
    ``lnln_n``: (omega(n) - ln ln n)/sqrt(ln ln n) over cutoff < n <= n_max.
    """
    if n_max < 100:
        raise ValueError("n_max >= 100 required")
    if normalization == "lnln_N":
        hist = omega_histogram(n_max, segment, threads) if histogram is None else histogram
        L = math.log(math.log(n_max))
        w = np.arange(hist.size)
        return EmpiricalCDF.from_histogram((w - L) / math.sqrt(L), hist)
    if normalization == "lnln_n":
        if cutoff < 2:
            raise ValueError("cutoff must be >= 2 so that ln ln n > 0")
        om = _omega_all(n_max, segment, threads)[cutoff:]
        L = np.log(np.log(np.arange(cutoff + 1, n_max + 1, dtype=np.float64)))
        return EmpiricalCDF.from_samples((om - L) / np.sqrt(L))
    raise ValueError(f"unknown normalization {normalization!r}")


def erdos_kac_summary(n_max: int, normalization: str = "lnln_N",
                      threads: int | None = None, **kw) -> ErdosKacSummary:
    hist = omega_histogram(n_max, threads=threads)
    cdf = erdos_kac_cdf(n_max, normalization, threads=threads, histogram=hist, **kw)
    mean_omega = math.fsum(np.arange(hist.size) * hist) / n_max
    return ErdosKacSummary(n_max, normalization, cdf.ks_to(PHI), cdf.mean(),
                           cdf.variance(), mean_omega, math.log(math.log(n_max)), hist)


def hardy_ramanujan_fraction(n_max: int, eps: float, threads: int | None = None) -> float:
    """Fraction of n <= n_max with |omega(n)/ln ln N - 1| >= eps."""
    if eps <= 0 or n_max < 100:
        raise ValueError("need eps > 0 and n_max >= 100")
    hist = omega_histogram(n_max, threads=threads)
    L = math.log(math.log(n_max))
    bad = np.abs(np.arange(hist.size) / L - 1.0) >= eps
    return int(hist[bad].sum()) / n_max


# ------------------------------------------------------------ digit sums


def digit_counts(m: int) -> np.ndarray:
    """counts[k] = |{0 <= n < 2^m : s2(n) = k}|."""
    if not 1 <= m <= 30:
        raise ValueError("enumeration too large" if m > 30 else "m >= 1 required")
    pieces = split_range(0, 1 << m, 1 << 22)
    parts = [np.bincount(np.bitwise_count(np.arange(a, b, dtype=np.uint64)), minlength=m + 1)
             for a, b in pieces]
    return np.sum(parts, axis=0, dtype=np.int64)


def digit_law(m: int) -> EmpiricalCDF:
    """Binomial(m, 1/2) normalized by mean m/2 and sd sqrt(m)/2, as a step CDF."""
    k = np.arange(m + 1)
    counts = np.array([math.comb(m, int(j)) for j in k], dtype=np.int64)
    return EmpiricalCDF.from_histogram((k - m / 2) / math.sqrt(m / 4), counts)


def digit_clt_cdf(m: int, threads: int | None = None) -> tuple[DiscreteLaw, EmpiricalCDF]:
    """Exact law of s2 over [0, 2^m) and the empirical CDF of
    (s2(n) - log2(n)/2) / sqrt(log2(n)/4) over n = 2..2^m."""
    if m < 2 or m > 30:
        raise ValueError("enumeration too large" if m > 30 else "m >= 2 required")
    _check_budget(24 << m, "digit enumeration")
    counts = digit_counts(m)
    law = DiscreteLaw({k: Fraction(int(c), 1 << m) for k, c in enumerate(counts) if c})

    def stat(a, b):
        n = np.arange(a, b, dtype=np.int64)
        L = np.log2(n.astype(np.float64))
        return (s2(n) - L / 2) / np.sqrt(L / 4)

    samples = np.concatenate(ordered_map(stat, split_range(2, (1 << m) + 1), threads))
    return law, EmpiricalCDF.from_samples(samples)
