"""Lacunary series: Hadamard gaps, Rademacher functions, Lindeberg and weight
conditions, and the Salem–Zygmund / Kac central limit experiments.

Evaluation grids
----------------
A CLT over x in (0, 1) needs frac(n_k x) for n_k as large as 2^256, far
beyond double precision. Grid points are therefore fractions a_i/Q with the
prime Q = 3037000453, for which 2 is a primitive root and Q^2 < 2^63, so

    frac(n_k * a_i / Q) = ((n_k mod Q) * a_i mod Q) / Q

is exact in int64, and for n_k = 2^k the residues 2^k mod Q never repeat
for k < Q - 1.

Each a_i/Q is a fixed pseudo-random point inside the cell ((i-1)/G, i/G)
(stratified sampling, seed LATTICE_SEED). Two simpler choices fail:

* the plain midpoints (i - 1/2)/G: 2^k (i - 1/2)/G has period dividing the
  order of 2 modulo 2G, so only a few thousand distinct sums occur and the
  CDF is far from its limit;
* midpoints rounded to the nearest a/Q: every a_i is then a small multiple
  of (2G)^-1 mod Q, the high-frequency terms become geometric sums over a
  contiguous integer range, and near-resonant pairs push the variance of
  a 128-term sum over 10^4 points about 10% above 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._chunks import ordered_map, split_range
from .stats import EmpiricalCDF

LATTICE_Q = 3037000453
LATTICE_SEED = 20240601
GRID_CHUNK = 1 << 16

# ------------------------------------------------------------ sequences


@dataclass(frozen=True)
class GapSequence:
    """k -> n_k (k >= 1), a strictly increasing sequence of positive integers."""

    generator: Callable[[int], int]
    label: str = ""

    def terms(self, k_max: int) -> list[int]:
        return [int(self.generator(k)) for k in range(1, k_max + 1)]


def powers(base: int = 2) -> GapSequence:
    return GapSequence(lambda k: base ** k, f"{base}^k")


@dataclass(frozen=True)
class WeightSequence:
    """k -> a_k (k >= 1). ``vectorized`` generators receive an int array."""

    generator: Callable
    label: str = ""
    vectorized: bool = True

    def terms(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=np.int64)
        if self.vectorized:
            return np.broadcast_to(np.asarray(self.generator(k), dtype=np.float64),
                                   k.shape).astype(np.float64)
        return np.array([float(self.generator(int(j))) for j in k])


class HadamardResult(NamedTuple):
    min_ratio: float
    holds: bool


def hadamard_check(seq: GapSequence, k_max: int, q: float | None = None,
                   margin: float = 1e-9) -> HadamardResult:
    """min_{k < k_max} n_{k+1}/n_k and whether it exceeds 1 + margin (or q)."""
    if k_max < 2:
        raise ValueError("k_max >= 2 required")
    n = seq.terms(k_max)
    if n[0] < 1:
        raise ValueError("terms must be positive")
    ratios = []
    for a, b in zip(n, n[1:]):
        if b <= a:
            raise ValueError("sequence is not strictly increasing")
        ratios.append(Fraction(b, a))
    r = min(ratios)
    threshold = 1 + margin if q is None else max(q, 1 + margin)
    return HadamardResult(float(r), r > threshold)


# ------------------------------------------------------------ Rademacher


def rademacher(k: int, t):
    """r_k(t) = sign sin(2^k pi t), exact for floats, Fractions and arrays.

    Dyadic t gives 2^k t exactly, so the parity of floor(2^k t) decides the
    sign and an integral 2^k t gives 0.
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    if isinstance(t, np.ndarray):
        u = np.ldexp(t.astype(np.float64), k)
        fl = np.floor(u)
        out = np.where(np.mod(fl, 2) == 0, 1, -1).astype(np.int64)
        return np.where(u == fl, 0, out)
    if isinstance(t, Fraction):
        num, den = t.numerator << k, t.denominator
        fl, rem = divmod(num, den)
    else:
        u = math.ldexp(float(t), k)
        fl = math.floor(u)
        rem = u - fl
    if rem == 0:
        return 0
    return 1 if fl % 2 == 0 else -1


def dyadic_samples(count: int, bits: int = 4200, seed: int = 0) -> list[Fraction]:
    """Random points (2j+1)/2^bits of (0, 1): generic for r_k with k < bits."""
    rng = np.random.default_rng(seed)
    nbytes = (bits + 7) // 8
    out = []
    for _ in range(count):
        x = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - bits)
        out.append(Fraction(x | 1, 1 << bits))
    return out


def rademacher_matrix(t_samples: Sequence, k_max: int) -> np.ndarray:
    """R[s, k-1] = r_k(t_s) for k = 1..k_max, computed from the binary digits."""
    rows = []
    for t in t_samples:
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("samples must lie in [0, 1]")
        den = t.denominator
        if den & (den - 1) == 0:  # dyadic: read the bits directly
            bits = den.bit_length() - 1
            x = t.numerator
            if bits < k_max:
                x <<= k_max - bits
                bits = k_max
            raw = np.frombuffer(x.to_bytes(bits // 8 + 1, "big"), dtype=np.uint8)
            digits = np.unpackbits(raw)[-bits:][:k_max].astype(np.int64)
            r = 1 - 2 * digits
            # r_k vanishes once 2^k t is an integer
            low = x & -x if x else 1 << bits
            last = bits - (low.bit_length() - 1)  # 2^k t integral for k >= last
            r[max(last, 1) - 1:] = 0
        else:
            r = np.array([rademacher(k, t) for k in range(1, k_max + 1)], dtype=np.int64)
        rows.append(r)
    return np.array(rows, dtype=np.int64)


@dataclass
class RademacherProbe:
    k_max: int
    checkpoints: tuple[int, int, int]
    partial_sums: np.ndarray  # samples x 3
    tail_sum: float
    previous_tail_sum: float
    tail_bound: float
    cauchy_fraction: float
    divergence_flag: bool

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "checkpoints": list(self.checkpoints),
                "tail_sum": self.tail_sum, "previous_tail_sum": self.previous_tail_sum,
                "tail_bound": self.tail_bound, "cauchy_fraction": self.cauchy_fraction,
                "divergence_flag": self.divergence_flag}


DIVERGENCE_RATIO = 0.75


def rademacher_series_probe(a: WeightSequence, t_samples: Sequence, k_max: int) -> RademacherProbe:
    """Partial sums of sum_k a_k r_k(t) at K = k_max/4, k_max/2, k_max.

    The Cauchy proxy counts samples with |S_K - S_{K/2}| <= 10 sqrt(tail),
    tail = sum of a_k^2 over (K/2, K]. Divergence is flagged when that tail
    does not shrink: tail(K/2, K] >= 0.75 * tail(K/4, K/2] > 0.
    """
    if k_max < 64:
        raise ValueError("k_max >= 64 required")
    if len(t_samples) < 100:
        raise ValueError("at least 100 samples required")
    w = a.terms(k_max)
    R = rademacher_matrix(t_samples, k_max)
    cps = (k_max // 4, k_max // 2, k_max)
    cum = np.cumsum(R * w, axis=1)
    S = cum[:, [c - 1 for c in cps]]
    w2 = w * w
    tail = math.fsum(w2[cps[1]:cps[2]])
    prev = math.fsum(w2[cps[0]:cps[1]])
    bound = 10.0 * math.sqrt(tail)
    cauchy = float(np.mean(np.abs(S[:, 2] - S[:, 1]) <= bound))
    return RademacherProbe(k_max, cps, S, tail, prev, bound, cauchy,
                           tail > 0 and tail >= DIVERGENCE_RATIO * prev)


# ------------------------------------------------------------ Lindeberg / weights


class LindebergResult(NamedTuple):
    L_n: float
    s_n: float


def lindeberg_bernoulli(p: Sequence[float], eps: float) -> LindebergResult:
    """L_n(eps) for X_k = I_k - p_k with I_k ~ Bernoulli(p_k).

    X_k equals 1 - p_k with probability p_k and -p_k otherwise, so the
    truncated second moment E[X_k^2 1{|X_k| > eps s_n}] is a two-term sum.
    """
    if eps <= 0:
        raise ValueError("eps > 0 required")
    p = [float(v) for v in p]
    if not p or any(not 0 < v < 1 for v in p):
        raise ValueError("all p_k must lie in (0, 1)")
    s2 = math.fsum(v * (1 - v) for v in p)
    s = math.sqrt(s2)
    cut = eps * s
    terms = []
    for v in p:
        if 1 - v > cut:
            terms.append(v * (1 - v) ** 2)
        if v > cut:
            terms.append((1 - v) * v * v)
    return LindebergResult(math.fsum(terms) / s2, s)


def weight_condition_check(a: WeightSequence, n: int) -> float:
    """max_{k<=n} |a_k| / sqrt(sum_{k<=n} a_k^2)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    w = np.abs(a.terms(n))
    top = float(w.max())
    if top == 0:
        raise ValueError("all weights are zero")
    return 1.0 / math.sqrt(math.fsum((w / top) ** 2))


# ------------------------------------------------------------ lattice grids


def lattice_grid(G: int, Q: int = LATTICE_Q, seed: int = LATTICE_SEED) -> np.ndarray:
    """Numerators a_i, i = 1..G, with (i-1)/G < a_i/Q < i/G, one per cell."""
    if G < 1 or G > Q // 2:
        raise ValueError("grid size out of range")
    edges = (np.arange(G + 1, dtype=np.int64) * Q) // G
    rng = np.random.default_rng(seed)
    return rng.integers(edges[:-1] + 1, edges[1:], dtype=np.int64)


def _lattice_scan(G, chunk_fn, threads):
    a = lattice_grid(G)
    parts = ordered_map(lambda lo, hi: chunk_fn(a[lo:hi]), split_range(0, G, GRID_CHUNK),
                        threads)
    return np.concatenate(parts)


def lacunary_sum(n_terms: Sequence[int], G: int, f: Callable = None,
                 threads: int | None = None) -> np.ndarray:
    """S_i = sum_k f(frac(n_k a_i / Q)) on the lattice grid (default f = cos 2 pi u)."""
    f = f or (lambda u: np.cos(2.0 * np.pi * u))
    residues = [int(n) % LATTICE_Q for n in n_terms]

    def work(a):
        s = np.zeros(a.size)
        for r in residues:
            s += f(((r * a) % LATTICE_Q) / LATTICE_Q)
        return s

    return _lattice_scan(G, work, threads)


def salem_zygmund_cdf(seq: GapSequence, m_terms: int, x_grid_size: int,
                      gap_q: float = 1.05, threads: int | None = None) -> EmpiricalCDF:
    """Empirical CDF over the x grid of sum_{k<=m} cos(2 pi n_k x) / sqrt(m/2)."""
    if m_terms < 1:
        raise ValueError("m_terms >= 1 required")
    if x_grid_size < 10**4:
        raise ValueError("x_grid_size >= 10^4 required")
    if m_terms >= 2 and not hadamard_check(seq, m_terms, q=gap_q).holds:
        raise ValueError("not Hadamard")
    n = seq.terms(m_terms)
    S = lacunary_sum(n, x_grid_size, threads=threads) / math.sqrt(m_terms / 2)
    return EmpiricalCDF.from_samples(S)


# ------------------------------------------------------------ Kac


KAC_GRID = 1 << 12


@dataclass(frozen=True)
class PeriodicFunction:
    """A 1-periodic f sampled at t_i = i/G; ``fn`` (if given) is the closed form."""

    samples: np.ndarray
    fn: Callable | None = field(default=None, compare=False)
    label: str = "f"

    @classmethod
    def from_callable(cls, fn: Callable, grid: int = KAC_GRID, label: str = "f"):
        t = np.arange(grid) / grid
        return cls(np.asarray(fn(t), dtype=np.float64), fn, label)

    @property
    def grid(self) -> int:
        return self.samples.size

    def __call__(self, u):
        if self.fn is not None:
            return self.fn(u)
        idx = np.floor(np.asarray(u) * self.grid).astype(np.int64) % self.grid
        return self.samples[idx]


def _as_periodic(f) -> PeriodicFunction:
    if isinstance(f, PeriodicFunction):
        return f
    if callable(f):
        return PeriodicFunction.from_callable(f)
    return PeriodicFunction(np.asarray(f, dtype=np.float64))


def kac_sigma2_terms(f, k_max: int = 10) -> list[float]:
    """[int f^2, int f(t) f(2t), ..., int f(t) f(2^k_max t)] on the sample grid.

    The trapezoid rule on a periodic uniform grid is the sample mean, and
    f(2^k t_i) = f(t_{2^k i mod G}) exactly.
    """
    f = _as_periodic(f)
    G = f.grid
    if G & (G - 1) or G < 8:
        raise ValueError("sample grid must be a power of two >= 8")
    if abs(math.fsum(f.samples)) / G > 1e-9:
        raise ValueError("f must have mean zero")
    if k_max < 0 or (1 << k_max) > G // 4:
        raise ValueError(f"k_max too large for a grid of {G} samples")
    x = f.samples
    i = np.arange(G, dtype=np.int64)
    out = [math.fsum(x * x) / G]
    for k in range(1, k_max + 1):
        out.append(math.fsum(x * x[(i << k) % G]) / G)
    return out


def kac_sigma2(f, k_max: int = 10) -> float:
    """sigma^2 = int f^2 + 2 sum_{k<=k_max} int f(t) f(2^k t) dt."""
    t = kac_sigma2_terms(f, k_max)
    return math.fsum([t[0]] + [2.0 * v for v in t[1:]])


DEGENERATE = 1e-6


def kac_clt_cdf(f, n_terms: int, x_grid_size: int, k_max: int = 10,
                threads: int | None = None) -> EmpiricalCDF:
    """Empirical CDF over the x grid of sum_{k<=N} f(2^k x) / (sigma sqrt(N))."""
    f = _as_periodic(f)
    if n_terms < 1:
        raise ValueError("n_terms >= 1 required")
    if x_grid_size < 10**4:
        raise ValueError("x_grid_size >= 10^4 required")
    s2 = kac_sigma2(f, k_max)
    if s2 < DEGENERATE:
        raise ValueError("degenerate variance")
    S = lacunary_sum([1 << k for k in range(1, n_terms + 1)], x_grid_size, f, threads)
    return EmpiricalCDF.from_samples(S / math.sqrt(s2 * n_terms))
