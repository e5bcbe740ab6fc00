"""Weyl sums, one-dimensional star discrepancy, equidistribution quadrature,
and finitely measurable maps applied to equidistributed sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Callable, Sequence

import numpy as np

from ._chunks import geometric_points, ordered_map, split_range
from .sequences import RealSeq, frac, kronecker_seq

__all__ = [
    "frac", "kronecker_seq", "rational_seq", "GOLDEN", "GOLDEN_LO",
    "WeylSumResult", "weyl_sum", "star_discrepancy_1d", "QMCResult",
    "qmc_integrate", "Piece", "FinitelyMeasurableMap", "cosine_map",
    "identity_map", "threshold_map", "map_independent", "golden_seq",
]

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _golden_lo() -> float:
    with localcontext() as ctx:
        ctx.prec = 50
        exact = (1 + Decimal(5).sqrt()) / 2
        return float(exact - Decimal(GOLDEN))


# rounding error of GOLDEN, used to keep frac(n * phi) accurate at large n
GOLDEN_LO = _golden_lo()


def golden_seq() -> RealSeq:
    return kronecker_seq(GOLDEN, GOLDEN_LO, label="n*golden")


def rational_seq(p: int, q: int) -> RealSeq:
    """x_n = n p / q with an exact fractional-part channel."""
    if q < 1:
        raise ValueError("q >= 1 required")
    return RealSeq(
        generator=lambda n: n * (p / q),
        label=f"n*{p}/{q}",
        fractional=lambda n: ((np.asarray(n, dtype=np.int64) * p) % q) / q,
        meta={"rational": (p, q)},
    )


def _cuts(n_trunc, count):
    cps = geometric_points(n_trunc, count) if n_trunc > 1 else [1]
    return cps, split_range(1, n_trunc + 1, cuts=[c + 1 for c in cps])


def _trace(cps, pieces, partial, finish):
    want, done, out = set(cps), [], []
    for (a, b), p in zip(pieces, partial):
        done.append(p)
        if b - 1 in want:
            out.append((b - 1, finish(done, b - 1)))
    return out


@dataclass
class WeylSumResult:
    h: tuple[int, ...]
    n_trunc: int
    magnitude: float
    trace: list[tuple[int, float]]
    real: float = 0.0
    imag: float = 0.0


def weyl_sum(seqs: Sequence[RealSeq], h: Sequence[int], n_trunc: int,
             checkpoint_count: int = 16, threads: int | None = None) -> WeylSumResult:
    """|(1/N) sum_{n<=N} exp(2 pi i (h_1 x^1_n + ... + h_m x^m_n))|.

    Phases are reduced through the fractional-part channel of each
    sequence, so integer h never sees the lost digits of large x_n.
    """
    h = tuple(int(v) for v in h)
    if len(h) != len(seqs):
        raise ValueError("need one frequency per sequence")
    if all(v == 0 for v in h):
        raise ValueError("trivial character")
    if n_trunc < 1:
        raise ValueError("n_trunc >= 1 required")

    def work(a, b):
        n = np.arange(a, b, dtype=np.int64)
        phase = np.zeros(b - a)
        for s, k in zip(seqs, h):
            if k:
                phase = frac(phase + frac(k * s.frac_at(n)))
        ang = 2.0 * np.pi * phase
        return math.fsum(np.cos(ang)), math.fsum(np.sin(ang))

    cps, pieces = _cuts(n_trunc, checkpoint_count)
    parts = ordered_map(work, pieces, threads)

    def finish(done, N):
        re = math.fsum(p[0] for p in done)
        im = math.fsum(p[1] for p in done)
        return math.hypot(re, im) / N

    trace = _trace(cps, pieces, parts, finish)
    re = math.fsum(p[0] for p in parts) / n_trunc
    im = math.fsum(p[1] for p in parts) / n_trunc
    return WeylSumResult(h, n_trunc, min(math.hypot(re, im), 1.0), trace, re, im)


def star_discrepancy_1d(points) -> float:
    """Exact D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over sorted points."""
    x = np.sort(np.asarray(points, dtype=np.float64).ravel())
    if x.size == 0:
        raise ValueError("no points")
    if x[0] < 0.0 or x[-1] >= 1.0 or not np.all(np.isfinite(x)):
        raise ValueError("points must lie in [0, 1)")
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


@dataclass
class QMCResult:
    value: float
    checkpoints: list[tuple[int, float]]


def qmc_integrate(psi: Callable, seqs: Sequence[RealSeq], n_trunc: int,
                  checkpoint_count: int = 16, threads: int | None = None) -> QMCResult:
    """(1/N) sum_{n<=N} psi({x^1_n}, ..., {x^m_n}); psi receives m arrays."""
    if n_trunc < 1:
        raise ValueError("n_trunc >= 1 required")

    def work(a, b):
        n = np.arange(a, b, dtype=np.int64)
        vals = np.broadcast_to(np.asarray(psi(*(s.frac_at(n) for s in seqs)),
                                          dtype=np.float64), n.shape)
        return math.fsum(vals)

    cps, pieces = _cuts(n_trunc, checkpoint_count)
    parts = ordered_map(work, pieces, threads)
    trace = _trace(cps, pieces, parts, lambda done, N: math.fsum(done) / N)
    return QMCResult(trace[-1][1], trace)


# ------------------------------------------------------------ finitely measurable maps

_DIRECTIONS = ("increasing", "decreasing", "constant")
_CHECK_POINTS = 257


@dataclass(frozen=True)
class Piece:
    """fn restricted to [lo, hi) is monotone in the stated direction."""

    lo: float
    hi: float
    fn: Callable
    direction: str


class FinitelyMeasurableMap:
    """A map on [0, 1) made of finitely many monotone pieces."""

    def __init__(self, pieces: Sequence[Piece], label: str = "g"):
        pieces = sorted(pieces, key=lambda p: p.lo)
        if not pieces:
            raise ValueError("at least one piece required")
        for p in pieces:
            if p.direction not in _DIRECTIONS:
                raise ValueError(f"unknown direction {p.direction!r}")
            if not p.lo < p.hi:
                raise ValueError("empty piece")
            t = np.linspace(p.lo, p.hi, _CHECK_POINTS)[:-1]
            d = np.diff(np.asarray(p.fn(t), dtype=np.float64))
            ok = {"increasing": np.all(d >= 0), "decreasing": np.all(d <= 0),
                  "constant": np.all(d == 0)}[p.direction]
            if not ok:
                raise ValueError(f"piece on [{p.lo}, {p.hi}) is not {p.direction}")
        for a, b in zip(pieces, pieces[1:]):
            if a.hi > b.lo:
                raise ValueError("pieces overlap")
        self.pieces = tuple(pieces)
        self.label = label

    @property
    def piece_count(self) -> int:
        return len(self.pieces)

    def __call__(self, u):
        u = np.asarray(u, dtype=np.float64)
        out = np.full(u.shape, np.nan)
        for p in self.pieces:
            sel = (u >= p.lo) & (u < p.hi)
            if np.any(sel):
                out[sel] = np.broadcast_to(p.fn(u[sel]), u[sel].shape)
        return out

    def preimage(self, lo: float, hi: float, iters: int = 80) -> list[tuple[float, float]]:
        """Intervals (up to endpoints) of u with lo <= g(u) <= hi, by bisection."""
        out = []
        for p in self.pieces:
            if p.direction == "constant":
                v = float(p.fn(np.array([p.lo]))[0])
                if lo <= v <= hi:
                    out.append((p.lo, p.hi))
                continue
            sgn = 1.0 if p.direction == "increasing" else -1.0
            f = lambda t: sgn * float(p.fn(np.array([t]))[0])
            y_lo, y_hi = (lo, hi) if sgn > 0 else (-hi, -lo)

            def first_at_least(y):
                a, b = p.lo, p.hi
                if f(a) >= y:
                    return a
                for _ in range(iters):
                    mid = 0.5 * (a + b)
                    a, b = (a, mid) if f(mid) >= y else (mid, b)
                return b

            def first_above(y):
                a, b = p.lo, p.hi
                if f(a) > y:
                    return a
                for _ in range(iters):
                    mid = 0.5 * (a + b)
                    a, b = (a, mid) if f(mid) > y else (mid, b)
                return b

            s, e = first_at_least(y_lo), first_above(y_hi)
            if e > s:
                out.append((s, e))
        return out

    def preimage_measure(self, lo: float, hi: float) -> float:
        return math.fsum(b - a for a, b in self.preimage(lo, hi))


def cosine_map() -> FinitelyMeasurableMap:
    c = lambda u: np.cos(2.0 * np.pi * u)
    return FinitelyMeasurableMap([Piece(0.0, 0.5, c, "decreasing"),
                                  Piece(0.5, 1.0, c, "increasing")], "cos(2pi u)")


def identity_map() -> FinitelyMeasurableMap:
    return FinitelyMeasurableMap([Piece(0.0, 1.0, lambda u: u, "increasing")], "u")


def threshold_map(c: float = 0.5) -> FinitelyMeasurableMap:
    zero = lambda u: np.zeros(np.shape(u))
    one = lambda u: np.ones(np.shape(u))
    return FinitelyMeasurableMap([Piece(0.0, c, zero, "constant"),
                                  Piece(c, 1.0, one, "constant")], f"1[u>={c}]")


def map_independent(seqs: Sequence[RealSeq],
                    maps: Sequence[FinitelyMeasurableMap]) -> list[RealSeq]:
    """The sequences g_j({x^j_n}); piece counts are kept in ``meta``."""
    if len(seqs) != len(maps):
        raise ValueError("need one map per sequence")
    out = []
    for s, g in zip(seqs, maps):
        if not isinstance(g, FinitelyMeasurableMap):
            raise TypeError("maps must be FinitelyMeasurableMap instances")
        if len(g.pieces) == 1 and g.label == "u":
            out.append(s)
            continue
        out.append(RealSeq(
            generator=lambda n, s=s, g=g: g(s.frac_at(n)),
            label=f"{g.label}({s.label})",
            meta={"piece_count": g.piece_count, "map": g, "base": s},
        ))
    return out
