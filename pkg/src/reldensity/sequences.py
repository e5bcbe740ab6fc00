"""Deterministic real sequences indexed by n >= 1, and accurate fractional parts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1
_BELOW_ONE = np.nextafter(1.0, 0.0)


def frac(x):
    """x - floor(x), kept in [0, 1) even when rounding would give 1.0."""
    if np.ndim(x) == 0 and not isinstance(x, np.ndarray):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("frac of a non-finite value")
        r = x - math.floor(x)
        return r if r < 1.0 else float(_BELOW_ONE)
    x = np.asarray(x, dtype=np.float64)
    r = x - np.floor(x)
    return np.where(r < 1.0, r, _BELOW_ONE)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def frac_multiples(alpha: float, n, alpha_lo: float = 0.0) -> np.ndarray:
    """frac(n * alpha) for integer n, with error near one ulp of 1.

    The product n*alpha is carried as an unevaluated sum (Dekker two-product)
    so the fractional part does not lose log10(n) digits. ``alpha_lo`` is an
    optional low-order correction when alpha is known beyond double precision.
    """
    n = np.asarray(n, dtype=np.float64)
    a = np.float64(alpha)
    p = n * a
    nh, nl = _split(n)
    ah, al = _split(a)
    err = ((nh * ah - p) + nh * al + nl * ah) + nl * al
    if alpha_lo:
        err = err + n * alpha_lo
    r = p - np.floor(p)
    return frac(r + err)


@dataclass(frozen=True)
class RealSeq:
    """A real sequence x_1, x_2, ... given by a pure generator.

    ``generator`` maps an int64 array of indices to a float array; set
    ``vectorized=False`` to pass a scalar function instead. ``fractional``
    optionally supplies an accurate frac(x_n) for sequences such as n*alpha
    where x_n itself has lost precision.
    """

    generator: Callable
    range_hint: tuple[float, float] | None = None
    label: str = ""
    vectorized: bool = True
    fractional: Callable | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def values(self, lo: int, hi: int) -> np.ndarray:
        """x_n for n in [lo, hi)."""
        n = np.arange(lo, hi, dtype=np.int64)
        return self.at(n)

    def at(self, n: np.ndarray) -> np.ndarray:
        if self.vectorized:
            out = np.asarray(self.generator(n), dtype=np.float64)
            return np.broadcast_to(out, n.shape).astype(np.float64, copy=False)
        return np.fromiter((self.generator(int(k)) for k in n),
                           dtype=np.float64, count=n.size)

    def frac_at(self, n: np.ndarray) -> np.ndarray:
        if self.fractional is not None:
            return np.asarray(self.fractional(n), dtype=np.float64)
        return frac(self.at(n))

    def __call__(self, n: int) -> float:
        return float(self.at(np.array([n], dtype=np.int64))[0])


def kronecker_seq(alpha: float, alpha_lo: float = 0.0, label: str | None = None) -> RealSeq:
    """x_n = n * alpha, with an accurate fractional-part channel."""
    return RealSeq(
        generator=lambda n: n * alpha,
        label=label or f"n*{alpha!r}",
        fractional=lambda n: frac_multiples(alpha, n, alpha_lo),
    )


def frac_seq(seq: RealSeq) -> RealSeq:
    """The sequence of fractional parts {x_n}."""
    return RealSeq(generator=seq.frac_at, range_hint=(0.0, 1.0),
                   label=f"frac({seq.label})", fractional=seq.frac_at)


def cosine_seq(alpha: float, label: str | None = None) -> RealSeq:
    """x_n = cos(2 pi alpha n), reduced through frac(n alpha)."""
    return RealSeq(
        generator=lambda n: np.cos(2.0 * np.pi * frac_multiples(alpha, n)),
        range_hint=(-1.0, 1.0),
        label=label or f"cos(2pi*{alpha!r}*n)",
    )


def indicator_seq(spec, label: str | None = None) -> RealSeq:
    """0/1 sequence of membership in an integer set spec."""
    def gen(n):
        n = np.asarray(n, dtype=np.int64)
        if n.size == 0:
            return np.zeros(0)
        lo, hi = int(n.min()), int(n.max()) + 1
        return spec.mask(lo, hi)[n - lo].astype(np.float64)

    return RealSeq(generator=gen, range_hint=(0.0, 1.0), label=label or f"1[{spec}]")
