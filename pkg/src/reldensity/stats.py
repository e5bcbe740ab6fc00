"""Reference distributions and sup-distance comparisons.

Every CLT experiment in the package ends in a comparison against the
standard normal CDF, so the pieces here are deliberately small and exact:
``phi_cdf`` for the Gaussian, ``binomial_pmf`` for the digit laws, and two
flavours of Kolmogorov-Smirnov distance (grid-based and exact-for-steps).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy import special, stats

_SQRT2 = math.sqrt(2.0)
EXACT_BINOMIAL_MAX = 64


@dataclass(frozen=True)
class EvaluableCDF:
    """A distribution function together with an optional support interval.

    ``eval`` must accept either a float or a numpy array.
    """

    eval: Callable
    support_hint: tuple[float, float] | None = None

    def __call__(self, z):
        return self.eval(z)


def phi_cdf(z):
    """Standard normal CDF, accurate to ~1e-16 absolute.

    Scalars go through ``math.erfc``; arrays through ``scipy.special.ndtr``.
    """
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        return 0.5 * math.erfc(-float(z) / _SQRT2)
    return special.ndtr(np.asarray(z, dtype=np.float64))


PHI = EvaluableCDF(phi_cdf)


def binomial_pmf(m: int, k: int, exact: bool = False):
    """C(m, k) 2^-m.

    With ``exact=True`` (m <= 64) the result is a ``Fraction``. Otherwise a
    float: exact integer division up to m=64, scipy's binomial pmf above
    (a plain log-gamma difference loses about 1e-12 to cancellation by m ~ 3000).
    """
    if m < 1 or m > 10**6:
        raise ValueError(f"m must be in [1, 1e6], got {m}")
    if k < 0 or k > m:
        return Fraction(0) if exact else 0.0
    if exact:
        if m > EXACT_BINOMIAL_MAX:
            raise ValueError("exact mode limited to m <= 64")
        return Fraction(math.comb(m, k), 2**m)
    if m <= EXACT_BINOMIAL_MAX:
        return math.comb(m, k) / 2**m
    return float(stats.binom.pmf(k, m, 0.5))


def binomial_law(m: int) -> np.ndarray:
    """Vector of Binomial(m, 1/2) masses for k = 0..m."""
    k = np.arange(m + 1)
    if m <= EXACT_BINOMIAL_MAX:
        return np.array([math.comb(m, int(j)) / 2**m for j in k])
    return stats.binom.pmf(k, m, 0.5)


def _evaluate(F, grid: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(F(grid), dtype=np.float64)
        if out.shape == grid.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(F(float(z))) for z in grid])


def ks_distance(F, G, grid: Iterable[float]) -> float:
    """max over grid points of |F(z) - G(z)|.

    For step functions the caller is responsible for placing grid points
    on both sides of every jump.
    """
    grid = np.asarray(list(grid) if not isinstance(grid, np.ndarray) else grid,
                      dtype=np.float64)
    if grid.size == 0:
        raise ValueError("empty grid")
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted")
    return float(np.max(np.abs(_evaluate(F, grid) - _evaluate(G, grid))))


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous step CDF stored as sorted (value, count) pairs."""

    values: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalCDF":
        vals, cnts = np.unique(np.asarray(samples, dtype=np.float64),
                               return_counts=True)
        return cls(vals, cnts.astype(np.int64))

    @classmethod
    def from_histogram(cls, values, counts) -> "EmpiricalCDF":
        values = np.asarray(values, dtype=np.float64)
        counts = np.asarray(counts, dtype=np.int64)
        keep = counts > 0
        values, counts = values[keep], counts[keep]
        order = np.argsort(values, kind="stable")
        values, counts = values[order], counts[order]
        # merge coincident values
        uniq, inv = np.unique(values, return_inverse=True)
        merged = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(merged, inv, counts)
        return cls(uniq, merged)

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())

    @property
    def sorted_samples(self) -> np.ndarray:
        return np.repeat(self.values, self.counts)

    def _cum(self) -> np.ndarray:
        return np.cumsum(self.counts)

    def eval(self, z):
        cum = np.concatenate([[0], self._cum()])
        idx = np.searchsorted(self.values, z, side="right")
        out = cum[idx] / self.n_total
        return float(out) if np.ndim(out) == 0 else out

    __call__ = eval

    def left_limit(self, z):
        cum = np.concatenate([[0], self._cum()])
        idx = np.searchsorted(self.values, z, side="left")
        out = cum[idx] / self.n_total
        return float(out) if np.ndim(out) == 0 else out

    def mean(self) -> float:
        return math.fsum(self.values * self.counts) / self.n_total

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(self.counts * (self.values - mu) ** 2) / self.n_total

    def ks_to(self, G) -> float:
        """Exact sup over the real line of |F - G| for a continuous G.

        The supremum of a step function against a continuous CDF is
        attained at a jump, either at the jump value or its left limit.
        """
        n = self.n_total
        cum = self._cum()
        right = cum / n
        left = np.concatenate([[0], cum[:-1]]) / n
        g = _evaluate(G, self.values)
        return float(max(np.max(np.abs(right - g)), np.max(np.abs(left - g))))

    def rows(self):
        return [(float(v), int(c)) for v, c in zip(self.values, self.counts)]
