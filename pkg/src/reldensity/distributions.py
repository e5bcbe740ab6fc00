"""Relative distribution functions and averages of real sequences, integer
laws and their convolutions, and the cosine-sum central limit experiment."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ._chunks import geometric_points, ordered_map, split_range
from .sequences import RealSeq, frac_multiples
from .stats import PHI, EmpiricalCDF, EvaluableCDF, ks_distance

# ------------------------------------------------------------ relative CDFs


def _sorted_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid must be finite")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return g


@dataclass(frozen=True)
class RelCDF:
    """F(z_i) = |{n <= n_trunc : x_n <= z_i}| / n_trunc on a grid z_0 < z_1 < ..."""

    grid: np.ndarray
    counts: np.ndarray  # cumulative counts at each grid point
    n_trunc: int
    x_min: float
    x_max: float

    @property
    def values(self) -> np.ndarray:
        return self.counts / self.n_trunc

    def __call__(self, z):
        idx = np.searchsorted(self.grid, z, side="right") - 1
        v = np.concatenate([[0.0], self.values])[np.asarray(idx) + 1]
        return float(v) if np.ndim(v) == 0 else v

    def ks_to(self, G) -> float:
        return ks_distance(lambda z: np.interp(z, self.grid, self.values), G, self.grid)

    def rows(self):
        return [(float(z), float(v)) for z, v in zip(self.grid, self.values)]


def relative_cdf(x: RealSeq, n_trunc: int, grid, threads: int | None = None) -> RelCDF:
    """Count x_1..x_{n_trunc} into the grid in one streaming pass."""
    if n_trunc < 1:
        raise ValueError("n_trunc >= 1 required")
    g = _sorted_grid(grid)

    def work(a, b):
        v = x.values(a, b)
        # x <= g[i]  <=>  searchsorted(g, x, 'left') <= i
        idx = np.searchsorted(g, v, side="left")
        return np.bincount(idx, minlength=g.size + 1), float(v.min()), float(v.max())

    parts = ordered_map(work, split_range(1, n_trunc + 1), threads)
    hist = np.sum([p[0] for p in parts], axis=0, dtype=np.int64)
    return RelCDF(g, np.cumsum(hist)[:-1], n_trunc,
                  min(p[1] for p in parts), max(p[2] for p in parts))


@dataclass
class AverageResult:
    value: float
    checkpoints: list[tuple[int, float]]


def relative_average(x: RealSeq, n_trunc: int, checkpoint_count: int = 16,
                     threads: int | None = None) -> AverageResult:
    """(1/N) sum_{n<=N} x_n with exactly rounded chunk sums, traced at
    geometric N. Chunking is independent of the thread count."""
    if n_trunc < 1:
        raise ValueError("n_trunc >= 1 required")
    cps = geometric_points(n_trunc, checkpoint_count) if n_trunc > 1 else [1]
    pieces = split_range(1, n_trunc + 1, cuts=[c + 1 for c in cps])
    sums = ordered_map(lambda a, b: math.fsum(x.values(a, b)), pieces, threads)
    want = set(cps)
    trace, done = [], []
    for (a, b), s in zip(pieces, sums):
        done.append(s)
        if b - 1 in want:
            trace.append((b - 1, math.fsum(done) / (b - 1)))
    return AverageResult(trace[-1][1], trace)


def stieltjes_mean(F: RelCDF, rule: str = "upper") -> float:
    """Riemann–Stieltjes sum of z dF(z) over the grid cells.

    Mass F(z_0) sits at z_0 and the increment over (z_{i-1}, z_i] at the
    right endpoint ("upper"), the left endpoint ("lower") or the midpoint.
    The error is at most one cell width, and vanishes when every value of
    the sequence is a grid point and rule="upper".
    """
    g, v = F.grid, F.values
    if F.x_min < g[0] or F.x_max > g[-1]:
        raise ValueError("support not covered")
    dF = np.diff(v)
    if rule == "upper":
        z = g[1:]
    elif rule == "lower":
        z = g[:-1]
    elif rule == "midpoint":
        z = 0.5 * (g[:-1] + g[1:])
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return math.fsum(np.concatenate([[v[0] * g[0]], z * dF]))


# ------------------------------------------------------------ discrete laws


@dataclass(frozen=True)
class DiscreteLaw:
    """Finitely supported law on the integers, k -> mass (Fraction or float)."""

    masses: Mapping[int, object]

    def __post_init__(self):
        if any(m < 0 for m in self.masses.values()):
            raise ValueError("negative mass")
        object.__setattr__(self, "masses",
                           {int(k): m for k, m in sorted(self.masses.items()) if m != 0})

    def __getitem__(self, k: int):
        return self.masses.get(k, 0)

    @property
    def support(self) -> list[int]:
        return list(self.masses)

    def total(self):
        return sum(self.masses.values())

    def is_exact(self) -> bool:
        return all(isinstance(m, (int, Fraction)) for m in self.masses.values())

    def to_dict(self) -> dict:
        return {str(k): (str(m) if isinstance(m, Fraction) else float(m))
                for k, m in self.masses.items()}


def bernoulli_law(p=Fraction(1, 2)) -> DiscreteLaw:
    return DiscreteLaw({0: 1 - p, 1: p})


def delta_law(k: int = 0) -> DiscreteLaw:
    return DiscreteLaw({k: Fraction(1)})


def rho(x: RealSeq, n_trunc: int, threads: int | None = None) -> DiscreteLaw:
    """Empirical law k -> |{n <= n_trunc : x_n = k}| / n_trunc, as exact rationals."""
    if n_trunc < 1:
        raise ValueError("n_trunc >= 1 required")

    def work(a, b):
        v = x.values(a, b)
        if not np.all(v == np.rint(v)):
            raise ValueError("non-integer value encountered")
        if np.any(np.abs(v) > 10**6):
            raise ValueError("values must satisfy |x_n| <= 10^6")
        return np.unique(v.astype(np.int64), return_counts=True)

    counts: dict[int, int] = {}
    for ks, cs in ordered_map(work, split_range(1, n_trunc + 1), threads):
        for k, c in zip(ks.tolist(), cs.tolist()):
            counts[k] = counts.get(k, 0) + c
    return DiscreteLaw({k: Fraction(c, n_trunc) for k, c in counts.items()})


def rho_convolve(a: DiscreteLaw, b: DiscreteLaw) -> DiscreteLaw:
    """(a * b)(k) = sum_j a(j) b(k - j)."""
    out: dict[int, object] = {}
    for i, p in a.masses.items():
        for j, q in b.masses.items():
            out[i + j] = out.get(i + j, 0) + p * q
    return DiscreteLaw(out)


def rho_power(a: DiscreteLaw, m: int) -> DiscreteLaw:
    if m < 1:
        raise ValueError("m >= 1 required")
    out = a
    for _ in range(m - 1):
        out = rho_convolve(out, a)
    return out


# ------------------------------------------------------------ continuous laws


def arcsine_cdf(z):
    """Distribution function of cos(2 pi u), u uniform: 1/2 + arcsin(z)/pi on [-1, 1]."""
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        z = float(z)
        if z <= -1.0:
            return 0.0
        if z >= 1.0:
            return 1.0
        return 0.5 + math.asin(z) / math.pi
    z = np.asarray(z, dtype=np.float64)
    return 0.5 + np.arcsin(np.clip(z, -1.0, 1.0)) / np.pi


ARCSINE = EvaluableCDF(arcsine_cdf, (-1.0, 1.0))
CELLS = 4096


def _table(F: EvaluableCDF, n: int):
    lo, hi = F.support_hint
    t = np.linspace(lo, hi, n + 1)
    return t, np.asarray(F(t), dtype=np.float64)


def tabulated_cdf(grid: np.ndarray, values: np.ndarray) -> EvaluableCDF:
    grid, values = np.asarray(grid, float), np.asarray(values, float)

    def ev(z):
        out = np.interp(z, grid, values, left=0.0, right=1.0)
        return float(out) if np.ndim(out) == 0 else out

    return EvaluableCDF(ev, (float(grid[0]), float(grid[-1])))


def cdf_convolve(F: EvaluableCDF, G: EvaluableCDF, grid=None,
                 cells: int = CELLS) -> EvaluableCDF:
    """Distribution function of the sum of independent F- and G-variables.

    G is cut into ``cells`` equal cells on its support and each cell's mass
    is placed at its midpoint, so H(z) = sum_j dG_j F(z - eta_j). H is
    tabulated on ``grid`` (default: 2*cells+1 points across the support of
    the sum) and linearly interpolated between table points.
    """
    if F.support_hint is None or G.support_hint is None:
        raise ValueError("unbounded support: both laws need a support_hint")
    if not all(map(math.isfinite, (*F.support_hint, *G.support_hint))):
        raise ValueError("unbounded support")
    t, Gt = _table(G, cells)
    mass = np.diff(Gt)
    eta = 0.5 * (t[:-1] + t[1:])
    lo = F.support_hint[0] + G.support_hint[0]
    hi = F.support_hint[1] + G.support_hint[1]
    z = (np.linspace(lo, hi, 2 * cells + 1) if grid is None else _sorted_grid(grid))

    def Fz(u):
        out = np.asarray(F(u), dtype=np.float64)
        out = np.where(u < F.support_hint[0], 0.0, out)
        return np.where(u >= F.support_hint[1], 1.0, out)

    H = Gt[0] * Fz(z - t[0])
    for dm, e in zip(mass, eta):
        if dm:
            H = H + dm * Fz(z - e)
    H = np.maximum.accumulate(np.clip(H, 0.0, 1.0))
    if grid is None:
        H[0], H[-1] = 0.0, 1.0
    return tabulated_cdf(z, H)


def convolution_power(F: EvaluableCDF, m: int, cells: int = CELLS) -> EvaluableCDF:
    """m-fold self-convolution by repeated doubling."""
    if m < 1:
        raise ValueError("m >= 1 required")
    result, base = None, F
    while True:
        if m & 1:
            result = base if result is None else cdf_convolve(result, base, cells=cells)
        m >>= 1
        if not m:
            return result
        base = cdf_convolve(base, base, cells=cells)


def rescaled(F: EvaluableCDF, scale: float) -> EvaluableCDF:
    """Law of X/scale when X ~ F."""
    hint = None if F.support_hint is None else tuple(s / scale for s in F.support_hint)
    return EvaluableCDF(lambda z: F(np.asarray(z) * scale), hint)


@functools.lru_cache(maxsize=8)
def arcsine_sum_law(m: int, cells: int = CELLS) -> EvaluableCDF:
    """Law of (cos(2 pi u_1) + ... + cos(2 pi u_m)) / sqrt(m/2), u_j iid uniform."""
    return rescaled(convolution_power(ARCSINE, m, cells), math.sqrt(m / 2))


# ------------------------------------------------------------ cosine sums

DEFAULT_STEP = 1.0 / 64


def cosine_sum_seq(alphas: Sequence[float], mode: str = "discrete_n",
                   step: float = DEFAULT_STEP) -> RealSeq:
    """x_n = sum_j cos(2 pi alpha_j t_n) / sqrt(m/2) with t_n = n (discrete_n)
    or t_n = n*step (continuous_t)."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one frequency")
    if mode == "continuous_t":
        alphas = [a * step for a in alphas]
    elif mode != "discrete_n":
        raise ValueError(f"unknown mode {mode!r}")
    norm = math.sqrt(len(alphas) / 2)

    def gen(n):
        s = np.zeros(np.shape(n))
        for a in alphas:
            s += np.cos(2.0 * np.pi * frac_multiples(a, n))
        return s / norm

    m = len(alphas)
    return RealSeq(gen, (-m / norm, m / norm), f"cosine-sum(m={m},{mode})")


def cosine_sum_cdf(alphas: Sequence[float], n_trunc: int, grid, mode: str = "discrete_n",
                   step: float = DEFAULT_STEP, threads: int | None = None) -> RelCDF:
    return relative_cdf(cosine_sum_seq(alphas, mode, step), n_trunc, grid, threads)


def sample_cdf(x: RealSeq, n_trunc: int, threads: int | None = None) -> EmpiricalCDF:
    """Exact step CDF of x_1..x_{n_trunc} (stores every value)."""
    parts = ordered_map(x.values, split_range(1, n_trunc + 1), threads)
    return EmpiricalCDF.from_samples(np.concatenate(parts))


@dataclass
class CosineSumReport:
    m: int
    n_trunc: int
    mode: str
    ks_to_phi: float
    ks_to_prediction: float
    flagged: bool
    cdf: EmpiricalCDF
    ks_to_phi_half_step: float | None = None

    def to_dict(self) -> dict:
        d = {"label": f"cosine-sum m={self.m}", "m": self.m, "n_trunc": self.n_trunc,
             "mode": self.mode, "ks_to_reference": self.ks_to_phi,
             "ks_to_phi": self.ks_to_phi, "ks_to_prediction": self.ks_to_prediction,
             "independence_flag": self.flagged}
        if self.ks_to_phi_half_step is not None:
            d["ks_to_phi_half_step"] = self.ks_to_phi_half_step
        return d


FLAG_THRESHOLD = 0.05


def cosine_sum_report(alphas: Sequence[float], n_trunc: int, mode: str = "discrete_n",
                      step: float = DEFAULT_STEP, cells: int = CELLS,
                      threads: int | None = None) -> CosineSumReport:
    """Exact-sup KS of the normalized cosine sum against Phi and against the
    law predicted for independent frequencies (m-fold arcsine convolution).
    A prediction gap above 0.05 flags a violated independence hypothesis.

    In continuous_t mode the run is repeated with step/2 over the same time
    span (2 n_trunc samples) and that KS is reported as a discretization check.
    """
    m = len(alphas)
    cdf = sample_cdf(cosine_sum_seq(alphas, mode, step), n_trunc, threads)
    pred = arcsine_sum_law(m, cells)
    ks_pred = cdf.ks_to(pred)
    half = None
    if mode == "continuous_t":
        half = sample_cdf(cosine_sum_seq(alphas, mode, step / 2), 2 * n_trunc,
                          threads).ks_to(PHI)
    return CosineSumReport(m, n_trunc, mode, cdf.ks_to(PHI), ks_pred,
                           ks_pred > FLAG_THRESHOLD, cdf, half)
