"""Product-rule defects for families of integer sets and of real sequences.

A family A_1..A_m is independent when the density of every intersection
over an index set I with |I| >= 2 equals the product of the individual
densities. We measure the largest violation over all such I.

All 2^m intersection counts come from a single pass: each n is encoded as
the bit pattern of the sets containing it, the patterns are histogrammed,
and a superset-sum transform turns atom counts into intersection counts.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._chunks import ordered_map, split_range
from .density import (MAX_JOINT_PERIOD, ArithmeticProgression, IntegerSetSpec,
                      _progression_intersection)
from .sequences import RealSeq

MAX_FAMILY = 20


@dataclass
class IndependenceReport:
    family_size: int
    subsets_checked: int
    max_defect: float | Fraction
    worst_subset: list[int]
    exact: bool
    worst_intervals: list[int] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_defect"] = (str(self.max_defect) if isinstance(self.max_defect, Fraction)
                           else float(self.max_defect))
        if self.worst_intervals is None:
            d.pop("worst_intervals")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _atom_counts(specs, lo, hi, threads=None) -> np.ndarray:
    m = len(specs)

    def work(a, b):
        code = np.zeros(b - a, dtype=np.int64)
        for i, s in enumerate(specs):
            code |= s.mask(a, b).astype(np.int64) << i
        return np.bincount(code, minlength=1 << m)

    parts = ordered_map(work, split_range(lo, hi), threads)
    return np.sum(parts, axis=0, dtype=np.int64)


def superset_sums(atoms: np.ndarray, m: int) -> np.ndarray:
    """g[S] = sum of atoms[T] over all T containing S (bitmask indexing)."""
    g = np.array(atoms, dtype=np.int64, copy=True)
    for i in range(m):
        v = g.reshape(-1, 2, 1 << i)
        v[:, 0, :] += v[:, 1, :]
    return g


def _subset_mask(m):
    sizes = np.array([bin(s).count("1") for s in range(1 << m)])
    return sizes >= 2


def _products(mu: Sequence, one):
    prods = [one]
    for x in mu:
        prods = prods + [p * x for p in prods]
    return prods


def _bits(s: int) -> list[int]:
    return [i for i in range(s.bit_length()) if s >> i & 1]


def _exact_intersections(specs) -> list[Fraction]:
    m = len(specs)
    sigs = [s.signature() for s in specs]
    period = math.lcm(*(p for p, _ in sigs))
    offset = max(o for _, o in sigs)
    if period <= MAX_JOINT_PERIOD:
        g = superset_sums(_atom_counts(specs, offset + 1, offset + 1 + period), m)
        return [Fraction(int(c), period) for c in g]
    if all(isinstance(s, ArithmeticProgression) for s in specs):
        return [Fraction(1) if s == 0 else
                _progression_intersection([specs[i] for i in _bits(s)])
                for s in range(1 << m)]
    raise ValueError(f"joint period {period} too large for enumeration")


def set_family_defect(specs: Sequence[IntegerSetSpec], n_max: int | None = None,
                      mode: str = "exact", threads: int | None = None) -> IndependenceReport:
    """Largest |mu(cap_I A_i) - prod_I mu(A_i)| over all I with |I| >= 2.

    ``mode="exact"`` uses rational densities over the joint period;
    ``mode="empirical"`` uses truncated densities at ``n_max``.
    """
    specs = list(specs)
    m = len(specs)
    if m > MAX_FAMILY:
        raise ValueError("combinatorial blowup: family size above 20")
    if m < 2:
        raise ValueError("need at least two sets")
    if mode == "exact":
        if not all(s.symbolic for s in specs):
            raise ValueError("exact mode needs symbolic specs")
        inter = _exact_intersections(specs)
        one = Fraction(1)
    elif mode == "empirical":
        if n_max is None or n_max < 1:
            raise ValueError("empirical mode needs n_max >= 1")
        g = superset_sums(_atom_counts(specs, 1, n_max + 1, threads), m)
        inter = list(g / n_max)
        one = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    mu = [inter[1 << i] for i in range(m)]
    prods = _products(mu, one)
    keep = _subset_mask(m)
    best, worst = None, []
    for s in np.flatnonzero(keep):
        d = abs(inter[s] - prods[s])
        if best is None or d > best:
            best, worst = d, _bits(int(s))
    return IndependenceReport(
        family_size=m,
        subsets_checked=int(keep.sum()),
        max_defect=best if mode == "exact" else float(best),
        worst_subset=worst,
        exact=mode == "exact",
    )


@dataclass(frozen=True)
class Interval:
    """Real interval with configurable closedness; default [lo, hi)."""

    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError("interval with lo > hi")

    def contains(self, x: np.ndarray) -> np.ndarray:
        left = x >= self.lo if self.closed_lo else x > self.lo
        right = x <= self.hi if self.closed_hi else x < self.hi
        return left & right

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)


def uniform_intervals(lo: float, hi: float, pieces: int) -> list[Interval]:
    """Partition [lo, hi] into equal half-open cells, the last one closed."""
    edges = np.linspace(lo, hi, pieces + 1)
    return [Interval(float(a), float(b), True, i == pieces - 1)
            for i, (a, b) in enumerate(zip(edges, edges[1:]))]


def _labels(x: np.ndarray, grid: Sequence[Interval]) -> np.ndarray:
    """Index of the interval containing each value; len(grid) for none."""
    out = np.full(x.shape, len(grid), dtype=np.int64)
    for j, iv in enumerate(grid):
        hit = iv.contains(x)
        if np.any(hit & (out != len(grid))):
            raise ValueError("intervals in a grid must be disjoint")
        out[hit] = j
    return out


def sequence_independence_defect(seqs: Sequence[RealSeq],
                                 interval_grid: Sequence[Sequence[Interval]],
                                 n_max: int, tuple_cap: int = 2,
                                 threads: int | None = None) -> IndependenceReport:
    """Largest |mu(cap_j x_j^-1(I_j)) - prod_j mu(x_j^-1(I_j))| over every
    sub-tuple of at most ``tuple_cap`` sequences and every choice of one
    interval per chosen sequence, with densities truncated at ``n_max``."""
    r = len(seqs)
    if r < 2:
        raise ValueError("need at least two sequences")
    if len(interval_grid) != r:
        raise ValueError("one interval grid per sequence")
    if any(len(g) == 0 for g in interval_grid):
        raise ValueError("empty interval grid")
    if n_max < 10**4:
        raise ValueError("n_max must be at least 10^4")
    cap = max(2, min(tuple_cap, r))
    groups = [c for size in range(2, cap + 1) for c in itertools.combinations(range(r), size)]
    bases = [len(g) + 1 for g in interval_grid]

    def work(a, b):
        labels = [_labels(s.values(a, b), g) for s, g in zip(seqs, interval_grid)]
        marg = [np.bincount(lab, minlength=k) for lab, k in zip(labels, bases)]
        joint = []
        for grp in groups:
            code = np.zeros(b - a, dtype=np.int64)
            for j in grp:
                code = code * bases[j] + labels[j]
            joint.append(np.bincount(code, minlength=math.prod(bases[j] for j in grp)))
        return marg, joint

    parts = ordered_map(work, split_range(1, n_max + 1), threads)
    marg = [np.sum([p[0][j] for p in parts], axis=0) for j in range(r)]
    joint = [np.sum([p[1][g] for p in parts], axis=0) for g in range(len(groups))]

    best, worst, worst_iv, checked = -1.0, [], [], 0
    for grp, counts in zip(groups, joint):
        shape = [bases[j] for j in grp]
        for combo in itertools.product(*(range(len(interval_grid[j])) for j in grp)):
            idx = int(np.ravel_multi_index(combo, shape))
            p_joint = counts[idx] / n_max
            p_prod = math.prod(marg[j][c] / n_max for j, c in zip(grp, combo))
            d = abs(p_joint - p_prod)
            checked += 1
            if d > best:
                best, worst, worst_iv = d, list(grp), list(combo)
    return IndependenceReport(r, checked, float(best), worst, False, worst_iv)
