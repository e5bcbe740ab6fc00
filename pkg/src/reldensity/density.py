"""Relative measure (natural density) of subsets of the positive integers.

Sets are described by small immutable spec objects that can produce a
membership mask for any block of integers. Symbolic specs (progressions,
binary-digit sets, eventually periodic patterns, and Boolean combinations of
those) additionally know a joint period, which gives their density exactly.

Residue classes use the convention A(n, k) = {jn + k : j >= 0} with
k in 1..n, so A(n, n) are the positive multiples of n.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._chunks import geometric_points, ordered_map, split_range

MAX_JOINT_PERIOD = 1 << 24
MAX_N = 1 << 62


class IntegerSetSpec:
    """Base class; subclasses implement ``mask`` and, if symbolic, ``signature``."""

    symbolic = True

    def mask(self, lo: int, hi: int) -> np.ndarray:
        raise NotImplementedError

    def signature(self) -> tuple[int, int] | None:
        """(period, offset) such that membership is periodic for n > offset."""
        return None

    def contains(self, n: int) -> bool:
        return bool(self.mask(n, n + 1)[0])


def _arange(lo, hi):
    return np.arange(lo, hi, dtype=np.int64)


def bit_length(x: np.ndarray) -> np.ndarray:
    """Elementwise int.bit_length for non-negative int64 arrays."""
    x = np.asarray(x, dtype=np.int64)
    e = np.frexp(x.astype(np.float64))[1].astype(np.int64)
    # float rounding can push 2^k - 1 up to 2^k for k > 53
    over = (e > 0) & ((np.int64(1) << np.maximum(e - 1, 0)) > x)
    return e - over


@dataclass(frozen=True)
class ArithmeticProgression(IntegerSetSpec):
    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1 or not 1 <= self.residue <= self.modulus:
            raise ValueError("need modulus >= 1 and residue in 1..modulus")

    def mask(self, lo, hi):
        return _arange(lo, hi) % self.modulus == self.residue % self.modulus

    def signature(self):
        return self.modulus, 0

    def __str__(self):
        return f"A({self.modulus},{self.residue})"


@dataclass(frozen=True)
class BinaryDigitSet(IntegerSetSpec):
    """Integers whose j-th binary digit (j=1 is the units digit) is 1."""

    j: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("digit index j must be >= 1")

    def mask(self, lo, hi):
        return (_arange(lo, hi) >> (self.j - 1)) & 1 == 1

    def signature(self):
        return 1 << self.j, 0

    def __str__(self):
        return f"B({self.j})"


@dataclass(frozen=True)
class EventuallyPeriodic(IntegerSetSpec):
    """Membership of n0+1..n0+k given by ``pattern`` and repeated with period k.

    ``head`` gives membership of 1..n0 (all False by default).
    """

    period: int
    offset: int
    pattern: tuple[bool, ...]
    head: tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.period < 1 or self.offset < 0:
            raise ValueError("need period >= 1 and offset >= 0")
        if len(self.pattern) != self.period:
            raise ValueError("pattern length must equal the period")
        if self.head is not None and len(self.head) != self.offset:
            raise ValueError("head length must equal the offset")

    def mask(self, lo, hi):
        n = _arange(lo, hi)
        pat = np.asarray(self.pattern, dtype=bool)
        out = pat[(n - self.offset - 1) % self.period]
        early = n <= self.offset
        if early.any():
            head = np.asarray(self.head if self.head is not None
                              else (False,) * self.offset, dtype=bool)
            out = out.copy()
            out[early] = head[n[early] - 1]
        return out

    def signature(self):
        return self.period, self.offset

    def __str__(self):
        return f"Periodic(k={self.period},n0={self.offset})"


@dataclass(frozen=True)
class BlockExample(IntegerSetSpec):
    """{k : 2^(2m+1) < k <= 2^(2m+2) for some m >= 0}: dyadic blocks
    switched on and off alternately, so the partial densities swing
    between 1/3 and 2/3 forever."""

    symbolic = False

    def mask(self, lo, hi):
        n = _arange(lo, hi)
        # n lies in (2^(e-1), 2^e] with e = bit_length(n - 1)
        e = bit_length(np.maximum(n - 1, 0))
        return (n >= 2) & (e % 2 == 0)

    def __str__(self):
        return "BlockExample"


@dataclass(frozen=True)
class Predicate(IntegerSetSpec):
    membership: Callable
    label: str = "predicate"
    vectorized: bool = False

    symbolic = False

    def mask(self, lo, hi):
        n = _arange(lo, hi)
        if self.vectorized:
            return np.asarray(self.membership(n), dtype=bool)
        return np.fromiter((bool(self.membership(int(k))) for k in n),
                           dtype=bool, count=n.size)

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Intersection(IntegerSetSpec):
    specs: tuple[IntegerSetSpec, ...]

    def __init__(self, specs: Sequence[IntegerSetSpec]):
        object.__setattr__(self, "specs", tuple(specs))
        if not self.specs:
            raise ValueError("empty intersection")

    @property
    def symbolic(self):
        return all(s.symbolic for s in self.specs)

    def mask(self, lo, hi):
        out = self.specs[0].mask(lo, hi)
        for s in self.specs[1:]:
            out = out & s.mask(lo, hi)
        return out

    def signature(self):
        sigs = [s.signature() for s in self.specs]
        if any(sig is None for sig in sigs):
            return None
        return math.lcm(*(p for p, _ in sigs)), max(o for _, o in sigs)

    def __str__(self):
        return "(" + " & ".join(str(s) for s in self.specs) + ")"


@dataclass(frozen=True)
class Complement(IntegerSetSpec):
    spec: IntegerSetSpec

    @property
    def symbolic(self):
        return self.spec.symbolic

    def mask(self, lo, hi):
        return ~self.spec.mask(lo, hi)

    def signature(self):
        return self.spec.signature()

    def __str__(self):
        return f"~{self.spec}"


# ---------------------------------------------------------------- exact


def _flatten(spec):
    if isinstance(spec, Intersection):
        for s in spec.specs:
            yield from _flatten(s)
    else:
        yield spec


def _progression_intersection(aps) -> Fraction:
    """CRT: the intersection of residue classes is a class mod lcm, or empty."""
    mod, res = 1, 0
    for ap in aps:
        m, r = ap.modulus, ap.residue % ap.modulus
        g = math.gcd(mod, m)
        if (r - res) % g:
            return Fraction(0)
        # solve res + mod*t = r (mod m)
        t = ((r - res) // g * pow(mod // g, -1, m // g)) % (m // g) if m // g > 1 else 0
        res = res + mod * t
        mod = mod * m // g
        res %= mod
    return Fraction(1, mod)


def density_exact(spec: IntegerSetSpec) -> Fraction:
    """Exact relative measure of a symbolic spec, as a rational."""
    if isinstance(spec, ArithmeticProgression):
        return Fraction(1, spec.modulus)
    if isinstance(spec, BinaryDigitSet):
        return Fraction(1, 2)
    if isinstance(spec, EventuallyPeriodic):
        return Fraction(sum(map(bool, spec.pattern)), spec.period)
    if isinstance(spec, Complement):
        return 1 - density_exact(spec.spec)
    if not spec.symbolic:
        raise ValueError(f"no exact density for {spec}")
    if isinstance(spec, Intersection):
        parts = list(_flatten(spec))
        if all(isinstance(p, ArithmeticProgression) for p in parts):
            return _progression_intersection(parts)
    sig = spec.signature()
    if sig is None:
        raise ValueError(f"no exact density for {spec}")
    period, offset = sig
    if period > MAX_JOINT_PERIOD:
        raise ValueError(f"joint period {period} too large for enumeration")
    count = int(spec.mask(offset + 1, offset + 1 + period).sum())
    return Fraction(count, period)


# ---------------------------------------------------------------- empirical


def prefix_counts(mask_fn: Callable[[int, int], np.ndarray], n_max: int,
                  points: Sequence[int], threads: int | None = None) -> dict[int, int]:
    """|A intersect {1..N}| for every N in ``points`` in a single streaming pass."""
    if n_max >= MAX_N:
        raise OverflowError(f"n_max={n_max} exceeds the int64 scan range")
    pts = sorted({int(p) for p in points if 1 <= p <= n_max})
    pieces = split_range(1, n_max + 1, cuts=[p + 1 for p in pts])
    counts = ordered_map(lambda a, b: int(np.count_nonzero(mask_fn(a, b))), pieces, threads)
    want = set(pts)
    out, running = {}, 0
    for (a, b), c in zip(pieces, counts):
        running += c
        if b - 1 in want:
            out[b - 1] = running
    return out


@dataclass
class DensityEstimate:
    value: float | None
    checkpoints: list[tuple[int, float]]
    limsup_probe: float
    liminf_probe: float
    verdict: str
    probes: list[tuple[int, float]] = field(default_factory=list)
    label: str = ""

    def to_dict(self) -> dict:
        d = {
            "spec": self.label,
            "checkpoints": [[n, v] for n, v in self.checkpoints],
            "verdict": self.verdict,
            "liminf": self.liminf_probe,
            "limsup": self.limsup_probe,
        }
        if self.value is not None:
            d["value"] = self.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _verdict(checkpoints, probes, tol):
    tail = [d for _, d in probes[-4:]] or [checkpoints[-1][1]]
    hi, lo = max(tail), min(tail)
    last3 = [d for _, d in checkpoints[-3:]]
    if hi - lo > 10 * tol:
        return "Oscillating", lo, hi
    if len(last3) == 3 and max(last3) - min(last3) < tol:
        return "Converged", lo, hi
    return "Inconclusive", lo, hi


def _estimate(mask_fn, n_max, checkpoint_count, tol, threads, scale=1.0, label=""):
    cps = geometric_points(n_max, checkpoint_count)
    e_max = n_max.bit_length() - 1
    pows = [1 << e for e in range(1, e_max + 1)]
    counts = prefix_counts(mask_fn, n_max, cps + pows, threads)
    checkpoints = [(n * scale if scale != 1.0 else n, counts[n] / n) for n in cps]
    probes = [(n * scale if scale != 1.0 else n, counts[n] / n) for n in pows]
    verdict, lo, hi = _verdict(checkpoints, probes, tol)
    value = None if verdict == "Oscillating" else checkpoints[-1][1]
    return DensityEstimate(value, checkpoints, hi, lo, verdict, probes, label)


def density_estimate(spec: IntegerSetSpec, n_max: int, checkpoint_count: int = 24,
                     tol: float = 1e-3, threads: int | None = None,
                     use_exact: bool = False) -> DensityEstimate:
    """Stream n = 1..n_max and record |A cap [1,N]|/N at geometric checkpoints.

    The lim-sup/lim-inf probes are the partial densities at the four largest
    powers of two <= n_max. ``use_exact`` replaces the value by the exact
    density when the set is symbolic (verdict ``ExactKnown``).
    """
    if n_max < 2 or checkpoint_count < 2:
        raise ValueError("need n_max >= 2 and checkpoint_count >= 2")
    est = _estimate(spec.mask, n_max, checkpoint_count, tol, threads, label=str(spec))
    if use_exact and spec.symbolic:
        est.value = float(density_exact(spec))
        est.verdict = "ExactKnown"
    return est


def oscillation_probe(spec: IntegerSetSpec, probe_exponents: Sequence[int],
                      threads: int | None = None) -> tuple[float, float]:
    """(min, max) of the partial densities at N = 2^e over the upper half of
    the given exponents."""
    exps = list(probe_exponents)
    if len(exps) < 4:
        raise ValueError("insufficient probes")
    if any(b <= a for a, b in zip(exps, exps[1:])) or exps[0] < 0:
        raise ValueError("probe exponents must be increasing and non-negative")
    pts = [1 << e for e in exps]
    counts = prefix_counts(spec.mask, pts[-1], pts, threads)
    upper = [counts[p] / p for p in pts[len(pts) // 2:]]
    return min(upper), max(upper)


def continuous_density(indicator: Callable, t_max: float, step: float,
                       checkpoint_count: int = 24, tol: float = 1e-3,
                       threads: int | None = None) -> DensityEstimate:
    """(1/T) * integral_0^T 1_A(t) dt by the midpoint rule with spacing ``step``.

    ``indicator`` is called on numpy arrays of sample times. Error is bounded
    by (number of boundary crossings) * step / T.
    """
    if t_max <= 0 or not 0 < step <= t_max / 100:
        raise ValueError("need t_max > 0 and 0 < step <= t_max/100")
    m = int(math.floor(t_max / step + 1e-9))

    def mask_fn(lo, hi):
        t = (np.arange(lo, hi, dtype=np.float64) - 0.5) * step
        return np.asarray(indicator(t), dtype=bool)

    return _estimate(mask_fn, m, checkpoint_count, tol, threads, scale=step,
                     label=getattr(indicator, "__name__", "indicator"))


@dataclass
class NoMeasureWitness:
    primes: list[int]
    residue_densities: dict[int, list[Fraction]]
    classes_equal: bool
    classes_sum_to_one: bool
    singleton_bound: Fraction
    singleton_density: Fraction
    density_of_naturals: Fraction

    @property
    def sigma_additivity_fails(self) -> bool:
        # countably many singletons of density 0 cover N, which has density 1
        return self.singleton_density == 0 and self.density_of_naturals == 1

    def to_dict(self) -> dict:
        return {
            "primes": self.primes,
            "classes_equal": self.classes_equal,
            "classes_sum_to_one": self.classes_sum_to_one,
            "singleton_bound": str(self.singleton_bound),
            "sum_of_singleton_densities": str(self.singleton_density),
            "density_of_naturals": str(self.density_of_naturals),
            "sigma_additivity_fails": self.sigma_additivity_fails,
        }


def _primes_upto(n: int) -> list[int]:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def no_measure_witness(prime_bound: int, singleton: int = 1) -> NoMeasureWitness:
    """Check that every residue class mod p has density exactly 1/p for all
    primes p <= prime_bound, hence any singleton has density <= 1/p."""
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    primes = _primes_upto(prime_bound)
    dens = {p: [density_exact(ArithmeticProgression(p, k)) for k in range(1, p + 1)]
            for p in primes}
    equal = all(all(d == Fraction(1, p) for d in ds) for p, ds in dens.items())
    total = all(sum(ds) == 1 for ds in dens.values())
    point = EventuallyPeriodic(1, singleton, (False,),
                               tuple(i == singleton for i in range(1, singleton + 1)))
    return NoMeasureWitness(
        primes=primes,
        residue_densities=dens,
        classes_equal=equal,
        classes_sum_to_one=total,
        singleton_bound=Fraction(1, primes[-1]),
        singleton_density=density_exact(point),
        density_of_naturals=density_exact(Complement(EventuallyPeriodic(1, 0, (False,)))),
    )
