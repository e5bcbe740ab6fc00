import math
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reldensity import equidistribution as E
from reldensity.density import continuous_density
from reldensity.distributions import relative_average
from reldensity.independence import Interval, sequence_independence_defect
from reldensity.sequences import cosine_seq, frac, frac_multiples, kronecker_seq

# mpmath closed forms |sin(pi N a)/sin(pi a)|/N and a direct 10^5-point
# discrepancy in 40-digit arithmetic, from scripts/oracles.py
WEYL_GOLDEN_1E6 = 3.791272611617829e-08
WEYL_PAIR_1E6 = 8.283347691679064e-07
STAR_GOLDEN_1E5 = 3.0121722390058503e-05


def test_frac_examples():
    assert frac(2.75) == 0.75 and frac(-0.25) == 0.75 and frac(3.0) == 0.0
    assert frac(-1e-300) < 1.0


@given(st.floats(-1e15, 1e15, allow_nan=False))
def test_frac_range(x):
    r = frac(x)
    assert 0.0 <= r < 1.0


@settings(max_examples=50)
@given(st.integers(1, 10**9))
def test_frac_multiples_against_decimal(n):
    getcontext().prec = 60
    a = math.sqrt(2)
    exact = Decimal(n) * Decimal(a)
    want = float(exact - int(exact))
    got = float(frac_multiples(a, np.array([n]))[0])
    d = abs(got - want)
    assert min(d, 1 - d) < 1e-15


def test_golden_lo():
    getcontext().prec = 60
    phi = (1 + Decimal(5).sqrt()) / 2
    assert abs(Decimal(E.GOLDEN) + Decimal(E.GOLDEN_LO) - phi) < Decimal(1e-30)


def test_weyl_examples():
    assert E.weyl_sum([kronecker_seq(0.5)], [2], 12345).magnitude == 1.0
    g = E.weyl_sum([E.golden_seq()], [1], 10**6)
    assert g.magnitude <= 3e-6
    assert abs(g.magnitude - WEYL_GOLDEN_1E6) < 1e-11
    p = E.weyl_sum([kronecker_seq(math.sqrt(2)), kronecker_seq(math.sqrt(3))], [1, -1], 10**6)
    assert p.magnitude <= 1e-5
    assert abs(p.magnitude - WEYL_PAIR_1E6) < 1e-10
    with pytest.raises(ValueError, match="trivial character"):
        E.weyl_sum([E.golden_seq()], [0], 10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 3000), st.integers(-5, 5))
def test_weyl_rational_closed_form(p, q, N, h):
    if h == 0:
        h = 1
    r = E.weyl_sum([E.rational_seq(p, q)], [h], N)
    n = np.arange(1, N + 1)
    z = np.exp(2j * np.pi * ((h * p * n) % q) / q).mean()
    assert abs(r.magnitude - abs(z)) < 1e-9
    assert 0 <= r.magnitude <= 1


def test_weyl_trace():
    r = E.weyl_sum([E.golden_seq()], [1], 10**5)
    assert r.trace[-1] == (10**5, r.magnitude)
    assert all(0 <= m <= 1 for _, m in r.trace)


def test_star_discrepancy():
    assert E.star_discrepancy_1d([0.5]) == 0.5
    N = 1000
    assert abs(E.star_discrepancy_1d((np.arange(N) + 0.5) / N) - 1 / (2 * N)) < 1e-15
    pts = E.golden_seq().frac_at(np.arange(1, 10**5 + 1))
    d = E.star_discrepancy_1d(pts)
    assert d <= 2e-4 and abs(d - STAR_GOLDEN_1E5) < 1e-12
    with pytest.raises(ValueError):
        E.star_discrepancy_1d([1.0])


@given(st.lists(st.floats(0, 1, exclude_max=True, allow_nan=False), min_size=1, max_size=40))
def test_star_discrepancy_bounds(xs):
    d = E.star_discrepancy_1d(xs)
    assert 1 / (2 * len(xs)) - 1e-15 <= d <= 1


def test_qmc_examples():
    one = E.qmc_integrate(lambda u: np.ones_like(u), [E.golden_seq()], 10**4)
    assert one.value == 1.0
    uv = E.qmc_integrate(lambda u, v: u * v,
                         [kronecker_seq(math.sqrt(2)), kronecker_seq(math.sqrt(3))], 10**6)
    assert abs(uv.value - 0.25) <= 1e-3
    c = E.qmc_integrate(lambda u: np.cos(2 * np.pi * u), [E.golden_seq()], 10**6)
    assert abs(c.value) <= 1e-5
    w = E.weyl_sum([E.golden_seq()], [1], 10**6)
    assert abs(c.value - w.real) < 1e-12


def test_cosine_map():
    g = E.cosine_map()
    assert g.piece_count == 2
    s = E.map_independent([kronecker_seq(math.sqrt(2))], [g])[0]
    n = np.arange(1, 10**5 + 1)
    assert np.max(np.abs(s.at(n) - cosine_seq(math.sqrt(2)).at(n))) < 1e-12
    assert abs(g.preimage_measure(-1.0, -0.5) - 1 / 3) < 1e-12


def test_identity_map():
    x = E.golden_seq()
    assert E.map_independent([x], [E.identity_map()])[0] is x


def test_threshold_map():
    s = E.map_independent([E.golden_seq()], [E.threshold_map(0.5)])[0]
    assert abs(relative_average(s, 10**6).value - 0.5) <= 2e-4


def test_non_monotone_piece_rejected():
    with pytest.raises(ValueError):
        E.FinitelyMeasurableMap([E.Piece(0.0, 1.0, lambda u: np.cos(2 * np.pi * u),
                                         "increasing")])
    with pytest.raises(ValueError):
        E.FinitelyMeasurableMap([E.Piece(0.0, 0.6, lambda u: u, "increasing"),
                                 E.Piece(0.5, 1.0, lambda u: u, "increasing")])


@settings(max_examples=30)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_cosine_preimage_closed_form(a, b):
    lo, hi = min(a, b), max(a, b)
    want = (math.acos(lo) - math.acos(hi)) / math.pi
    assert abs(E.cosine_map().preimage_measure(lo, hi) - want) < 1e-9


def test_mapped_sequences_stay_independent():
    xs = E.map_independent([kronecker_seq(math.sqrt(2)), kronecker_seq(math.sqrt(3))],
                           [E.cosine_map(), E.threshold_map(0.3)])
    grid = [[Interval(-1, 0), Interval.closed(0, 1)], [Interval.closed(0, 0), Interval.closed(1, 1)]]
    assert sequence_independence_defect(xs, grid, 10**6).max_defect <= 0.01


def test_continuous_sublevel_set():
    e = continuous_density(lambda t: np.cos(2 * np.pi * math.sqrt(2) * t) <= -0.5, 1e4, 1e-3)
    assert abs(e.value - E.cosine_map().preimage_measure(-1, -0.5)) <= 5e-3
