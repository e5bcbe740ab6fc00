import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reldensity.density import (ArithmeticProgression, BinaryDigitSet, BlockExample,
                                Complement, EventuallyPeriodic, Intersection, Predicate,
                                bit_length, continuous_density, density_estimate,
                                density_exact, no_measure_witness, oscillation_probe,
                                prefix_counts)

AP = ArithmeticProgression
squares = Predicate(lambda n: np.floor(np.sqrt(n)).astype(np.int64) ** 2 == n, "squares", True)


def brute_count(spec, N):
    return int(np.count_nonzero(spec.mask(1, N + 1)))


def test_residue_convention():
    assert list(np.flatnonzero(AP(3, 3).mask(1, 13)) + 1) == [3, 6, 9, 12]
    assert list(np.flatnonzero(AP(3, 1).mask(1, 10)) + 1) == [1, 4, 7]
    with pytest.raises(ValueError):
        AP(3, 0)


def test_binary_digit_set():
    assert list(np.flatnonzero(BinaryDigitSet(2).mask(1, 9)) + 1) == [2, 3, 6, 7]


def test_block_example_membership():
    # blocks (2,4], (8,16], (32,64]
    got = list(np.flatnonzero(BlockExample().mask(1, 70)) + 1)
    want = [k for k in range(1, 70) if any(2 ** (2 * m + 1) < k <= 2 ** (2 * m + 2)
                                           for m in range(4))]
    assert got == want


def test_bit_length_matches_python():
    x = np.array([0, 1, 2, 3, 2**31, 2**53 - 1, 2**53, 2**53 + 1, 2**62 - 1, 2**62],
                 dtype=np.int64)
    assert bit_length(x).tolist() == [int(v).bit_length() for v in x]


def test_density_exact_examples():
    assert density_exact(AP(6, 6)) == Fraction(1, 6)
    assert density_exact(BinaryDigitSet(3)) == Fraction(1, 2)
    assert density_exact(Intersection([AP(2, 2), AP(4, 4)])) == Fraction(1, 4)
    assert density_exact(Intersection([AP(2, 2), AP(3, 3)])) == Fraction(1, 6)
    assert density_exact(Intersection([AP(2, 1), AP(4, 4)])) == 0
    assert density_exact(Intersection([AP(4, 1), BinaryDigitSet(2)])) == 0
    assert density_exact(Intersection([AP(3, 3), BinaryDigitSet(1)])) == Fraction(1, 6)


def test_density_exact_rejects_non_symbolic():
    for s in (BlockExample(), squares, Intersection([AP(2, 2), squares])):
        with pytest.raises(ValueError, match="no exact density"):
            density_exact(s)


def test_eventually_periodic():
    # n0 = 3, then period 4 with pattern 1,0,0,1; head marks 2
    s = EventuallyPeriodic(4, 3, (True, False, False, True), (False, True, False))
    got = list(np.flatnonzero(s.mask(1, 16)) + 1)
    assert got == [2, 4, 7, 8, 11, 12, 15]
    assert density_exact(s) == Fraction(1, 2)
    with pytest.raises(ValueError):
        EventuallyPeriodic(3, 0, (True,))


specs = st.one_of(
    st.integers(1, 40).flatmap(lambda n: st.builds(AP, st.just(n), st.integers(1, n))),
    st.builds(BinaryDigitSet, st.integers(1, 8)),
    st.integers(1, 12).flatmap(lambda k: st.builds(
        EventuallyPeriodic, st.just(k), st.just(0), st.lists(st.booleans(), min_size=k,
                                                             max_size=k).map(tuple))),
)


@given(specs)
def test_complement_sums_to_one(s):
    assert density_exact(Complement(s)) + density_exact(s) == 1


@given(st.lists(st.integers(1, 30).flatmap(lambda n: st.builds(AP, st.just(n), st.integers(1, n))),
                min_size=2, max_size=4))
def test_crt_matches_period_enumeration(aps):
    inter = Intersection(aps)
    period = math.lcm(*(a.modulus for a in aps))
    brute = Fraction(int(inter.mask(1, period + 1).sum()), period)
    assert density_exact(inter) == brute


@settings(max_examples=15, deadline=None)
@given(specs)
def test_estimate_agrees_with_exact(s):
    est = density_estimate(s, 10**6)
    assert abs(est.checkpoints[-1][1] - float(density_exact(s))) <= 2e-3


@given(st.integers(1, 12), st.integers(0, 20), st.data())
def test_periodic_partial_density_bound(k, n0, data):
    pat = tuple(data.draw(st.lists(st.booleans(), min_size=k, max_size=k)))
    s = EventuallyPeriodic(k, n0, pat)
    j = data.draw(st.integers(1, 50))
    N = n0 + j * k
    assert abs(brute_count(s, N) / N - float(density_exact(s))) <= (n0 + k) / N


def test_density_estimate_examples():
    e = density_estimate(BlockExample(), 2**22)
    assert e.verdict == "Oscillating" and e.value is None
    assert e.limsup_probe >= 0.66 and e.liminf_probe <= 0.34
    e = density_estimate(AP(3, 3), 10**6)
    assert e.verdict == "Converged" and abs(e.value - 1 / 3) <= 1e-3
    e = density_estimate(squares, 10**6)
    assert e.verdict == "Converged" and abs(e.value - 0.001) < 1e-6
    e = density_estimate(AP(3, 3), 10**5, use_exact=True)
    assert e.verdict == "ExactKnown" and e.value == 1 / 3


def test_density_estimate_invariants():
    e = density_estimate(BlockExample(), 10**5, checkpoint_count=10)
    assert e.liminf_probe <= e.limsup_probe
    for N, d in e.checkpoints:
        assert 0 <= d <= 1
        assert d == brute_count(BlockExample(), N) / N
    with pytest.raises(ValueError):
        density_estimate(AP(2, 2), 1)
    with pytest.raises(OverflowError):
        prefix_counts(AP(2, 2).mask, 2**63, [10])


def test_density_json():
    d = json.loads(density_estimate(AP(2, 2), 1000).to_json())
    assert set(d) == {"spec", "checkpoints", "verdict", "value", "liminf", "limsup"}
    d = json.loads(density_estimate(BlockExample(), 2**12).to_json())
    assert "value" not in d


def test_oscillation_probe():
    lo, hi = oscillation_probe(BlockExample(), range(10, 23))
    assert abs(lo - 1 / 3) < 1e-3 and abs(hi - 2 / 3) < 1e-3
    lo, hi = oscillation_probe(AP(2, 2), range(10, 21))
    assert lo == hi == 0.5
    lo, hi = oscillation_probe(Complement(BlockExample()), range(10, 23))
    assert abs(lo - 1 / 3) < 1e-3 and abs(hi - 2 / 3) < 1e-3
    with pytest.raises(ValueError, match="insufficient probes"):
        oscillation_probe(BlockExample(), [10, 11, 12])


@pytest.mark.parametrize("m", range(3, 10))
def test_block_probe_geometric_error(m):
    # exact partial densities at 2^(2m+2) and 2^(2m+1)
    c = prefix_counts(BlockExample().mask, 2 ** (2 * m + 2), [2 ** (2 * m + 1), 2 ** (2 * m + 2)])
    hi = c[2 ** (2 * m + 2)] / 2 ** (2 * m + 2)
    lo = c[2 ** (2 * m + 1)] / 2 ** (2 * m + 1)
    assert abs(hi - 2 / 3) <= 2.0 ** -(2 * m)
    assert abs(lo - 1 / 3) <= 2.0 ** -(2 * m)


def test_continuous_density():
    e = continuous_density(lambda t: np.cos(2 * np.pi * t) <= 0, 1e4, 1e-3)
    assert abs(e.value - 0.5) <= 2e-3
    e = continuous_density(lambda t: (t > 0) & (t < 1), 1e4, 1e-3)
    assert e.verdict == "Converged" and abs(e.value - 1e-4) < 1e-9
    e = continuous_density(lambda t: np.cos(2 * np.pi * math.sqrt(2) * t) <= -0.5, 1e4, 1e-3)
    assert abs(e.value - 1 / 3) <= 5e-3
    with pytest.raises(ValueError):
        continuous_density(lambda t: t > 0, 1.0, 0.1)


def test_no_measure_witness():
    w = no_measure_witness(7)
    assert w.primes == [2, 3, 5, 7]
    assert w.classes_equal and w.classes_sum_to_one
    assert w.singleton_bound == Fraction(1, 7)
    assert w.sigma_additivity_fails
    assert no_measure_witness(97).singleton_bound == Fraction(1, 97)
    assert no_measure_witness(3).singleton_bound == Fraction(1, 3)
    json.dumps(w.to_dict())
