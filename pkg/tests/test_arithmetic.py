import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reldensity import arithmetic as ar
from reldensity.stats import PHI

# Frozen reference values from scripts/oracles.py (mpmath, sympy primerange,
# an additive omega sieve and exact mpmath KS over the step law).
RECIP_100 = 1.802817201048871
RECIP_1E6 = 2.887328099567673
LNLN_100_HALF = 1.0271796258079011
EK_1E3 = dict(ks=0.32532127236551256, mean=2.126, shift=0.1933552660839345,
              hist=[1, 193, 508, 275, 23])
EK_1E4 = dict(ks=0.31312552842685554, mean=2.43, shift=0.2096731936321536,
              hist=[1, 1280, 4097, 3695, 894, 33])
EK_1E7 = dict(ks=0.2534562777302755, mean=3.0130317, shift=0.23308910569673089,
              hist=[1, 665134, 2536838, 3642766, 2389433, 691209, 72902, 1716, 1])
BINOM_KS = {12: 0.11279296875, 20: 0.08809852600097656, 24: 0.0805901288986206}
DIGIT_KS = {12: 0.20343521019694732, 20: 0.15242635484155576, 24: 0.1382480497760799}


def omega_trial(n):
    k, d = 0, 2
    while d * d <= n:
        if n % d == 0:
            k += 1
            while n % d == 0:
                n //= d
        d += 1
    return k + (n > 1)


def test_omega_examples():
    assert ar.omega(12) == 2 and ar.omega(1) == 0 and ar.omega(2310) == 5


def test_sieve_matches_trial_division():
    got = np.concatenate([t.omega_values for t in ar.omega_segments(10**5, segment=7919)])
    want = np.array([omega_trial(n) for n in range(1, 10**5 + 1)])
    assert np.array_equal(got, want)


@settings(max_examples=40)
@given(st.integers(1, 10**12), st.integers(1, 5000))
def test_segment_anywhere(lo, width):
    hi = lo + width
    tab = ar.sieve_segment(lo, hi, ar.small_primes(math.isqrt(hi) + 1))
    for n in (lo, (lo + hi) // 2, hi - 1):
        assert tab[n] == omega_trial(n)


def test_omega_range_stream():
    assert list(ar.omega_range(12, segment=5)) == [(n, omega_trial(n)) for n in range(1, 13)]


def test_segment_size_and_threads_do_not_matter():
    a = ar.omega_histogram(10**6)
    b = ar.omega_histogram(10**6, segment=12345, threads=4)
    assert np.array_equal(a, b)


def test_memory_budget(monkeypatch):
    monkeypatch.setenv("RELDENSITY_MEMORY_BUDGET", "1000")
    with pytest.raises(ar.MemoryBudgetError) as e:
        ar.omega_histogram(10**6)
    assert e.value.required > 1000 and "bytes" in str(e.value)


def test_s2():
    assert ar.s2(7) == 3 and ar.s2(8) == 1
    for k in range(1, 63):
        assert ar.s2(2**k - 1) == k
    arr = np.array([2**k - 1 for k in range(1, 63)], dtype=np.int64)
    assert ar.s2(arr).tolist() == list(range(1, 63))


@given(st.integers(1, 2**62))
def test_s2_property(n):
    assert ar.s2(n) == sum(ar.binary_digit(j, n) for j in range(1, 64))


def test_binary_digit():
    assert [ar.binary_digit(j, 5) for j in (1, 2, 3)] == [1, 0, 1]


def test_prime_reciprocal_sum():
    r = ar.prime_reciprocal_sum(100)
    assert abs(r.total - 1.802817) <= 1e-5 and abs(r.total - RECIP_100) < 1e-13
    assert r.prime_count == 25 and r.holds
    assert abs(r.bound - LNLN_100_HALF) < 1e-13
    r = ar.prime_reciprocal_sum(2)
    assert r.total == 0.5 and abs(r.bound - (-0.8665)) < 1e-4 and r.holds
    r = ar.prime_reciprocal_sum(10**6)
    assert abs(r.total - RECIP_1E6) < 1e-12 and r.prime_count == 78498


@settings(max_examples=30)
@given(st.integers(3, 10**5))
def test_reciprocal_sum_bound_holds(x):
    assert ar.prime_reciprocal_sum(x).holds


@pytest.mark.parametrize("N,ref", [(10**3, EK_1E3), (10**4, EK_1E4)])
def test_erdos_kac_small(N, ref):
    s = ar.erdos_kac_summary(N)
    assert s.histogram[:len(ref["hist"])].tolist() == ref["hist"]
    assert not s.histogram[len(ref["hist"]):].any()
    assert abs(s.ks_to_phi - ref["ks"]) < 1e-12
    assert abs(s.mean_omega - ref["mean"]) < 1e-12
    assert abs(s.shift - ref["shift"]) < 1e-12


def test_erdos_kac_mean_at_1e4():
    s = ar.erdos_kac_summary(10**4)
    assert abs(s.mean_omega - (math.log(math.log(10**4)) + 0.26)) <= 0.1


def test_erdos_kac_large():
    s = ar.erdos_kac_summary(10**7)
    assert s.histogram[:9].tolist() == EK_1E7["hist"]
    assert abs(s.ks_to_phi - EK_1E7["ks"]) < 1e-12
    assert abs(s.mean_omega - EK_1E7["mean"]) < 1e-12


def test_lnln_n_mode():
    F = ar.erdos_kac_cdf(10**5, "lnln_n")
    assert F.n_total == 10**5 - 2  # n = 3..N
    with pytest.raises(ValueError):
        ar.erdos_kac_cdf(10**5, "lnln_n", cutoff=1)
    with pytest.raises(ValueError):
        ar.erdos_kac_cdf(10**5, "bogus")


@pytest.mark.parametrize("N", [100, 12345, 10**6])
def test_lnln_N_cdf_is_count(N):
    F = ar.erdos_kac_cdf(N, "lnln_N")
    L = math.log(math.log(N))
    hist = ar.omega_histogram(N)
    for b in (-2.0, -0.5, 0.0, 0.7, 1.9):
        want = sum(int(c) for w, c in enumerate(hist) if w <= b * math.sqrt(L) + L) / N
        assert F(b) == want


def test_hardy_ramanujan():
    assert ar.hardy_ramanujan_fraction(10**7, 1.0) <= 0.35
    assert ar.hardy_ramanujan_fraction(10**7, 10.0) <= 0.01
    assert ar.hardy_ramanujan_fraction(10**6, 2.0) <= ar.hardy_ramanujan_fraction(10**6, 1.0)
    hist = ar.omega_histogram(10**5)
    L = math.log(math.log(10**5))
    direct = sum(c for w, c in enumerate(hist) if abs(w / L - 1) >= 0.5) / 10**5
    assert ar.hardy_ramanujan_fraction(10**5, 0.5) == direct


def test_digit_counts():
    assert ar.digit_counts(2).tolist() == [1, 2, 1]
    for m in range(1, 25):
        assert ar.digit_counts(m).tolist() == [math.comb(m, k) for k in range(m + 1)]
    with pytest.raises(ValueError, match="enumeration too large"):
        ar.digit_clt_cdf(31)


@pytest.mark.parametrize("m", [12, 20, 24])
def test_digit_law_ks(m):
    assert abs(ar.digit_law(m).ks_to(PHI) - BINOM_KS[m]) < 1e-12


@pytest.mark.parametrize("m", [12, 20])
def test_digit_clt_empirical(m):
    law, emp = ar.digit_clt_cdf(m)
    assert emp.n_total == 2**m - 1
    assert law.is_exact() and sum(law.masses.values()) == 1
    assert abs(emp.ks_to(PHI) - DIGIT_KS[m]) < 1e-12
