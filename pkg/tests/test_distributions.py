import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reldensity import distributions as D
from reldensity.density import BinaryDigitSet
from reldensity.sequences import RealSeq, cosine_seq, indicator_seq
from reldensity.stats import PHI, EvaluableCDF, binomial_pmf

PRIMES16 = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
# exact-sample KS of the 16-term cosine sum at n <= 10^6, from scripts/oracles.py
COSINE16_KS = 0.002401942183808403


def four_case(n):
    r = n % 4
    nf = n.astype(np.float64)
    return np.select([r == 0, r == 1, r == 2], [-nf, 0.0 * nf, 1.0 / nf], nf)


alternating = RealSeq(lambda n: np.where(n % 2 == 0, 1.0, -1.0), (-1, 1), "(-1)^n")
b1 = indicator_seq(BinaryDigitSet(1))


def b1_plus_b2(n):
    return ((n & 1) + ((n >> 1) & 1)).astype(float)


def test_four_case_example():
    F = D.relative_cdf(RealSeq(four_case), 4 * 10**5, [-0.5, 0.0, 0.5])
    assert np.allclose(F.values, [0.25, 0.5, 0.75], atol=1e-4)


def test_alternating_cdf():
    F = D.relative_cdf(alternating, 1000, [-1, 0, 1])
    assert F.values.tolist() == [0.5, 0.5, 1.0]
    assert F(-2) == 0.0 and F(0.3) == 0.5 and F(7) == 1.0


def test_arcsine_fit():
    F = D.relative_cdf(cosine_seq(math.sqrt(2)), 10**6, np.linspace(-1, 1, 512))
    assert F.ks_to(D.ARCSINE) <= 3e-3


def test_relative_cdf_errors():
    with pytest.raises(ValueError):
        D.relative_cdf(alternating, 10, [0, -1])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=20, unique=True),
       st.integers(1, 5000))
def test_relative_cdf_monotone_and_bounded(zs, N):
    F = D.relative_cdf(cosine_seq(math.sqrt(3)), N, sorted(zs))
    v = F.values
    assert np.all(np.diff(v) >= 0) and v[0] >= 0 and v[-1] <= 1


def test_relative_average():
    r = D.relative_average(cosine_seq(math.sqrt(2)), 10**6)
    assert abs(r.value) <= 1e-3
    assert D.relative_average(RealSeq(lambda n: np.ones(n.shape)), 10**5).value == 1.0
    N = 10**5 + 1
    assert abs(D.relative_average(b1, N).value - 0.5) <= 1 / N
    assert r.checkpoints[-1][0] == 10**6
    assert [c for c, _ in r.checkpoints] == sorted({c for c, _ in r.checkpoints})


def test_stieltjes_mean():
    assert D.stieltjes_mean(D.relative_cdf(alternating, 1000, [-1, 0, 1])) == 0.0
    F = D.relative_cdf(cosine_seq(math.sqrt(2)), 10**6, np.linspace(-1, 1, 512))
    m = D.stieltjes_mean(F, "midpoint")
    assert abs(m) <= 5e-3
    assert abs(m - D.relative_average(cosine_seq(math.sqrt(2)), 10**6).value) <= 5e-3
    F = D.relative_cdf(b1, 10**6, [0.0, 1.0])
    assert abs(D.stieltjes_mean(F) - 0.5) <= 1e-3
    with pytest.raises(ValueError, match="support not covered"):
        D.stieltjes_mean(D.relative_cdf(alternating, 100, [0.0, 1.0]))


def test_stieltjes_refinement_converges():
    x = cosine_seq(math.sqrt(5))
    avg = D.relative_average(x, 10**5).value
    errs = [abs(D.stieltjes_mean(D.relative_cdf(x, 10**5, np.linspace(-1, 1, k)), "midpoint")
                - avg) for k in (9, 65, 513)]
    assert errs[2] < errs[0] and errs[2] <= 2 / 512


def test_rho_examples():
    r = D.rho(RealSeq(b1_plus_b2), 2**20)
    assert all(abs(r[k] - v) <= Fraction(1, 2**18)
               for k, v in {0: Fraction(1, 4), 1: Fraction(1, 2), 2: Fraction(1, 4)}.items())
    assert D.rho(RealSeq(lambda n: np.full(n.shape, 3.0)), 100).masses == {3: 1}
    N = 10**4 + 1
    r = D.rho(RealSeq(lambda n: (n % 3).astype(float)), N)
    assert all(abs(r[k] - Fraction(1, 3)) <= Fraction(1, N) for k in range(3))
    with pytest.raises(ValueError, match="non-integer"):
        D.rho(cosine_seq(math.sqrt(2)), 10)


def test_rho_sums_to_one():
    r = D.rho(RealSeq(lambda n: (n % 7).astype(float) - 3), 9999)
    assert r.total() == 1 and r.is_exact()


def test_convolution_examples():
    b = D.bernoulli_law()
    assert D.rho_convolve(b, b).masses == {0: Fraction(1, 4), 1: Fraction(1, 2), 2: Fraction(1, 4)}
    assert D.rho_convolve(D.delta_law(0), b) == b
    law = D.rho_power(b, 10)
    assert all(law[k] == binomial_pmf(10, k, exact=True) for k in range(11))


laws = st.dictionaries(st.integers(-5, 5), st.integers(1, 9), min_size=1, max_size=5).map(
    lambda d: D.DiscreteLaw({k: Fraction(v, sum(d.values())) for k, v in d.items()}))


@given(laws, laws, laws)
def test_convolution_algebra(a, b, c):
    assert D.rho_convolve(a, b) == D.rho_convolve(b, a)
    assert D.rho_convolve(D.rho_convolve(a, b), c) == D.rho_convolve(a, D.rho_convolve(b, c))
    ab = D.rho_convolve(a, b)
    assert ab.total() == 1
    assert set(ab.support) == {i + j for i in a.support for j in b.support}


def test_arcsine_values():
    assert D.arcsine_cdf(0) == 0.5
    assert D.arcsine_cdf(-1) == 0.0 and D.arcsine_cdf(1) == 1.0
    assert abs(D.arcsine_cdf(0.5) - 2 / 3) < 1e-15
    assert np.allclose(D.arcsine_cdf(np.array([-2.0, 0.5, 3.0])), [0, 2 / 3, 1])


def test_arcsine_matches_empirical_oracle():
    F = D.relative_cdf(cosine_seq(math.sqrt(2)), 10**6, [0.0, 0.5])
    assert abs(F.values[0] - 0.5) <= 1e-3 and abs(F.values[1] - 2 / 3) <= 1e-3


def test_cdf_convolve():
    H = D.cdf_convolve(D.ARCSINE, D.ARCSINE)
    assert abs(H(0.0) - 0.5) <= 1e-3
    z = np.linspace(-2.5, 2.5, 1001)
    assert np.all(np.diff(H(z)) >= 0)
    assert H(-2.0) == 0.0 and H(2.0) == 1.0
    delta = EvaluableCDF(lambda u: np.where(np.asarray(u) >= 0, 1.0, 0.0), (-1e-9, 1e-9))
    I = D.cdf_convolve(D.ARCSINE, delta)
    z = np.linspace(-0.99, 0.99, 201)
    assert np.max(np.abs(I(z) - D.arcsine_cdf(z))) <= 2 / 4096 * 50
    with pytest.raises(ValueError, match="unbounded support"):
        D.cdf_convolve(PHI, D.ARCSINE)


def test_convolution_power_matches_repeated():
    a = D.convolution_power(D.ARCSINE, 3, cells=512)
    b = D.cdf_convolve(D.cdf_convolve(D.ARCSINE, D.ARCSINE, cells=512), D.ARCSINE, cells=512)
    z = np.linspace(-3, 3, 301)
    assert np.max(np.abs(a(z) - b(z))) < 5e-3


def test_cosine_sum_single_term():
    F = D.cosine_sum_cdf([math.sqrt(2)], 10**6, np.linspace(-1.5, 1.5, 513))
    target = D.rescaled(D.ARCSINE, math.sqrt(0.5))
    assert F.ks_to(target) <= 3e-3


def test_cosine_sum_sixteen():
    r = D.cosine_sum_report([math.sqrt(p) for p in PRIMES16], 10**6)
    assert r.ks_to_phi <= 0.02
    assert abs(r.ks_to_phi - COSINE16_KS) < 1e-6
    assert not r.flagged


def test_cosine_sum_dependent_flagged():
    r = D.cosine_sum_report([math.sqrt(2), math.sqrt(2)], 10**5)
    assert r.flagged and r.ks_to_prediction > 0.05


def test_cosine_sum_continuous_mode():
    r = D.cosine_sum_report([math.sqrt(2), math.sqrt(3)], 10**5, mode="continuous_t")
    assert r.mode == "continuous_t" and r.cdf.n_total == 10**5
    assert abs(r.ks_to_phi_half_step - r.ks_to_phi) < 0.02
    assert "ks_to_phi_half_step" in r.to_dict()
    with pytest.raises(ValueError):
        D.cosine_sum_seq([], "discrete_n")
