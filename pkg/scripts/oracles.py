"""Independent reference values for the test suite.

Nothing here imports reldensity. Each value is computed by a different
method than the library uses (adaptive quadrature, exact rationals,
arbitrary precision, trial division, an additive sieve, big-integer
binary expansions) and the printed numbers are frozen into tests/.

Needs mpmath and sympy in addition to numpy/scipy. Run:
    python3 scripts/oracles.py            # everything (about 2 minutes)
    python3 scripts/oracles.py --quick    # skip the 10^7 sieve and big grids
"""
from __future__ import annotations

import argparse
import json
import math
import time
from fractions import Fraction

import mpmath as mp
import numpy as np
import sympy
from scipy import integrate

mp.mp.dps = 40


def phi(z):
    return mp.ncdf(z)


def ks_step(values, counts):
    """Exact sup |F - Phi| for a step CDF given by sorted atoms, in mpmath."""
    n = sum(counts)
    cum, best = 0, mp.mpf(0)
    for v, c in zip(values, counts):
        g = phi(mp.mpf(v))
        best = max(best, abs(mp.mpf(cum) / n - g))
        cum += c
        best = max(best, abs(mp.mpf(cum) / n - g))
    return float(best)


def ks_samples(x):
    x = np.sort(np.asarray(x, dtype=np.float64))
    from scipy.special import ndtr
    m = x.size
    i = np.arange(1, m + 1)
    p = ndtr(x)
    return float(max(np.max(i / m - p), np.max(p - (i - 1) / m)))


def phi_at_one():
    v, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), 0.0, 1.0,
                          epsabs=1e-14, epsrel=1e-14)
    return 0.5 + v


def binomial_ks(m):
    vals = [(mp.mpf(k) - mp.mpf(m) / 2) / mp.sqrt(mp.mpf(m) / 4) for k in range(m + 1)]
    return ks_step(vals, [math.comb(m, k) for k in range(m + 1)])


def prime_recip(x):
    return float(mp.fsum(mp.mpf(1) / p for p in sympy.primerange(2, x + 1)))


def omega_additive(N):
    """omega(n) for n <= N by adding one at every multiple of every prime."""
    om = np.zeros(N + 1, dtype=np.uint8)
    for p in sympy.primerange(2, N + 1):
        om[p::p] += 1
    return om[1:]


def ek_stats(N, om):
    hist = np.bincount(om)
    L = mp.log(mp.log(N))
    vals = [(w - L) / mp.sqrt(L) for w in range(hist.size)]
    keep = [(v, int(c)) for v, c in zip(vals, hist) if c]
    ks = ks_step([v for v, _ in keep], [c for _, c in keep])
    mean = Fraction(int(np.dot(np.arange(hist.size), hist)), N)
    return {"ks": ks, "mean_omega": float(mean), "shift": float(mp.mpf(mean.numerator) / mean.denominator - L),
            "hist": hist.tolist()}


def digit_empirical_ks(m):
    n = np.arange(2, 2 ** m + 1, dtype=np.int64)
    s = np.array([bin(k).count("1") for k in range(2, 2 ** m + 1)]) if m <= 16 else \
        np.bitwise_count(n.astype(np.uint64)).astype(np.int64)
    L = np.log2(n.astype(np.float64))
    return ks_samples((s - L / 2) / np.sqrt(L / 4))


def lindeberg_exact():
    ps = list(sympy.primerange(2, 100))
    p = [Fraction(1, q) for q in ps]
    s2 = sum(v * (1 - v) for v in p)
    cut2 = Fraction(1, 4) * s2  # (eps s)^2 with eps = 1/2, compared exactly
    num = Fraction(0)
    for v in p:
        if (1 - v) ** 2 > cut2:
            num += v * (1 - v) ** 2
        if v * v > cut2:
            num += (1 - v) * v * v
    s = mp.sqrt(mp.mpf(s2.numerator) / s2.denominator)
    return {"L": float(num / s2), "L_exact": str(num / s2), "s": float(s), "primes": len(ps)}


def weyl_golden(N):
    a = (1 + mp.sqrt(5)) / 2
    return float(abs(mp.sin(mp.pi * N * a) / mp.sin(mp.pi * a)) / N)


def weyl_pair(N):
    a = mp.sqrt(2) - mp.sqrt(3)
    return float(abs(mp.sin(mp.pi * N * a) / mp.sin(mp.pi * a)) / N)


def star_golden(N):
    a = (1 + mp.sqrt(5)) / 2
    x = np.array([float(mp.frac(n * a)) for n in range(1, N + 1)])
    x.sort()
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - x), np.max(x - (i - 1) / N)))


def cosine_sum_ks(m, N):
    """Direct float evaluation (no compensated reduction), exact-sample KS."""
    n = np.arange(1, N + 1, dtype=np.float64)
    S = np.zeros(N)
    for p in sympy.primerange(2, 10**4):
        if m == 0:
            break
        S += np.cos(2 * np.pi * ((n * math.sqrt(p)) % 1.0))
        m -= 1
    return ks_samples(S / math.sqrt(8))


def salem_zygmund_bits(m, samples, seed=1):
    """Random x with m + 80 exact binary digits: frac(2^k x) read off the bits."""
    rng = np.random.default_rng(seed)
    B = m + 80
    nbytes = B // 8 + 1
    xs = [int.from_bytes(rng.bytes(nbytes), "little") >> (nbytes * 8 - B) for _ in range(samples)]
    mask = (1 << B) - 1
    S = np.zeros(samples)
    for k in range(1, m + 1):
        u = np.array([((x << k) & mask) >> (B - 53) for x in xs], dtype=np.float64) / 2.0 ** 53
        S += np.cos(2 * np.pi * u)
    S /= math.sqrt(m / 2)
    return {"ks": ks_samples(S), "mean": float(S.mean()), "variance": float(S.var())}


def square_wave_variance(terms, G):
    """Variance of terms^-1/2 sum_k sign sin(2 pi 2^k x) over midpoints of a G-grid."""
    i = np.arange(1, G + 1)
    S = np.zeros(G)
    for k in range(1, terms + 1):
        # sign sin(2 pi 2^k x) for x = (2i-1)/(2G): parity of floor(2^(k+1) x)
        num = (2 * i - 1) << (k + 1)
        fl = num // (2 * G)
        S += np.where(num % (2 * G) == 0, 0, np.where(fl % 2 == 0, 1, -1))
    S /= math.sqrt(terms)
    return float(S.var())


def lattice_prime():
    Q = 3037000453
    order_is_full = sympy.n_order(2, Q) == Q - 1
    return {"Q": Q, "prime": bool(sympy.isprime(Q)), "primitive_root_2": order_is_full,
            "fits_int64": Q * Q < 2 ** 63}


def harmonic_tail(K):
    return float(mp.fsum(mp.mpf(1) / k for k in range(K // 2 + 1, K + 1)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    quick = ap.parse_args().quick
    out = {}
    t0 = time.time()
    out["phi(1)"] = phi_at_one()
    out["binom(20,10)"] = str(Fraction(math.comb(20, 10), 2 ** 20))
    out["binomial_ks"] = {m: binomial_ks(m) for m in (12, 20, 24)}
    out["prime_recip"] = {x: prime_recip(x) for x in (2, 100, 10**6)}
    out["lnln100-1/2"] = float(mp.log(mp.log(100)) - 0.5)
    for N in (10**3, 10**4):
        out[f"erdos_kac_{N}"] = ek_stats(N, omega_additive(N))
    out["digit_ks"] = {m: digit_empirical_ks(m) for m in (12, 20)}
    out["lindeberg"] = lindeberg_exact()
    out["weyl_golden_1e6"] = weyl_golden(10**6)
    out["weyl_sqrt2_sqrt3_1e6"] = weyl_pair(10**6)
    out["lattice"] = lattice_prime()
    out["harmonic_tail_4096"] = harmonic_tail(4096)
    out["square_wave_var_N10"] = square_wave_variance(10, 10**6)
    out["weight_2k_n20"] = float(2 ** 20 / mp.sqrt(mp.fsum(mp.mpf(4) ** k for k in range(1, 21))))
    out["weight_1k_1e4"] = float(1 / mp.sqrt(mp.fsum(mp.mpf(1) / (k * k) for k in range(1, 10**4 + 1))))
    if not quick:
        out["digit_ks"][24] = digit_empirical_ks(24)
        out["erdos_kac_1e7"] = ek_stats(10**7, omega_additive(10**7))
        out["star_golden_1e5"] = star_golden(10**5)
        out["cosine16_ks"] = cosine_sum_ks(16, 10**6)
        out["salem_zygmund_bits"] = salem_zygmund_bits(256, 20000)
    out["seconds"] = round(time.time() - t0, 1)
    print(json.dumps(out, indent=1, default=str))


if __name__ == "__main__":
    main()
