"""Command-line front end: one subcommand per experiment.

Every run prints a JSON summary (with ``schema: 1``) on stdout. With
``--output PATH`` the data table goes to PATH (csv or json) and the summary
to PATH.summary.json. Exit status: 0 success, 2 invalid input, 3 resource
limit exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import arithmetic, density, distributions, equidistribution, independence, lacunary
from .sequences import kronecker_seq
from .stats import PHI

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 2, 3

SUBCOMMANDS = ("density", "independence", "erdos-kac", "digit-clt", "weyl", "qmc",
               "cosine-clt", "lacunary", "kac-clt", "rademacher")


@dataclass
class ExperimentConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    threads: int = 1
    pilot: bool = False


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]


class UsageError(ValueError):
    pass


# ------------------------------------------------------------ parsing helpers


def parse_real(text: str) -> float | Fraction:
    """'0.5', '3/7', 'golden', 'sqrt2' or 'sqrt(2)'."""
    t = text.strip().lower()
    if t in ("golden", "phi"):
        return equidistribution.GOLDEN
    if t.startswith("sqrt"):
        return math.sqrt(float(t[4:].strip("()")))
    if "/" in t:
        return Fraction(t)
    return float(t)


def _seq(alpha):
    if isinstance(alpha, Fraction):
        return equidistribution.rational_seq(alpha.numerator, alpha.denominator)
    if alpha == equidistribution.GOLDEN:
        return equidistribution.golden_seq()
    return kronecker_seq(float(alpha))


def first_primes(m: int) -> list[int]:
    bound = 16
    while True:
        ps = arithmetic.small_primes(bound)
        if ps.size >= m:
            return [int(p) for p in ps[:m]]
        bound *= 2


def _pick(args, name, full, pilot):
    v = getattr(args, name)
    if v is not None:
        return v
    return pilot if args.pilot else full


def _positive(**kw):
    for k, v in kw.items():
        if v is None or v <= 0:
            raise UsageError(f"{k} must be positive")


# ------------------------------------------------------------ experiments


def _density(a):
    n_max = _pick(a, "n_max", 1 << 22, 1 << 16)
    _positive(n_max=n_max)
    sets = {
        "block-example": lambda: density.BlockExample(),
        "complement-block": lambda: density.Complement(density.BlockExample()),
        "ap": lambda: density.ArithmeticProgression(a.modulus, a.residue or a.modulus),
        "binary-digit": lambda: density.BinaryDigitSet(a.j),
        "squares": lambda: density.Predicate(
            lambda n: np.floor(np.sqrt(n)).astype(np.int64) ** 2 == n, "squares", True),
    }
    spec = sets[a.set]()
    est = density.density_estimate(spec, n_max, a.checkpoints, a.tol, a.threads)
    summary = est.to_dict()
    if spec.symbolic:
        summary["exact"] = str(density.density_exact(spec))
    rows = [("checkpoint", n, d) for n, d in est.checkpoints]
    rows += [("probe", n, d) for n, d in est.probes]
    return Table(["kind", "N", "partial_density"], rows), summary


def _independence(a):
    n_max = _pick(a, "n_max", 10**6, 10**4)
    _positive(n_max=n_max, count=a.count)
    if a.family == "cosines":
        alphas = [math.sqrt(p) for p in first_primes(a.count)]
        maps = [equidistribution.cosine_map()] * len(alphas)
        seqs = equidistribution.map_independent([kronecker_seq(x) for x in alphas], maps)
        grid = independence.uniform_intervals(-1.0, 1.0, a.intervals)
        rep = independence.sequence_independence_defect(
            seqs, [grid] * len(seqs), n_max, a.tuple_cap, a.threads)
    else:
        fams = {
            "primes": lambda: [density.ArithmeticProgression(p, p) for p in first_primes(a.count)],
            "digits": lambda: [density.BinaryDigitSet(j) for j in range(1, a.count + 1)],
            "nested": lambda: [density.ArithmeticProgression(2 ** j, 2 ** j)
                               for j in range(1, a.count + 1)],
        }
        rep = independence.set_family_defect(fams[a.family](), n_max, a.mode, a.threads)
    summary = {"family": a.family, "n_max": n_max, **rep.to_dict()}
    return Table(["field", "value"], [(k, json.dumps(v)) for k, v in rep.to_dict().items()]), summary


def _erdos_kac(a):
    n_max = _pick(a, "n_max", 10**7, 10**5)
    mode = {"lnlnn": "lnln_n", "lnln_n": "lnln_n", "lnlnN": "lnln_N",
            "lnln_N": "lnln_N"}.get(a.mode)
    if mode is None:
        raise UsageError(f"unknown mode {a.mode}")
    saved = os.environ.get("RELDENSITY_MEMORY_BUDGET")
    if a.memory_budget is not None:
        os.environ["RELDENSITY_MEMORY_BUDGET"] = str(a.memory_budget)
    try:
        s = arithmetic.erdos_kac_summary(n_max, mode, threads=a.threads)
    finally:
        if saved is None:
            os.environ.pop("RELDENSITY_MEMORY_BUDGET", None)
        else:
            os.environ["RELDENSITY_MEMORY_BUDGET"] = saved
    rows = [("omega", w, int(c)) for w, c in enumerate(s.histogram) if c]
    return Table(["statistic", "value", "count"], rows), s.to_dict()


def _digit_clt(a):
    m = _pick(a, "m", 24, 12)
    law, emp = arithmetic.digit_clt_cdf(m, a.threads)
    counts = arithmetic.digit_counts(m)
    rows = [(k, int(c), math.comb(m, k)) for k, c in enumerate(counts)]
    summary = {"m": m, "counts_match_binomial": all(c == b for _, c, b in rows),
               "ks_law_to_phi": arithmetic.digit_law(m).ks_to(PHI),
               "ks_to_phi": emp.ks_to(PHI), "mean": emp.mean(), "variance": emp.variance()}
    return Table(["k", "count", "binomial"], rows), summary


def _weyl(a):
    n = _pick(a, "n", 10**6, 10**4)
    _positive(n=n)
    alphas = [parse_real(x) for x in a.alpha]
    h = a.h if a.h else [1] * len(alphas)
    r = equidistribution.weyl_sum([_seq(x) for x in alphas], h, n, threads=a.threads)
    summary = {"alpha": a.alpha, "h": list(r.h), "n_trunc": n, "magnitude": r.magnitude}
    return Table(["N", "magnitude"], r.trace), summary


_PSI: dict[str, tuple[Callable, int, float]] = {
    "product": (lambda u, v: u * v, 2, 0.25),
    "cos": (lambda u: np.cos(2 * np.pi * u), 1, 0.0),
    "square": (lambda u: u * u, 1, 1.0 / 3.0),
    "cubic": (lambda u: u ** 3, 1, 0.25),
    "one": (lambda *u: 1.0, 1, 1.0),
}


def _qmc(a):
    n = _pick(a, "n", 10**6, 10**4)
    _positive(n=n)
    psi, dim, exact = _PSI[a.psi]
    alphas = [parse_real(x) for x in (a.alpha or ["sqrt2", "sqrt3"][:dim])]
    if len(alphas) != dim:
        raise UsageError(f"psi={a.psi} needs {dim} frequencies")
    r = equidistribution.qmc_integrate(psi, [_seq(x) for x in alphas], n, threads=a.threads)
    summary = {"psi": a.psi, "n_trunc": n, "estimate": r.value, "exact": exact,
               "error": abs(r.value - exact)}
    return Table(["N", "estimate"], r.checkpoints), summary


def _cosine_clt(a):
    n = _pick(a, "n", 10**6, 10**4)
    m = _pick(a, "m", 16, 4)
    _positive(n=n, m=m)
    alphas = ([parse_real(x) for x in a.alpha] if a.alpha
              else [math.sqrt(p) for p in first_primes(m)])
    rep = distributions.cosine_sum_report([float(x) for x in alphas], n, a.mode, a.step,
                                          threads=a.threads)
    grid = np.linspace(-4.0, 4.0, 801)
    rows = list(zip(grid.tolist(), np.asarray(rep.cdf(grid)).tolist()))
    return Table(["z", "F(z)"], rows), rep.to_dict()


def _lacunary(a):
    m = _pick(a, "m", 256, 32)
    G = _pick(a, "grid", 10**5, 10**4)
    seq = lacunary.powers(a.base)
    cdf = lacunary.salem_zygmund_cdf(seq, m, G, threads=a.threads)
    hc = lacunary.hadamard_check(seq, max(m, 2))
    summary = {"m_terms": m, "grid": G, "base": a.base, "min_ratio": hc.min_ratio,
               "ks_to_phi": cdf.ks_to(PHI), "mean": cdf.mean(), "variance": cdf.variance()}
    return Table(["x_statistic", "count"], cdf.rows()), summary


_KAC_F = {
    "cos": lambda t: np.cos(2 * np.pi * t),
    "cos+cos2": lambda t: np.cos(2 * np.pi * t) + np.cos(4 * np.pi * t),
    "cos-cos2": lambda t: np.cos(2 * np.pi * t) - np.cos(4 * np.pi * t),
    "square": lambda t: lacunary.rademacher(1, np.asarray(t, dtype=np.float64)).astype(float),
}


def _kac_clt(a):
    n_terms = _pick(a, "n_terms", 256, 32)
    G = _pick(a, "grid", 10**5, 10**4)
    f = lacunary.PeriodicFunction.from_callable(_KAC_F[a.f], label=a.f)
    terms = lacunary.kac_sigma2_terms(f, a.k_max)
    s2 = lacunary.kac_sigma2(f, a.k_max)
    cdf = lacunary.kac_clt_cdf(f, n_terms, G, a.k_max, a.threads)
    summary = {"f": a.f, "n_terms": n_terms, "grid": G, "sigma2": s2,
               "last_term": terms[-1], "ks_to_phi": cdf.ks_to(PHI),
               "mean": cdf.mean(), "variance": cdf.variance()}
    return Table(["x_statistic", "count"], cdf.rows()), summary


_WEIGHTS = {
    "inverse": lambda k: 1.0 / k,
    "inverse-sqrt": lambda k: 1.0 / np.sqrt(k),
    "one": lambda k: np.ones(np.shape(k)),
    "zero": lambda k: np.zeros(np.shape(k)),
}


def _rademacher(a):
    k_max = _pick(a, "k_max", 1 << 12, 1 << 8)
    samples = _pick(a, "samples", 1000, 100)
    w = lacunary.WeightSequence(_WEIGHTS[a.weights], a.weights)
    ts = lacunary.dyadic_samples(samples, bits=k_max + 64)
    probe = lacunary.rademacher_series_probe(w, ts, k_max)
    trend = []
    if a.weights != "zero":
        for n in (10, 100, 1000, k_max):
            trend.append([n, lacunary.weight_condition_check(w, n)])
    rows = [(i, *map(float, s)) for i, s in enumerate(probe.partial_sums)]
    cols = ["sample"] + [f"S_{c}" for c in probe.checkpoints]
    return Table(cols, rows), {"weights": a.weights, **probe.to_dict(), "ratio_trend": trend}


HANDLERS = {
    "density": _density, "independence": _independence, "erdos-kac": _erdos_kac,
    "digit-clt": _digit_clt, "weyl": _weyl, "qmc": _qmc, "cosine-clt": _cosine_clt,
    "lacunary": _lacunary, "kac-clt": _kac_clt, "rademacher": _rademacher,
}

# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="data file format")
    common.add_argument("--output", help="data file path; the summary goes to PATH.summary.json")
    common.add_argument("--pilot", action="store_true", help="reduced problem sizes for quick runs")

    p = argparse.ArgumentParser(prog="reldensity", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    def add(name, help_text, columns):
        return sub.add_parser(name, parents=[common], help=help_text,
                              description=f"{help_text}\n\ndata columns: {columns}",
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    s = add("density", "partial densities of an integer set", "kind,N,partial_density")
    s.add_argument("--set", default="block-example",
                   choices=("block-example", "complement-block", "ap", "binary-digit", "squares"))
    s.add_argument("--modulus", type=int, default=3)
    s.add_argument("--residue", type=int)
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--n-max", type=int)
    s.add_argument("--checkpoints", type=int, default=24)
    s.add_argument("--tol", type=float, default=1e-3)

    s = add("independence", "product-rule defect of a set or sequence family", "field,value")
    s.add_argument("--family", default="primes", choices=("primes", "digits", "nested", "cosines"))
    s.add_argument("--count", type=int, default=6)
    s.add_argument("--mode", default="exact", choices=("exact", "empirical"))
    s.add_argument("--n-max", type=int)
    s.add_argument("--intervals", type=int, default=4)
    s.add_argument("--tuple-cap", type=int, default=2)

    s = add("erdos-kac", "distribution of the number of distinct prime factors",
            "statistic,value,count")
    s.add_argument("--n-max", type=int)
    s.add_argument("--mode", default="lnlnN", help="lnlnN or lnlnn")
    s.add_argument("--memory-budget", type=int, help="bytes; overrides RELDENSITY_MEMORY_BUDGET")

    s = add("digit-clt", "binary sum-of-digits law and its normal limit", "k,count,binomial")
    s.add_argument("--m", type=int)

    s = add("weyl", "Weyl sum of Kronecker sequences", "N,magnitude")
    s.add_argument("--alpha", nargs="+", default=["golden"], help="0.5, 3/7, golden, sqrt2 ...")
    s.add_argument("--h", type=int, nargs="+")
    s.add_argument("--n", type=int)

    s = add("qmc", "equidistribution quadrature", "N,estimate")
    s.add_argument("--psi", default="product", choices=sorted(_PSI))
    s.add_argument("--alpha", nargs="+")
    s.add_argument("--n", type=int)

    s = add("cosine-clt", "normalized sums of cosines with independent frequencies", "z,F(z)")
    s.add_argument("--m", type=int, help="use sqrt of the first m primes")
    s.add_argument("--alpha", nargs="+", help="explicit frequencies (overrides --m)")
    s.add_argument("--n", type=int)
    s.add_argument("--mode", default="discrete_n", choices=("discrete_n", "continuous_t"))
    s.add_argument("--step", type=float, default=distributions.DEFAULT_STEP)

    s = add("lacunary", "lacunary cosine sums with n_k = base^k", "x_statistic,count")
    s.add_argument("--base", type=int, default=2)
    s.add_argument("--m", type=int)
    s.add_argument("--grid", type=int)

    s = add("kac-clt", "sums of f(2^k x) and the Kac variance", "x_statistic,count")
    s.add_argument("--f", default="cos", choices=sorted(_KAC_F))
    s.add_argument("--n-terms", type=int)
    s.add_argument("--grid", type=int)
    s.add_argument("--k-max", type=int, default=10)

    s = add("rademacher", "partial sums of weighted Rademacher series",
            "sample,S_{K/4},S_{K/2},S_K")
    s.add_argument("--weights", default="inverse", choices=sorted(_WEIGHTS))
    s.add_argument("--k-max", type=int)
    s.add_argument("--samples", type=int)
    return p


# ------------------------------------------------------------ output


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def dump_summary(summary: dict) -> str:
    return json.dumps(_plain(summary), sort_keys=True, indent=2) + "\n"


def render_table(table: Table, fmt: str) -> str:
    rows = [_plain(list(r)) for r in table.rows]
    if fmt == "json":
        return json.dumps({"columns": table.columns, "rows": rows}) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows(rows)
    return buf.getvalue()


def run(config: ExperimentConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if config.subcommand not in HANDLERS:
        print(f"unknown subcommand {config.subcommand!r}", file=sys.stderr)
        return EXIT_INVALID
    ns = argparse.Namespace(**config.params, threads=config.threads, pilot=config.pilot)
    if config.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        table, summary = HANDLERS[config.subcommand](ns)
    except arithmetic.MemoryBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError as e:
        print(f"error: out of memory: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OverflowError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    summary = {"schema": SCHEMA, "subcommand": config.subcommand,
               "pilot": config.pilot, **summary}
    text = dump_summary(summary)
    if config.output_path:
        with open(config.output_path, "w", newline="") as fh:
            fh.write(render_table(table, config.format))
        with open(config.output_path + ".summary.json", "w") as fh:
            fh.write(text)
    stdout.write(text)
    return EXIT_OK


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    params = {k: v for k, v in vars(args).items()
              if k not in ("subcommand", "output", "format", "threads", "pilot")}
    return ExperimentConfig(args.subcommand, params, args.output, args.format,
                            args.threads, args.pilot)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse: usage errors exit 2, --help exits 0
        return EXIT_INVALID if e.code else EXIT_OK
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
