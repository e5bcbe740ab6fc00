"""Run every experiment at full size and collect the headline numbers.

Each run goes through the CLI, so the data files and summaries written to
--out are exactly what `reldensity <subcommand> --output ...` produces.

    python3 scripts/run_experiments.py                 # full sizes, results/
    python3 scripts/run_experiments.py --pilot         # a few seconds
    python3 scripts/run_experiments.py --threads 8 --out /tmp/runs
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import time
from pathlib import Path

from reldensity import cli

RUNS = {
    "density-block": ["density", "--set", "block-example"],
    "density-ap": ["density", "--set", "ap", "--modulus", "3"],
    "density-squares": ["density", "--set", "squares"],
    "independence-primes": ["independence", "--family", "primes"],
    "independence-digits": ["independence", "--family", "digits", "--count", "12"],
    "independence-nested": ["independence", "--family", "nested", "--count", "3"],
    "independence-cosines": ["independence", "--family", "cosines", "--count", "3"],
    "erdos-kac-lnlnN": ["erdos-kac", "--mode", "lnlnN"],
    "erdos-kac-lnlnn": ["erdos-kac", "--mode", "lnlnn"],
    "digit-clt": ["digit-clt"],
    "weyl-golden": ["weyl", "--alpha", "golden"],
    "weyl-pair": ["weyl", "--alpha", "sqrt2", "sqrt3", "--h", "1", "-1"],
    "qmc-product": ["qmc", "--psi", "product"],
    "cosine-clt": ["cosine-clt"],
    "cosine-clt-dependent": ["cosine-clt", "--alpha", "sqrt2", "sqrt2"],
    "lacunary": ["lacunary"],
    "kac-cos": ["kac-clt", "--f", "cos"],
    "kac-square": ["kac-clt", "--f", "square"],
    "rademacher-inverse": ["rademacher", "--weights", "inverse"],
    "rademacher-inverse-sqrt": ["rademacher", "--weights", "inverse-sqrt"],
}

HEADLINE = ("verdict", "value", "max_defect", "ks_to_phi", "shift", "magnitude", "error",
            "ks_to_prediction", "sigma2", "tail_sum", "divergence_flag")


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--pilot", action="store_true")
    ap.add_argument("--only", nargs="*", choices=sorted(RUNS))
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = {}
    for name in args.only or RUNS:
        argv = RUNS[name] + ["--threads", str(args.threads), "--output", str(out / f"{name}.csv")]
        if args.pilot:
            argv.append("--pilot")
        t0 = time.perf_counter()
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli.main(argv)
        dt = time.perf_counter() - t0
        if code != 0:
            print(f"{name:26s} exit {code}")
            index[name] = {"exit": code}
            continue
        s = json.loads(buf.getvalue())
        head = {k: s[k] for k in HEADLINE if k in s}
        index[name] = {"exit": 0, "seconds": round(dt, 2), **head}
        shown = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in head.items())
        print(f"{name:26s} {dt:6.2f}s  {shown}")
    (out / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
