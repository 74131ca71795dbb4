"""Integral ladders of the Beppo Levi catalog at a few horizons.

Prints, for each catalog sequence, the integral of f_n and the gap to the
declared limit at n = 10, 100, 1000, ... up to --horizon.
"""
import argparse

from riesz.cli import table
from riesz.numeric import ext
from riesz.signed import generalized_beppo_levi
from riesz.suite import beppo_levi_catalog


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizon", type=int, default=1000)
    args = ap.parse_args()
    marks = [10**j for j in range(1, 8) if 10**j <= args.horizon]
    for name, fs, limit in beppo_levi_catalog():
        _, rep = generalized_beppo_levi(fs, args.horizon, declared=limit)
        rows = [(n, rep.ladder[n - rep.start], ext(limit) - rep.ladder[n - rep.start]) for n in marks]
        print(f"{name}  (declared limit {limit})")
        print(table(["n", "integral f_n", "gap"], rows))
        print()


if __name__ == "__main__":
    main()
