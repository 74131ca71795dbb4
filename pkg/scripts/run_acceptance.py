"""Run the eight acceptance checks and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py [--only step fubini ...]
"""
import argparse
import sys

from riesz.suite import CHECKS, run_all


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", nargs="+", choices=[k for k, _ in CHECKS])
    args = ap.parse_args()
    results = run_all(args.only)
    for r in results:
        print(r.line(), flush=True)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
