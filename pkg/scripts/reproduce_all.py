"""Run every numerical claim and write the records as JSON.

    python3 scripts/reproduce_all.py --seed 0 --out results/claims.json
"""

import argparse
import sys

from ssrbell.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    argv = ["reproduce-all", "--seed", str(args.seed)]
    if args.out:
        argv += ["--out", args.out]
    sys.exit(main(argv))
