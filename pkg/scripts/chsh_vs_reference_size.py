"""CHSH value reachable with optimal product references as the reference grows.

Prints N, V = cos^2(pi/(N+2)), S = 2 sqrt(1 + V^2) and, for small N, a brute-force
CHSH value on the twirled reference for comparison.
"""

import argparse
import csv
import sys

import numpy as np

from ssrbell.bell import PrincipalState, chsh, chsh_optimal
from ssrbell.reference import optimal_product_reference, separable_ssr_reference

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=40)
    ap.add_argument("--brute-max-n", type=int, default=8)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "v", "s_closed", "s_brute"])
    for n in range(1, args.max_n + 1):
        opt = optimal_product_reference(n, n)
        best = chsh_optimal(opt.v)
        brute = ""
        if n <= args.brute_max_n:
            brute = repr(chsh(PrincipalState(1), separable_ssr_reference(opt.ref), best.settings))
        w.writerow([n, repr(opt.v), repr(best.s_max), brute])
    print(f"# limit: 2 sqrt(2) = {float(2 * np.sqrt(2))!r}", file=sys.stderr)
