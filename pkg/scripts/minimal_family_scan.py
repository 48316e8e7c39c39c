"""Scan the minimal reference family: V, separability and the SIV lower bound.

One row per (p_phi, theta) grid point with p00 = p11 = (1 - p_phi)/2.
"""

import argparse
import csv
import sys

import numpy as np

from ssrbell.reference import MinimalReference, is_separable_minimal
from ssrbell.siv import vf_bound_minimal

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=21)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p_phi", "theta", "v", "separable", "vf_lower_bound"])
    best = 0.0
    for p_phi in np.linspace(0, 1, args.steps):
        for theta in np.linspace(0, np.pi / 2, args.steps):
            rest = 1.0 - p_phi
            m = MinimalReference(rest / 2, rest / 2, 1.0 - rest, float(np.cos(theta)), float(np.sin(theta)))
            sep = is_separable_minimal(m)
            if sep:
                best = max(best, m.v)
            w.writerow([f"{p_phi:.4f}", f"{theta:.4f}", repr(m.v), int(sep), repr(vf_bound_minimal(m))])
    print(f"# largest separable V on the grid: {float(best)!r}", file=sys.stderr)
