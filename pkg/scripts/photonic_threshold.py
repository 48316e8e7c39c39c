"""Photonic model: S_max versus mean photon number, threshold, and the Hessmo condition."""

import argparse
import csv
import sys

import numpy as np

from ssrbell.photonic import PhotonicSetup, photonic_chsh_max, threshold_nbar

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--max-nbar", type=float, default=2.0)
    args = ap.parse_args()
    th = threshold_nbar()
    print(f"# threshold n_bar = {th.n_bar!r} (sqrt(2) - 1 = {float(np.sqrt(2) - 1)!r}), P_vac = {th.p_vac!r}",
          file=sys.stderr)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n_bar", "s_balanced", "s_hessmo"])
    for n in np.arange(0.0, args.max_nbar + args.step / 2, args.step):
        bal = photonic_chsh_max(PhotonicSetup.balanced(n)).s_max
        hes = photonic_chsh_max(PhotonicSetup.hessmo(n), cross_check=False).s_max
        w.writerow([f"{n:.4f}", repr(bal), repr(hes)])
