"""Differential escorts of the Cauchy law across the tail transition at alpha = 1/2."""
import argparse

import numpy as np

from gtdlab import densities as dn
from gtdlab import functionals as fn
from gtdlab.transform import differential_escort, tail_prediction


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.4, 0.5, 0.6, 0.75, 0.9])
    args = ap.parse_args(argv)
    f = dn.cauchy()
    print(f"{'alpha':>6} {'tail':>12} {'exponent':>9} {'support':>22} {'shannon':>10}")
    for a in args.alphas:
        kind, expo = tail_prediction(2.0, a)
        d = differential_escort(f, a, method="numeric")
        lo, hi = d.support
        sup = f"[{lo:.4f}, {hi:.4f}]" if np.isfinite(hi) else "R"
        S = fn.shannon(d)
        print(f"{a:6.2f} {kind:>12} {expo:9.3f} {sup:>22} {S.value:10.5f}")


if __name__ == "__main__":
    main()
