"""Signed cumulative moments of the Cauchy law at gamma = 1/2: closed form
(pi/4)^i |E_2i| next to the quadrature value."""
import argparse

import numpy as np

from gtdlab import momentlab as ml


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=8)
    args = ap.parse_args(argv)
    print(f"{'order':>5} {'closed':>24} {'quadrature':>24} {'rel.err':>9}")
    for k in range(1, args.max_order + 1):
        c = ml.cauchy_cumulative_moment(k)
        q = ml.cauchy_cumulative_moment_quadrature(k).value
        err = abs(q - c) / abs(c) if c else abs(q)
        print(f"{k:5d} {c:24.16e} {q:24.16e} {err:9.1e}")
    seq = ml.MomentSequence.cauchy(range(1, args.max_order + 1))
    n = args.max_order // 2
    print("Carleman partial sums:", np.array2string(ml.carleman_diagnostic(seq, n), precision=4))


if __name__ == "__main__":
    main()
