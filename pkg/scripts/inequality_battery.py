"""Run every inequality check over a density battery and write a CSV report."""
import argparse
import sys
from dataclasses import dataclass, field

from gtdlab import densities as dn
from gtdlab import inequalities as iq
from gtdlab.io import write_csv


@dataclass
class BatteryConfig:
    tuples: list = field(default_factory=lambda: [(2, 1, 1), (2, 1.5, 2), (3, 1.2, 1.5), (2, 0.8, 0.5)])
    densities: list = field(default_factory=lambda: ["logistic", "normal", "raised-cosine", "sech",
                                                     "stretched-gaussian:3,1.2", "cauchy"])
    minimizers: bool = True


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out", help="CSV path (default stdout)")
    ap.add_argument("--no-minimizers", action="store_true")
    args = ap.parse_args(argv)
    cfg = BatteryConfig(minimizers=not args.no_minimizers)

    dens = [dn.parse_density(s) for s in cfg.densities]
    rows = [r.row() for r in iq.sweep(iq.KINDS, dens, cfg.tuples)]
    if cfg.minimizers:
        for kind in iq.KINDS:
            for t in cfg.tuples:
                rows.append(iq.check(kind, iq.own_minimizer(kind, *t), *t).row())
    bad = [r for r in rows if r[7] < -1e-6 * abs(r[6])]
    cols = ["kind", "p", "beta", "lambda", "density", "lhs", "bound", "slack", "saturated"]
    meta = {"checks": len(rows), "violations": len(bad)}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_csv(fh, cols, rows, meta)
    else:
        write_csv(sys.stdout, cols, rows, meta)
    print(f"{len(rows)} checks, {len(bad)} violations", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
