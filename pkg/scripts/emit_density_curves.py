#!/usr/bin/env python3
"""Emit density-curve families for external plotting.

One CSV per model: a y grid in the first column, then one pdf column per
exponent.  Shows the shape change from monotone decreasing (small
exponents) to unimodal (exponents above 1).
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from expcomposite import ModelId, build

ETAS = (0.5, 0.8, 1.0, 2.0, 5.0)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--hi", type=float, default=4.0, help="grid end (default 4)")
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--outdir", default=".", help="directory for the CSVs")
    args = ap.parse_args(argv)

    ys = np.linspace(0.0, args.hi, args.points)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for model in (ModelId.EXP_IG_PARETO, ModelId.EXP_EXP_PARETO):
        columns = {f"pdf_eta_{eta:g}": build(model, args.theta, eta).pdf(ys)
                   for eta in ETAS}
        path = outdir / f"density_{model.value}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["y", *columns])
            for i, y in enumerate(ys):
                w.writerow([repr(float(y))] + [repr(float(c[i])) for c in columns.values()])
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
