#!/usr/bin/env python3
"""Solve the equilibrium measure and dump endpoints plus a density profile.

    python scripts/equilibrium_profile.py --n 10 --alpha 1 --t1 0.3 --t2 0.2 \
        --profile density.csv
"""

import argparse
import csv
import json

from mpmath import mp

from laguerre_lab.equilibrium import (
    density,
    density_normalization,
    solve_support,
    solve_X_equations,
)
from laguerre_lab.params import PrecisionContext, WeightParams
from laguerre_lab.reports import render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--alpha", default="1")
    ap.add_argument("--t1", default="0.3")
    ap.add_argument("--t2", default="0.2")
    ap.add_argument("--digits", type=int, default=80)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--profile", default=None, help="CSV output path")
    args = ap.parse_args()

    params = WeightParams(args.alpha, (args.t1, args.t2))
    prec = PrecisionContext(digits=args.digits)
    sol = solve_support(args.n, params, prec=prec)
    with mp.workdps(prec.work_dps):
        norm_res = abs(density_normalization(sol) - args.n)
        x9, x5 = solve_X_equations(args.n, params, prec)
        doc = {
            "a": render(sol.a), "b": render(sol.b), "A": render(sol.A),
            "X": render(sol.X), "Y": render(sol.Y),
            "normalization_residual": render(norm_res),
            "degree9_root": render(x9), "degree5_root": render(x5),
        }
        print(json.dumps(doc, indent=2))
        if args.profile:
            with open(args.profile, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "sigma"])
                for k in range(1, args.points):
                    x = sol.a + (sol.b - sol.a) * k / mp.mpf(args.points)
                    writer.writerow([render(x), render(density(sol, x))])
            print(f"wrote {args.profile}")


if __name__ == "__main__":
    main()
