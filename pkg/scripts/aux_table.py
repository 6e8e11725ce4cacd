#!/usr/bin/env python3
"""Print the auxiliary quantities along n by all three routes.

Shows, at one parameter point, the quadruple (or general aux row) from
weighted integrals next to the difference-system iteration, with the
worst pairwise deviation -- a quick cross-representation sanity sweep.

    python scripts/aux_table.py --alpha 0.5 --t 0.3,0.2 --n-max 10
"""

import argparse

from mpmath import mp

from laguerre_lab.ladder import aux_array, iterate_difference_system
from laguerre_lab.multitime import AuxSextuple, aux_rows, iterate_difference_3
from laguerre_lab.orthopoly import recurrence_table
from laguerre_lab.params import PrecisionContext, WeightParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="0.5")
    ap.add_argument("--t", default="0.3,0.2")
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--digits", type=int, default=120)
    args = ap.parse_args()

    params = WeightParams(args.alpha, [v.strip() for v in args.t.split(",")])
    prec = PrecisionContext(digits=args.digits)
    tab = recurrence_table(params, args.n_max + 1, prec)

    with mp.workdps(prec.work_dps):
        if params.m == 2:
            integral = [a.as_tuple() for a in aux_array(tab, args.n_max)]
            iterated = [a.as_tuple() for a in
                        iterate_difference_system(params, args.n_max, prec)]
            names = ("R", "R*", "r", "r*")
        elif params.m == 3:
            integral = [AuxSextuple.from_row(r).as_tuple()
                        for r in aux_rows(tab, args.n_max)]
            iterated = [a.as_tuple() for a in
                        iterate_difference_3(params, args.n_max, prec)]
            names = ("R", "R*", "R^", "r", "r*", "r^")
        else:
            raise SystemExit("iteration route covers m = 2 and m = 3")

        header = f"{'n':>3} " + " ".join(f"{v:>16}" for v in names) + f" {'devmax':>10}"
        print(header)
        worst = mp.mpf(0)
        for n, (row_i, row_d) in enumerate(zip(integral, iterated)):
            dev = max(abs(a - b) for a, b in zip(row_i, row_d))
            worst = max(worst, dev)
            cells = " ".join(f"{mp.nstr(v, 12):>16}" for v in row_i)
            print(f"{n:>3} {cells} {mp.nstr(dev, 3):>10}")
        print(f"worst integral-vs-iteration deviation: {mp.nstr(worst, 5)}")


if __name__ == "__main__":
    main()
