#!/usr/bin/env python3
"""Print dyadic refinement tables for composite rules on registry surfaces."""

import argparse

from stieltjes2d import registry
from stieltjes2d.core import Rect
from stieltjes2d.cubature import refinement_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rule", default="riemann", choices=["riemann", "rs-composite"])
    ap.add_argument("--f", nargs="+", default=["prod_ts", "t2s2", "exp_sum", "sin_prod", "sq_sum"])
    ap.add_argument("--g", default="t2s2", help="integrator for rs-composite")
    ap.add_argument("--rect", nargs=4, type=float, default=[0.0, 1.0, 0.0, 1.0])
    ap.add_argument("--levels", type=int, default=6)
    ap.add_argument("--tags", default="lower", choices=["lower", "mid", "upper"])
    args = ap.parse_args()

    q = Rect(*args.rect)
    g = registry.get(args.g) if args.rule == "rs-composite" else None
    for name in args.f:
        print(f"# {name} ({registry.describe(name)}), rule {args.rule}, tags {args.tags}")
        print(f"{'level':>5s} {'cells':>7s} {'estimate':>22s} {'error':>11s} {'bound':>11s}")
        for r in refinement_table(args.rule, registry.get(name), q, args.levels, g=g, tags=args.tags):
            bound = "" if r.bound is None else f"{r.bound:11.4e}"
            print(f"{r.level:5d} {r.cells:7d} {r.estimate:22.15g} {r.error:11.4e} {bound}")
        print()


if __name__ == "__main__":
    main()
