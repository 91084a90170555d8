#!/usr/bin/env python3
"""Run the randomized bound-soundness sweep and print one row per bound kind."""

import argparse
import time

from stieltjes2d.bounds import BoundKind
from stieltjes2d.families import soundness_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--tol", type=float, default=1e-7)
    ap.add_argument("--max-cells", type=int, default=256)
    ap.add_argument("--kind", action="append", help="restrict to these kinds (repeatable)")
    args = ap.parse_args()

    kinds = [BoundKind.parse(k) for k in args.kind] if args.kind else list(BoundKind)
    print(f"{'kind':28s} {'violations':>12s} {'worst excess':>13s}  per variant")
    t0 = time.perf_counter()
    for kind in kinds:
        r = soundness_sweep(kind, args.trials, args.seed, args.tol, args.max_cells)
        per = ", ".join(f"{v or '-'}:{bad}/{n}" for v, (n, bad) in r.by_variant.items())
        print(f"{kind.value:28s} {r.violations:5d}/{r.trials:<6d} {r.worst_excess:13.4g}  {per}", flush=True)
        if r.worst is not None:
            w = r.worst
            print(f"{'':28s} worst: f={w.f.surface.descriptor} u={w.u.surface.descriptor} q={w.q} x={w.x} y={w.y}")
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
