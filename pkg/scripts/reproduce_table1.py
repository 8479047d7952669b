#!/usr/bin/env python3
"""Recompute every level of the weight-3 eigenform table and compare.

Exit status 0 when every level matches, 3 otherwise.
"""

import argparse
import sys
import time
from pathlib import Path

from hilbert_siegel.config import RunConfig
from hilbert_siegel.pipeline import reproduce_table1


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", type=Path)
    ap.add_argument("--no-cache", action="store_true")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--level", action="append", help='restrict to labels such as "(11,3+w)"')
    args = ap.parse_args()
    cfg = RunConfig(cache_dir=args.cache_dir, use_cache=not args.no_cache, threads=args.threads)

    t0 = time.perf_counter()
    comps = reproduce_table1(cfg.cache(), cfg.threads, levels=args.level)
    print(f"{'level':10s} {'dim M/S':>8s} {'forms':>6s} {'lifts':>6s} {'extr':>5s}  residual")
    for c in comps:
        found = sum(v is not None for v in c.matched.values())
        lifts = sum(c.lift_ok.values())
        print(f"{c.label:10s} {c.dims[0]:>4d}/{c.dims[1]:<3d} {found:>3d}/{len(c.matched):<2d} "
              f"{lifts:>3d}/{len(c.lift_ok):<2d} {c.extracted:>5d}  "
              f"{[r.dimension for r in c.residual]}{'' if c.ok else '  MISMATCH'}")
    print(f"{len(comps)} levels in {time.perf_counter() - t0:.1f}s")
    return 0 if all(c.ok for c in comps) else 3


if __name__ == "__main__":
    sys.exit(main())
