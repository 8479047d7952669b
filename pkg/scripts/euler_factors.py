#!/usr/bin/env python3
"""Print the spin Euler factor of every extracted cusp system at every good prime."""

import argparse

from hilbert_siegel.config import RunConfig
from hilbert_siegel.lfunctions import euler_factor
from hilbert_siegel.pipeline import compute_level, good_primes, parse_level


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("level", nargs="+", help='levels such as "4,2" or "11,3+w"')
    ap.add_argument("--no-cache", action="store_true")
    args = ap.parse_args()
    cfg = RunConfig(use_cache=not args.no_cache)
    for text in args.level:
        spec = parse_level(text)
        res = compute_level(spec.level, cache=cfg.cache())
        for i, s in enumerate(res.cusp_systems, 1):
            for P in good_primes(spec.level):
                E = euler_factor(s, P, 3)
                flag = "" if E.is_palindromic() else "  (functional equation FAILS)"
                print(f"{spec.label} f{i} at {P.key}: " + ", ".join(map(str, E.coeffs)) + flag)


if __name__ == "__main__":
    main()
