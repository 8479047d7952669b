"""Command-line driver.

Exit codes: 0 success, 2 usage error, 3 mismatch against the tabulated values.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .base_ring import factor_rational_prime, is_prime, prime_ideal
from .config import RunConfig
from .flags import enumerate_flags, flag_count, gamma_orbits, level_label
from .hecke import UnsupportedOperation
from .lfunctions import FixtureError, detect_lifts, euler_factor, load_fixture
from .pipeline import (
    HECKE_PRIMES,
    SUPPORTED_DISC,
    compute_brandt,
    compute_level,
    good_primes,
    parse_level,
    reproduce_table1,
)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 2, 3


class UsageError(Exception):
    pass


def _emit(cfg: RunConfig, payload: dict, lines: list[str]) -> None:
    if cfg.as_json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))


def _level(args):
    if not args.level:
        raise UsageError("--level is required")
    try:
        return parse_level(args.level)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _primes(args) -> list:
    names = args.prime or list(HECKE_PRIMES)
    try:
        return [prime_ideal(p) for p in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_primes(args, cfg):
    bound = args.bound
    rows = []
    for p in range(2, bound + 1):
        if not is_prime(p):
            continue
        for P in factor_rational_prime(p):
            if P.norm <= bound:
                rows.append(P)
    rows.sort(key=lambda P: (P.norm, P.generator.a, P.generator.b))
    payload = {"primes": [{"norm": P.norm, "generator": [P.generator.a, P.generator.b],
                           "key": P.key, "inertia": P.inertia} for P in rows]}
    _emit(cfg, payload, [f"{P.norm:4d}  {P.key:10s}  {P.inertia}" for P in rows])
    return EXIT_OK


def cmd_flags(args, cfg):
    spec = _level(args)
    out, lines = [], []
    for P, e in spec.level:
        F = enumerate_flags(P, e)
        out.append({"prime": P.key, "e": e, "size": len(F), "formula": flag_count(P.norm, e)})
        lines.append(f"{P.label}^{e}: {len(F)} Lagrangian planes (formula {flag_count(P.norm, e)})")
    _emit(cfg, {"level": spec.label, "factors": out}, lines)
    return EXIT_OK


def cmd_dims(args, cfg):
    spec = _level(args)
    O = gamma_orbits(spec.level)
    payload = {"level": spec.label, "dim_M": O.h, "dim_S": O.h - 1,
               "orbit_sizes": O.orbit_sizes.tolist(), "stabilizers": O.stabilizer_orders.tolist()}
    _emit(cfg, payload, [f"{spec.label}: dim M = {O.h}, dim S = {O.h - 1}"])
    return EXIT_OK


def cmd_brandt(args, cfg):
    spec = _level(args)
    P = _primes(args)[0]
    B = compute_brandt(spec.level, P, args.kind, cfg.cache())
    payload = {"level": spec.label, "prime": P.key, "kind": args.kind, "entries": B.entries.tolist()}
    lines = [f"T_{args.kind}({P.key}) at level {spec.label}:"] + [" ".join(f"{x:5d}" for x in r) for r in B.entries]
    _emit(cfg, payload, lines)
    return EXIT_OK


def _systems(args, cfg):
    spec = _level(args)
    primes = _primes(args)
    bad = {P.key for P, _ in spec.level}
    for P in primes:
        if P.key in bad:
            raise UnsupportedOperation(f"Hecke operator at {P.label} divides the level")
    res = compute_level(spec.level, primes, cfg.cache(), cfg.threads)
    return spec, res


def cmd_eigen(args, cfg):
    spec, res = _systems(args, cfg)
    payload = {"level": spec.label, "h": res.h,
               "systems": [s.to_json() for s in res.systems],
               "residual": [r.to_json() for r in res.residual]}
    lines = [f"level {spec.label}: h = {res.h}"]
    names = list(res.brandt)
    lines.append("      " + "  ".join(f"T{k}({p})" for p, k in names))
    for i, s in enumerate(res.systems):
        tag = "eis" if s.is_eisenstein else f"f{i}"
        lines.append(f"{tag:5s} " + "  ".join(str(s.eigenvalues[n]) for n in names))
    for r in res.residual:
        lines.append(f"residual block of dimension {r.dimension} ({r.note})")
    _emit(cfg, payload, lines)
    return EXIT_OK


def _form(res, name: str):
    cusp = res.cusp_systems
    try:
        i = int(name.lstrip("f")) - 1
        return cusp[i]
    except (ValueError, IndexError):
        raise UsageError(f"unknown form {name!r}; level has {len(cusp)} extracted cusp systems") from None


def cmd_euler(args, cfg):
    spec = _level(args)
    if not args.prime:
        raise UsageError("--prime is required")
    P = _primes(args)[0]
    if any(Q.key == P.key for Q, _ in spec.level):
        raise UnsupportedOperation(f"Hecke operator at {P.label} divides the level")
    res = compute_level(spec.level, good_primes(spec.level), cfg.cache(), cfg.threads)
    sys_ = _form(res, args.form)
    E = euler_factor(sys_, P, 3)
    _emit(cfg, {"level": spec.label, "form": args.form, **E.to_json()},
          [f"Q_{P.key}(x) coefficients: " + ", ".join(str(c) for c in E.coeffs)])
    return EXIT_OK


def cmd_lift_check(args, cfg):
    spec = _level(args)
    res = compute_level(spec.level, good_primes(spec.level), cfg.cache(), cfg.threads)
    fixture = load_fixture(cfg.fixture)
    report = detect_lifts(res.cusp_systems, fixture, [P for P, _ in spec.level])
    lines = [f"f{i + 1}: {v.describe()}" for i, (_, v) in enumerate(report.entries)] + [report.note]
    _emit(cfg, {"level": spec.label, **report.to_json()}, lines)
    return EXIT_OK


def cmd_table1(args, cfg):
    comps = reproduce_table1(cfg.cache(), cfg.threads)
    payload = {"levels": []}
    lines = []
    for c in comps:
        payload["levels"].append({
            "level": c.label, "dims": list(c.dims), "expected_dims": list(c.expected_dims),
            "matched": c.matched, "lift_ok": c.lift_ok, "extracted_dimension": c.extracted,
            "residual": [r.dimension for r in c.residual], "ok": c.ok,
        })
        status = "ok" if c.ok else "MISMATCH"
        lines.append(f"{c.label:10s} dim M/S {c.dims[0]}/{c.dims[1]}  forms {sum(v is not None for v in c.matched.values())}"
                     f"/{len(c.matched)}  lifts {sum(c.lift_ok.values())}/{len(c.lift_ok)}"
                     f"  extracted {c.extracted}  residual {[r.dimension for r in c.residual]}  {status}")
    _emit(cfg, payload, lines)
    return EXIT_OK if all(c.ok for c in comps) else EXIT_MISMATCH


def cmd_cache_clear(args, cfg):
    cache = cfg.cache()
    n = cache.clear() if cache else 0
    _emit(cfg, {"removed": n}, [f"removed {n} cache entries"])
    return EXIT_OK


COMMANDS = {
    "primes": cmd_primes,
    "flags": cmd_flags,
    "dims": cmd_dims,
    "brandt": cmd_brandt,
    "eigen": cmd_eigen,
    "euler": cmd_euler,
    "lift-check": cmd_lift_check,
    "table1": cmd_table1,
    "cache-clear": cmd_cache_clear,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--cache-dir", type=Path, default=None)
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--fixture", type=Path, default=None, help="Hilbert eigenvalue fixture (JSON)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--disc", type=int, default=SUPPORTED_DISC,
                        help="discriminant of the base field (only 5 is supported)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hilbert-siegel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("flags", "dims", "brandt", "eigen", "euler", "lift-check"):
            sp.add_argument("--level", help='level as "norm,a+b*w", e.g. "11,3+w"')
        if name in ("brandt", "eigen", "euler"):
            sp.add_argument("--prime", action="append", help='prime as "a+b*w" (repeatable)')
        if name == "brandt":
            sp.add_argument("--kind", type=int, choices=(1, 2), default=1)
        if name == "euler":
            sp.add_argument("--form", default="f1")
        if name == "primes":
            sp.add_argument("--bound", type=int, default=50)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.disc != SUPPORTED_DISC:
        print(f"error: only Q(sqrt 5) is supported (got --disc {args.disc})", file=sys.stderr)
        return EXIT_USAGE
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(args.cache_dir, not args.no_cache, args.threads, args.fixture, args.disc, args.json)
    try:
        return COMMANDS[args.command](args, cfg)
    except (UsageError, UnsupportedOperation, FixtureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
