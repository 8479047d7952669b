"""Acceptance suite: one PASS/FAIL line per criterion, printed at the end of the run.

Every comparison is exact (integers and exact quadratic irrationalities); the
only tolerances are the wall-clock budgets pinned below.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from hilbert_siegel import flags as flags_mod
from hilbert_siegel.base_ring import prime_ideal
from hilbert_siegel.flags import GAMMA_ORDER, enumerate_flags, enumerate_flags_direct, flag_count, gamma_orbits
from hilbert_siegel.hecke import expected_row_sum
from hilbert_siegel.lattice import TraceFormLattice, box_vectors, short_vectors
from hilbert_siegel.lfunctions import euler_factor, load_fixture
from hilbert_siegel.local_splitting import split_order, verify_splitting
from hilbert_siegel.pipeline import compare_level, load_table1
from hilbert_siegel.quaternion_order import build_maximal_order, gamma_group, reduced_discriminant, unit_group

from conftest import ACCEPTANCE_LINES, TABLE1_LEVELS

FLAG_SECONDS = 1.0  # per prime, criterion 1
TABLE_SECONDS = 600.0  # all nine levels, criterion 2
STRUCTURE_SECONDS = 300.0  # criterion 7

TABLE1_DIMS = {"2": (2, 1), "2+w": (2, 1), "3": (3, 2), "3+w": (3, 2), "4+w": (5, 4), "5+w": (9, 8),
               "5+2*w": (12, 11), "6+w": (19, 18), "7": (26, 25)}
# extracted dimensions as stated in criterion 4; the sixth entry disagrees with table1.json itself
CRITERION4_EXTRACTED = (1, 1, 2, 2, 4, 4, 1, 8, 3)


def report(n, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _expected(gen):
    P = prime_ideal(gen)
    return next(e for e in load_table1() if e.level[0][0].key == P.key)


def test_criterion_1_flag_counts():
    bad, slowest = [], 0.0
    for gen in TABLE1_LEVELS:
        P = prime_ideal(gen)
        flags_mod._flag_cache.pop((P.key, 1), None)
        t = time.perf_counter()
        n = len(enumerate_flags(P, 1))
        dt = time.perf_counter() - t
        slowest = max(slowest, dt)
        if n != flag_count(P.norm, 1) or dt >= FLAG_SECONDS:
            bad.append((gen, n, round(dt, 3)))
    F = enumerate_flags("2+w", 2)
    oracle_ok = np.array_equal(F.points, enumerate_flags_direct("2+w", 2)) and len(F) == flag_count(5, 2) == 19500
    ok = not bad and oracle_ok
    report(1, ok, f"flag counts exact at 9 primes (slowest {slowest:.2f}s < {FLAG_SECONDS}s); "
                  f"(sqrt5)^2 = 19500 vs submodule oracle {'ok' if oracle_ok else 'MISMATCH'}"
                  + (f"; failures {bad}" if bad else ""))
    assert ok


@pytest.fixture(scope="module")
def table1_run():
    """Fresh-process, uncached reproduction through the command line, timed."""
    t = time.perf_counter()
    out = subprocess.run([sys.executable, "-m", "hilbert_siegel", "table1", "--json", "--no-cache"],
                         capture_output=True, text=True)
    return out.returncode, json.loads(out.stdout), time.perf_counter() - t


def test_criterion_2_dimensions(table1_run, levels):
    code, payload, seconds = table1_run
    got = {}
    for gen in TABLE1_LEVELS:
        res = levels(gen)
        got[gen] = (res.h, res.h - 1)
    cli_dims = [tuple(lv["dims"]) for lv in payload["levels"]]
    ok = got == TABLE1_DIMS and cli_dims == [TABLE1_DIMS[g] for g in TABLE1_LEVELS] and seconds < TABLE_SECONDS
    report(2, ok, f"dim M/S exact at all nine levels; uncached table1 run {seconds:.0f}s < {TABLE_SECONDS:.0f}s")
    assert ok


def test_criterion_3_eigensystems(levels):
    fixture = load_fixture()
    missing, extra, discs = [], [], set()
    for gen in TABLE1_LEVELS:
        exp = _expected(gen)
        cmp = compare_level(exp, levels(gen), fixture)
        missing += [(exp.label, f) for f, i in cmp.matched.items() if i is None]
        extra += [exp.label] * len(cmp.unmatched_systems)
        discs |= {s.field_disc for s in levels(gen).cusp_systems if s.field_disc != 1}
    ok = not missing and not extra and discs == {41, 161, 21, 5, 65}
    report(3, ok, f"every tabulated system found and no untabulated extracted system; quadratic fields "
                  f"D = {sorted(discs)}" + (f"; missing {missing}, extra {extra}" if not ok else ""))
    assert ok


def _extracted(levels):
    return tuple(levels(g).extracted_dimension() for g in TABLE1_LEVELS)


def test_criterion_4_bookkeeping_as_tabulated(levels):
    # the listing policy applied to the rows of table1.json: extracted = sum of tabulated degrees
    table = tuple(sum(2 if f.disc != 1 else 1 for f in _expected(g).forms) for g in TABLE1_LEVELS)
    sums_ok = all(levels(g).extracted_dimension() + sum(r.dimension for r in levels(g).residual)
                  == TABLE1_DIMS[g][1] for g in TABLE1_LEVELS)
    ok = _extracted(levels) == table and sums_ok
    report("4a", ok, f"extracted {_extracted(levels)} equals the degrees listed in table1.json; "
                     f"extracted + residual = dim S at every level")
    assert ok


@pytest.mark.xfail(strict=True, reason="criterion 4 lists 4 at level (29,5+w); table1.json lists three rational "
                                       "forms there and the computation extracts 3 (see decisions ledger)")
def test_criterion_4_bookkeeping_as_stated(levels):
    got = _extracted(levels)
    ok = got == CRITERION4_EXTRACTED
    diff = [(g, a, b) for g, a, b in zip(TABLE1_LEVELS, got, CRITERION4_EXTRACTED) if a != b]
    report(4, ok, f"extracted {got} vs stated {CRITERION4_EXTRACTED}" + (f"; differs at {diff}" if diff else ""))
    assert ok


def test_criterion_5_lifts(levels):
    fixture = load_fixture()
    wrong, rows = [], 0
    for gen in TABLE1_LEVELS:
        exp = _expected(gen)
        cmp = compare_level(exp, levels(gen), fixture)
        rows += len(exp.forms)
        wrong += [(exp.label, f) for f, good in cmp.lift_ok.items() if not good]
    ok = not wrong
    report(5, ok, f"Lift? column reproduced for {rows - len(wrong)}/{rows} listed forms")
    assert ok


def test_criterion_6_euler_factors(levels):
    n, bad = 0, []
    for gen in TABLE1_LEVELS:
        res = levels(gen)
        for s in res.cusp_systems:
            for key, _ in {k for k in s.eigenvalues if k[1] == 1}:
                E = euler_factor(s, key, 3)
                n += 1
                if not E.is_palindromic():
                    bad.append((gen, key))
    f1 = levels("2").cusp_systems[0]
    spot = [[int(c.a) for c in euler_factor(f1, p, 3).coeffs] for p in ("2+w", "3")]
    spot_ok = spot == [[1, -20, 411, -2500, 15625], [1, -140, 18939, -102060, 531441]]
    ok = not bad and spot_ok
    report(6, ok, f"{n} Euler factors palindromic; (4,2) f1 spot values {'exact' if spot_ok else spot}")
    assert ok


def test_criterion_7_structure(levels):
    t = time.perf_counter()
    checks = {}
    checks["units=120"] = len(unit_group()) == 120
    checks["Gamma=14400"] = len(gamma_group()) == GAMMA_ORDER == 14400
    order = build_maximal_order()
    checks["disc=(1)"] = reduced_discriminant(order.basis).is_unit()
    split_ok = True
    for gen in set(TABLE1_LEVELS):
        for e in (1, 2) if gen in ("2", "2+w", "3") else (1,):
            try:
                verify_splitting(split_order(gen, e), order)
            except AssertionError:
                split_ok = False
    checks["splittings"] = split_ok
    brandt_ok = True
    for gen in TABLE1_LEVELS:
        res = levels(gen)
        mats = list(res.brandt.values())
        for B in mats:
            brandt_ok &= bool(np.all(B.row_sums() == expected_row_sum(B.prime, B.kind)))
        for A in mats:
            for B in mats:
                brandt_ok &= np.array_equal(A.entries @ B.entries, B.entries @ A.entries)
    checks["brandt"] = brandt_ok
    orb_ok = True
    for gen in TABLE1_LEVELS:
        O = gamma_orbits(levels(gen).level)
        orb_ok &= bool(np.all(O.orbit_sizes * O.stabilizer_orders == GAMMA_ORDER))
        orb_ok &= int(O.orbit_sizes.sum()) == len(O.orbit_id)
    checks["orbit-stabilizer"] = orb_ok
    L8 = TraceFormLattice.of_order(False)
    checks["short vectors"] = all(np.array_equal(short_vectors(L8, s), box_vectors(L8.gram, s)) for s in range(1, 5))
    seconds = time.perf_counter() - t
    ok = all(checks.values()) and seconds < STRUCTURE_SECONDS
    failed = [k for k, v in checks.items() if not v]
    report(7, ok, f"{len(checks)} structural suites exact in {seconds:.0f}s < {STRUCTURE_SECONDS:.0f}s"
                  + (f"; failed {failed}" if failed else ""))
    assert ok
