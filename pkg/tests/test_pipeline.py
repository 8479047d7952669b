import pytest

from hilbert_siegel.base_ring import RingElement, prime_ideal
from hilbert_siegel.pipeline import (
    HECKE_PRIMES,
    compare_level,
    compute_level,
    good_primes,
    load_table1,
    parse_level,
)


def test_parse_level():
    s = parse_level("11,3+w")
    assert s.norm == 11 and s.generator == RingElement(3, 1) and [e for _, e in s.level] == [1]
    s = parse_level("25,2+w")
    assert [(P.key, e) for P, e in s.level] == [("2+1*w", 2)]
    s = parse_level("44,6+2*w")  # (2)(3+w)
    assert {P.key for P, _ in s.level} == {"2+0*w", "3+1*w"}
    for bad in ("7,2", "11", "x,3+w", "11,3+q"):
        with pytest.raises(ValueError):
            parse_level(bad)


def test_good_primes():
    assert [P.key for P in good_primes(parse_level("4,2").level)] == ["2+1*w", "3+0*w"]
    assert len(good_primes(parse_level("11,3+w").level)) == len(HECKE_PRIMES)


def test_table1_data():
    t = load_table1()
    assert [lv.norm for lv in t] == [4, 5, 9, 11, 19, 29, 31, 41, 49]
    assert [(lv.dim_M, lv.dim_S) for lv in t] == [(2, 1), (2, 1), (3, 2), (3, 2), (5, 4), (9, 8), (12, 11),
                                                    (19, 18), (26, 25)]
    assert all(lv.dim_M == lv.dim_S + 1 for lv in t)


def test_compare_level_detects_wrong_value(levels):
    exp = load_table1()[3]  # (11, 3+w)
    res = levels("3+w")
    assert compare_level(exp, res).ok
    f = exp.forms[0]
    key = next(iter(f.eigenvalues))
    f.eigenvalues[key] = f.eigenvalues[key] + 1
    cmp = compare_level(exp, res)
    assert not cmp.ok and cmp.matched[f.name] is None and cmp.unmatched_systems


def test_threads_do_not_change_results():
    P = prime_ideal("3+w")
    a = compute_level([(P, 1)], threads=1)
    b = compute_level([(P, 1)], threads=3)
    assert [s.to_json() for s in a.systems] == [s.to_json() for s in b.systems]
    assert list(a.brandt) == list(b.brandt)


def test_composite_level_pipeline():
    res = compute_level(parse_level("44,6+2*w").level, primes=("2+w",))
    assert 1 + res.extracted_dimension() + sum(r.dimension for r in res.residual) == res.h
    for B in res.brandt.values():
        assert (B.row_sums() == B.row_sums()[0]).all()
