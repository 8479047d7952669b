"""End-to-end computations per level, with optional persistent caching, and
the comparison against the tabulated weight-3 eigensystems."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .base_ring import (
    PrimeIdeal,
    QuadExtElement,
    RingElement,
    factor_ideal,
    parse_ring_element,
    prime_ideal,
)
from .cache import Cache
from .eigen import EigenSystem, ResidualBlock, split_systems
from .flags import Level, OrbitData, gamma_orbits, level_label, normalize_level
from .hecke import BrandtMatrix, UnsupportedOperation, brandt_matrix, install_theta, theta_from_reps, theta_set
from .lfunctions import LiftReport, detect_lifts, load_fixture
from .local_splitting import SplittingMap, install_splitting, split_order

log = logging.getLogger(__name__)

HECKE_PRIMES = ("2", "2+w", "3")
SUPPORTED_DISC = 5


@dataclass(frozen=True)
class LevelSpec:
    norm: int
    generator: RingElement
    level: Level

    @property
    def label(self) -> str:
        return f"({self.norm},{self.generator})"


def parse_level(text: str) -> LevelSpec:
    """Parse "norm,a+b*w" (e.g. "11,3+w"); "25,2+w" means the square of (2+w)."""
    try:
        norm_s, gen_s = text.split(",", 1)
        norm = int(norm_s)
        gen = parse_ring_element(gen_s.strip())
    except ValueError as exc:
        raise ValueError(f"bad level {text!r}: expected 'norm,a+b*w'") from exc
    n = abs(gen.norm())
    if n == norm:
        level = normalize_level([(P, e) for P, e in factor_ideal(gen)])
    else:
        try:
            P = prime_ideal(gen)
        except ValueError:
            raise ValueError(f"bad level {text!r}: generator has norm {n}, not {norm}") from None
        e, m = 0, norm
        while m % P.norm == 0:
            m //= P.norm
            e += 1
        if m != 1:
            raise ValueError(f"bad level {text!r}: {norm} is not a power of N({gen}) = {n}")
        level = normalize_level([(P, e)])
        gen = P.generator ** e
    return LevelSpec(norm, gen, level)


def good_primes(level: Level, primes=HECKE_PRIMES) -> list[PrimeIdeal]:
    bad = {P.key for P, _ in level}
    out = []
    for g in primes:
        P = g if isinstance(g, PrimeIdeal) else prime_ideal(g)
        if P.key not in bad:
            out.append(P)
    return out


# --- cached building blocks ---------------------------------------------------------

def _splitting(P: PrimeIdeal, e: int, cache: Cache | None) -> SplittingMap:
    params = {"prime": P.key, "e": e}
    if cache is not None:
        d = cache.get("splitting", params)
        if d is not None:
            try:
                return install_splitting(SplittingMap.from_json(d))
            except (AssertionError, ValueError, KeyError) as exc:
                log.warning("ignoring cached splitting %s: %s", params, exc)
    S = split_order(P, e)
    if cache is not None:
        cache.put("splitting", params, S.to_json())
    return S


def _theta(P: PrimeIdeal, kind: int, cache: Cache | None):
    params = {"prime": P.key, "kind": kind}
    if cache is not None:
        d = cache.get("theta", params)
        if d is not None:
            reps = np.array(d, dtype=np.int64).reshape(-1, 2, 2, 8)
            return install_theta(theta_from_reps(P, kind, reps))
    T = theta_set(P, kind)
    if cache is not None:
        cache.put("theta", params, T.reps.reshape(len(T), -1).tolist())
    return T


def prepare(level: Level, primes: list[PrimeIdeal], cache: Cache | None) -> None:
    """Fix the splittings used by this run (loading them from the cache if present)."""
    for P, e in level:
        _splitting(P, e, cache)
    for P in primes:
        _splitting(P, 1, cache)
        _splitting(P, 2, cache)


def compute_brandt(level: Level, P: PrimeIdeal, kind: int, cache: Cache | None = None,
                   orbits: OrbitData | None = None) -> BrandtMatrix:
    if any(Q.key == P.key for Q, _ in level):
        raise UnsupportedOperation(f"Hecke operator at {P.label} divides the level")
    params = {"level": level_label(level), "prime": P.key, "kind": kind}
    if cache is not None:
        d = cache.get("brandt", params)
        if d is not None:
            return BrandtMatrix(level, P, kind, np.array(d, dtype=np.int64))
    prepare(level, [P], cache)
    _theta(P, 1, cache)
    if kind == 2:
        _theta(P, 2, cache)
    B = brandt_matrix(level, P, kind, orbits=orbits)
    if cache is not None:
        cache.put("brandt", params, B.entries.tolist())
    return B


@dataclass
class LevelResult:
    level: Level
    orbits: OrbitData
    brandt: dict = field(default_factory=dict)  # (prime key, kind) -> BrandtMatrix
    systems: list = field(default_factory=list)
    residual: list = field(default_factory=list)

    @property
    def h(self) -> int:
        return self.orbits.h

    @property
    def cusp_systems(self) -> list[EigenSystem]:
        return [s for s in self.systems if not s.is_eisenstein]

    def extracted_dimension(self) -> int:
        return sum(s.degree for s in self.cusp_systems)


def compute_level(level, primes=HECKE_PRIMES, cache: Cache | None = None, threads: int = 1,
                  eigen: bool = True) -> LevelResult:
    level = normalize_level(level)
    good = good_primes(level, primes)
    prepare(level, good, cache)
    orbits = gamma_orbits(level)
    for P in good:  # theta sets first, so worker threads only read them
        _theta(P, 1, cache)
        _theta(P, 2, cache)
    jobs = [(P, k) for P in good for k in (1, 2)]

    def run(job):
        P, k = job
        return compute_brandt(level, P, k, cache, orbits)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            mats = list(ex.map(run, jobs))
    else:
        mats = [run(j) for j in jobs]
    res = LevelResult(level, orbits, {(B.prime.key, B.kind): B for B in mats})
    if eigen and res.brandt:
        res.systems, res.residual = split_systems(
            level_label(level), {k: B.entries for k, B in res.brandt.items()})
    return res


# --- tabulated weight-3 systems ---------------------------------------------------------------------------

@dataclass
class ExpectedForm:
    name: str
    disc: int
    eigenvalues: dict  # (prime key, kind) -> QuadExtElement
    lift: bool


@dataclass
class ExpectedLevel:
    label: str
    norm: int
    generator: RingElement
    dim_M: int
    dim_S: int
    forms: list

    @property
    def level(self) -> Level:
        return normalize_level([(P, e) for P, e in factor_ideal(self.generator)])


def load_table1(path=None) -> list[ExpectedLevel]:
    from .lfunctions import data_path

    with open(path or data_path("table1.json")) as fh:
        d = json.load(fh)
    out = []
    for lv in d["levels"]:
        forms = []
        for f in lv["forms"]:
            vals = {}
            for key, v in f["eigenvalues"].items():
                p, k = key.rsplit(":", 1)
                vals[(prime_ideal(p).key, int(k))] = QuadExtElement.from_json(v)
            forms.append(ExpectedForm(f["name"], int(f["disc"]), vals, bool(f["lift"])))
        out.append(ExpectedLevel(lv["label"], int(lv["norm"]), RingElement(*lv["generator"]),
                                 int(lv["dim_M"]), int(lv["dim_S"]), forms))
    return out


def _same_system(sys: EigenSystem, form: ExpectedForm, keys) -> bool:
    for conj in (False, True):
        ok = True
        for key in keys:
            v = sys.eigenvalues[key]
            if conj:
                v = v.conj()
            if v != form.eigenvalues[key]:
                ok = False
                break
        if ok:
            return True
    return False


@dataclass
class LevelComparison:
    label: str
    dims: tuple  # computed (dim M, dim S)
    expected_dims: tuple
    matched: dict  # form name -> index into cusp systems or None
    unmatched_systems: list  # computed cusp systems absent from the table
    lift_ok: dict  # form name -> bool
    lift_report: LiftReport | None = None
    extracted: int = 0
    residual: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.dims == self.expected_dims
                and all(v is not None for v in self.matched.values())
                and not self.unmatched_systems
                and all(self.lift_ok.values()))


def compare_level(exp: ExpectedLevel, res: LevelResult, fixture=None) -> LevelComparison:
    keys = sorted(res.brandt)
    cusp = res.cusp_systems
    matched = {}
    used = set()
    for f in exp.forms:
        hit = None
        for i, s in enumerate(cusp):
            if i not in used and _same_system(s, f, keys):
                hit = i
                break
        matched[f.name] = hit
        if hit is not None:
            used.add(hit)
    unmatched = [s for i, s in enumerate(cusp) if i not in used]
    fixture = fixture or load_fixture()
    report = detect_lifts(cusp, fixture, [P for P, _ in res.level])
    verdicts = {id(s): v for s, v in report.entries}
    lift_ok = {}
    for f in exp.forms:
        i = matched[f.name]
        lift_ok[f.name] = i is not None and (verdicts[id(cusp[i])].kind == "long-root") == f.lift
    return LevelComparison(exp.label, (res.h, res.h - 1), (exp.dim_M, exp.dim_S), matched, unmatched,
                           lift_ok, report, res.extracted_dimension(), res.residual)


def reproduce_table1(cache: Cache | None = None, threads: int = 1, levels=None) -> list[LevelComparison]:
    fixture = load_fixture()
    out = []
    for exp in load_table1():
        if levels and exp.label not in levels:
            continue
        res = compute_level(exp.level, cache=cache, threads=threads)
        out.append(compare_level(exp, res, fixture))
    return out
