"""Spin Euler factors of eigensystems and lift detection against Hilbert
modular eigenvalue data."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .base_ring import PrimeIdeal, QuadExtElement, RingElement, prime_ideal
from .eigen import EigenSystem

LIFT_KINDS = ("long-root", "short-root")


class FixtureError(ValueError):
    """Malformed eigenvalue fixture."""


def _q(x) -> QuadExtElement:
    return x if isinstance(x, QuadExtElement) else QuadExtElement(1, x)


def _pow(q: int, e) -> Fraction:
    e = Fraction(e)
    if e.denominator != 1:
        raise ValueError("half-integral power of q")
    return Fraction(q) ** int(e)


@dataclass
class EulerFactor:
    prime: str
    q: int
    k: int
    coeffs: tuple  # c0..c4 of Q_P(x), QuadExtElements

    def is_palindromic(self) -> bool:
        """q^(4k-6) x^4 Q(1 / (q^(2k-3) x)) == Q(x)."""
        q, k = self.q, self.k
        for i in range(5):
            lhs = self.coeffs[4 - i] * (Fraction(q) ** (4 * k - 6) / Fraction(q) ** ((2 * k - 3) * (4 - i)))
            if lhs != self.coeffs[i]:
                return False
        return True

    def to_json(self) -> dict:
        return {"prime": self.prime, "q": self.q, "k": self.k, "coefficients": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, d: dict) -> "EulerFactor":
        return cls(d["prime"], int(d["q"]), int(d["k"]), tuple(QuadExtElement.from_json(c) for c in d["coefficients"]))

    def __eq__(self, o):
        return isinstance(o, EulerFactor) and (self.prime, self.q, self.k, tuple(self.coeffs)) == \
            (o.prime, o.q, o.k, tuple(o.coeffs))


def euler_factor_from(a1, a2, q: int, k: int, prime: str = "") -> EulerFactor:
    a1, a2 = _q(a1), _q(a2)
    b1 = a1 * a1 - a2 - _pow(q, 2 * k - 4)
    coeffs = (_q(1), -a1, b1, -a1 * _pow(q, 2 * k - 3), _q(_pow(q, 4 * k - 6)))
    return EulerFactor(prime, q, k, coeffs)


def euler_factor(sys: EigenSystem, prime, k: int = 3) -> EulerFactor:
    P = prime if isinstance(prime, PrimeIdeal) else prime_ideal(prime)
    try:
        a1 = sys.eigenvalues[(P.key, 1)]
        a2 = sys.eigenvalues[(P.key, 2)]
    except KeyError as exc:
        raise KeyError(f"eigen system has no T_1/T_2 eigenvalue at {P.label}") from exc
    return euler_factor_from(a1, a2, P.norm, k, P.key)


def lift_long_root(a, q: int, k: int = 4) -> tuple[QuadExtElement, QuadExtElement]:
    a = _q(a) * _pow(q, Fraction(4 - k, 2))
    return a + q * q + q, a * (q + 1) + q * q - 1


def lift_short_root(a, q: int, k: int = 4) -> tuple[QuadExtElement, QuadExtElement, bool]:
    """(a1, a2, integral): integral is False when either value is not an algebraic integer."""
    a = _q(a)
    a1 = a * a * a * _pow(q, Fraction(6 - 3 * k, 2)) - a * 2 * _pow(q, Fraction(4 - k, 2))
    a2 = a * a * a * a * _pow(q, 4 - 2 * k) - a * a * 3 * _pow(q, 3 - k) + q * q - 1
    return a1, a2, a1.is_integral() and a2.is_integral()


# --- fixture -----------------------------------------------------------------

@dataclass
class HilbertForm:
    name: str
    disc: int
    eigenvalues: dict  # prime key -> QuadExtElement

    def conj(self) -> "HilbertForm":
        return HilbertForm(self.name, self.disc, {p: v.conj() for p, v in self.eigenvalues.items()})


@dataclass
class HilbertLevel:
    label: str
    norm: int
    generator: RingElement
    forms: list

    @property
    def prime(self) -> PrimeIdeal:
        return prime_ideal(self.generator)


@dataclass
class HilbertEigenData:
    weight: int
    levels: list


def _parse_value(v, where: str) -> QuadExtElement:
    if not (isinstance(v, list) and len(v) == 3):
        raise FixtureError(f"{where}: eigenvalue must be [D, a, b]")
    try:
        return QuadExtElement.from_json(v)
    except (TypeError, ValueError) as exc:
        raise FixtureError(f"{where}: {exc}") from exc


def parse_fixture(d: dict) -> HilbertEigenData:
    if not isinstance(d, dict) or "weight" not in d or "levels" not in d:
        raise FixtureError("fixture needs 'weight' and 'levels'")
    levels = []
    for i, lv in enumerate(d["levels"]):
        try:
            gen = RingElement(*lv["generator"])
            norm = int(lv["norm"])
            forms_raw = lv["forms"]
        except (KeyError, TypeError) as exc:
            raise FixtureError(f"level {i}: {exc}") from exc
        if abs(gen.norm()) != norm:
            raise FixtureError(f"level {i}: generator {gen} does not have norm {norm}")
        forms = []
        for j, f in enumerate(forms_raw):
            D = int(f.get("disc", 1))
            vals = {}
            for key, v in f["eigenvalues"].items():
                P = prime_ideal(key)
                val = _parse_value(v, f"level {i} form {j} prime {key}")
                if val.disc not in (1, D):
                    raise FixtureError(f"level {i} form {j}: value outside Q(w_{D})")
                vals[P.key] = val
            forms.append(HilbertForm(f.get("name", f"f{j + 1}"), D, vals))
        levels.append(HilbertLevel(lv.get("label", f"({norm},{gen})"), norm, gen, forms))
    return HilbertEigenData(int(d["weight"]), levels)


def data_path(name: str) -> Path:
    return Path(str(resources.files("hilbert_siegel") / "data" / name))


def load_fixture(path=None) -> HilbertEigenData:
    p = Path(path) if path else data_path("table2.json")
    with open(p) as fh:
        return parse_fixture(json.load(fh))


# --- lift detection -------------------------------------------------------------

@dataclass
class LiftVerdict:
    kind: str | None  # "long-root", "short-root" or None
    level: str | None = None
    form: str | None = None
    conjugated: bool = False
    primes: list = field(default_factory=list)

    def describe(self) -> str:
        if self.kind is None:
            return "no match among provided forms"
        c = " (conjugate)" if self.conjugated else ""
        return f"{self.kind} lift of {self.level} {self.form}{c}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "level": self.level, "form": self.form,
                "conjugated": self.conjugated, "primes": self.primes}


@dataclass
class LiftReport:
    entries: list  # (EigenSystem, LiftVerdict)
    note: str = ("agreement at finitely many primes is evidence of a lift, not a proof; "
                 "no short-root matches are expected at Siegel-type level")

    def to_json(self) -> dict:
        return {"note": self.note,
                "systems": [{"eigenvalues": s.to_json()["eigenvalues"], "verdict": v.to_json()}
                            for s, v in self.entries]}


def _matches(sys: EigenSystem, form: HilbertForm, kind: str, excluded: set, k: int) -> list | None:
    primes = []
    for key, a in sorted(form.eigenvalues.items()):
        if key in excluded or (key, 1) not in sys.eigenvalues or (key, 2) not in sys.eigenvalues:
            continue
        q = prime_ideal(key).norm
        if kind == "long-root":
            a1, a2 = lift_long_root(a, q, k)
        else:
            a1, a2, integral = lift_short_root(a, q, k)
            if not integral:
                return None
        if sys.eigenvalues[(key, 1)] != a1 or sys.eigenvalues[(key, 2)] != a2:
            return None
        if kind == "long-root":
            assert a2 == (a1 - q * q - q) * (q + 1) + q * q - 1
        primes.append(key)
    return primes or None


def detect_lifts(systems, fixture: HilbertEigenData, level_primes=()) -> LiftReport:
    """Compare each cuspidal system with every fixture form via both lift formulas."""
    if fixture.weight != 4:
        raise FixtureError("lift formulas are implemented for weight-4 Hilbert forms")
    k = fixture.weight
    excluded_sys = {P.key if isinstance(P, PrimeIdeal) else prime_ideal(P).key for P in level_primes}
    entries = []
    for s in systems:
        if s.is_eisenstein:
            continue
        verdict = LiftVerdict(None)
        for kind in LIFT_KINDS:
            for lv in fixture.levels:
                excluded = excluded_sys | {lv.prime.key}
                for form in lv.forms:
                    for conj in (False, True):
                        f = form.conj() if conj else form
                        primes = _matches(s, f, kind, excluded, k)
                        if primes:
                            verdict = LiftVerdict(kind, lv.label, form.name, conj, primes)
                            break
                    if verdict.kind:
                        break
                if verdict.kind:
                    break
            if verdict.kind:
                break
        entries.append((s, verdict))
    return LiftReport(entries)
