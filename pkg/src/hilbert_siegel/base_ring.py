"""Exact arithmetic in F = Q(sqrt 5), its integers Z[w], residue rings and
the real quadratic coefficient fields Q(w_D).

Throughout, ``w`` denotes (1 + sqrt 5)/2, so w^2 = w + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

SQRT5 = math.sqrt(5.0)
W0 = (1 + SQRT5) / 2  # w under the first real embedding
W1 = (1 - SQRT5) / 2  # ... and under the second


class NotInvertibleError(ArithmeticError):
    """Raised when inverting a non-unit of a residue ring."""


@dataclass(frozen=True, order=True)
class FieldElement:
    """a + b*w in F, with rational a, b."""

    a: Fraction
    b: Fraction

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    @classmethod
    def coerce(cls, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, RingElement):
            return cls(x.a, x.b)
        return cls(x, 0)

    def __add__(self, o):
        if not isinstance(o, _SCALARS):
            return NotImplemented
        o = FieldElement.coerce(o)
        return FieldElement(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-FieldElement.coerce(o))

    def __rsub__(self, o):
        return FieldElement.coerce(o) - self

    def __mul__(self, o):
        if not isinstance(o, _SCALARS):
            return NotImplemented
        o = FieldElement.coerce(o)
        a, b, c, d = self.a, self.b, o.a, o.b
        return FieldElement(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def conj(self) -> "FieldElement":
        return FieldElement(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.b

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F")
        c = self.conj()
        return FieldElement(c.a / n, c.b / n)

    def __truediv__(self, o):
        return self * FieldElement.coerce(o).inverse()

    def embeddings(self) -> tuple[float, float]:
        return (float(self.a) + float(self.b) * W0, float(self.a) + float(self.b) * W1)

    def is_totally_positive(self) -> bool:
        # exact: x >> 0 iff trace > 0 and norm > 0
        return self.trace() > 0 and self.norm() > 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def to_ring(self) -> "RingElement":
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        return RingElement(int(self.a), int(self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __repr__(self):
        return f"FieldElement({self.a}, {self.b})"


@dataclass(frozen=True, order=True)
class RingElement:
    """a + b*w in O_F = Z[w]."""

    a: int
    b: int

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", int(a))
        object.__setattr__(self, "b", int(b))

    @classmethod
    def coerce(cls, x) -> "RingElement":
        if isinstance(x, RingElement):
            return x
        if isinstance(x, FieldElement):
            return x.to_ring()
        if isinstance(x, (tuple, list)):
            return cls(*x)
        return cls(int(x), 0)

    def __add__(self, o):
        if isinstance(o, FieldElement):
            return FieldElement.coerce(self) + o
        o = RingElement.coerce(o)
        return RingElement(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-RingElement.coerce(o))

    def __rsub__(self, o):
        return RingElement.coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, FieldElement):
            return FieldElement.coerce(self) * o
        o = RingElement.coerce(o)
        a, b, c, d = self.a, self.b, o.a, o.b
        return RingElement(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RingElement(1, 0)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "RingElement":
        return RingElement(self.a + self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def trace(self) -> int:
        return 2 * self.a + self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def is_totally_positive(self) -> bool:
        return self.trace() > 0 and self.norm() > 0

    def embeddings(self) -> tuple[float, float]:
        return (self.a + self.b * W0, self.a + self.b * W1)

    def divmod(self, y: "RingElement") -> tuple["RingElement", "RingElement"]:
        """Euclidean division: x = q*y + r with |N(r)| < |N(y)|."""
        y = RingElement.coerce(y)
        n = y.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in O_F")
        num = self * y.conj()
        q = RingElement(_round_div(num.a, n), _round_div(num.b, n))
        return q, self - q * y

    def divides(self, x: "RingElement") -> bool:
        x = RingElement.coerce(x)
        if self.is_zero():
            return x.is_zero()
        return x.divmod(self)[1].is_zero()

    def exact_div(self, y: "RingElement") -> "RingElement":
        q, r = self.divmod(y)
        if not r.is_zero():
            raise ArithmeticError(f"{y} does not divide {self}")
        return q

    def key(self) -> str:
        """Canonical string 'a+b*w' used in JSON maps."""
        return f"{self.a}{self.b:+d}*w"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*w"
        return self.key()

    def __repr__(self):
        return f"RingElement({self.a}, {self.b})"


_SCALARS = (FieldElement, RingElement, int, Fraction)


def _round_div(x: int, n: int) -> int:
    # nearest integer to x/n, exact
    if n < 0:
        x, n = -x, -n
    return (2 * x + n) // (2 * n)


OMEGA = RingElement(0, 1)
ONE = RingElement(1, 0)
ZERO = RingElement(0, 0)
# totally positive fundamental unit of norm +1
EPS2 = RingElement(1, 1)  # w^2
EPS2_INV = RingElement(2, -1)  # w^-2


def gcd(x: RingElement, y: RingElement) -> RingElement:
    x, y = RingElement.coerce(x), RingElement.coerce(y)
    while not y.is_zero():
        x, y = y, x.divmod(y)[1]
    return x


def parse_ring_element(s: str) -> RingElement:
    """Parse '3+w', '5+2w', '4-w', '2', '3+1*w', '4-1*w', '-2*w' ..."""
    t = s.replace(" ", "").replace("*", "").replace("omega", "w").replace("ω", "w")
    if not t:
        raise ValueError("empty ring element")
    a = b = 0
    i = 0
    terms = []
    while i < len(t):
        j = i + 1
        while j < len(t) and t[j] not in "+-":
            j += 1
        terms.append(t[i:j])
        i = j
    for term in terms:
        if term.endswith("w"):
            c = term[:-1]
            if c in ("", "+"):
                b += 1
            elif c == "-":
                b -= 1
            else:
                b += int(c)
        else:
            a += int(term)
    return RingElement(a, b)


def totally_positive_generator(g: RingElement, e: int = 1) -> RingElement:
    """Canonical totally positive generator of the ideal (g^e).

    Minimal trace among totally positive generators, ties broken by the
    lexicographically smallest (a, b).
    """
    g = RingElement.coerce(g) ** e
    if g.is_zero():
        raise ValueError("zero ideal")
    if g.norm() < 0:
        g = g * OMEGA  # N(w) = -1
    if g.trace() < 0:
        g = -g
    assert g.is_totally_positive()
    # trace along g*w^(2k) is convex in k
    best = g
    for step in (EPS2, EPS2_INV):
        cur = g
        while True:
            nxt = cur * step
            if nxt.trace() > cur.trace():
                break
            cur = nxt
            if (cur.trace(), cur.a, cur.b) < (best.trace(), best.a, best.b):
                best = cur
    # the two ends can tie; scan neighbours explicitly for the tie-break
    cands = [best, best * EPS2, best * EPS2_INV]
    return min(cands, key=lambda x: (x.trace(), x.a, x.b))


@dataclass(frozen=True)
class PrimeIdeal:
    residue_char: int
    norm: int
    generator: RingElement
    inertia: str  # "split" | "inert" | "ramified"

    @property
    def key(self) -> str:
        return self.generator.key()

    @property
    def label(self) -> str:
        return f"({self.norm},{self.generator})"

    def contains(self, x: RingElement) -> bool:
        return self.generator.divides(x)

    def __str__(self):
        return self.label


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=None)
def factor_rational_prime(p: int) -> tuple[PrimeIdeal, ...]:
    """Primes of O_F above p, with canonical totally positive generators."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 5:
        return (PrimeIdeal(5, 5, totally_positive_generator(RingElement(2, 1)), "ramified"),)
    roots = [r for r in range(p) if (r * r - r - 1) % p == 0]
    if not roots:
        return (PrimeIdeal(p, p * p, RingElement(p, 0), "inert"),)
    out = []
    for r in roots:
        g = gcd(RingElement(p, 0), RingElement(-r, 1))
        g = totally_positive_generator(g)
        assert g.norm() == p
        out.append(PrimeIdeal(p, p, g, "split"))
    out.sort(key=lambda P: (P.generator.a, P.generator.b))
    return tuple(out)


def prime_ideal(gen) -> PrimeIdeal:
    """The prime ideal generated by ``gen`` (RingElement or string)."""
    if isinstance(gen, str):
        gen = parse_ring_element(gen)
    gen = RingElement.coerce(gen)
    n = abs(gen.norm())
    for p in range(2, n + 1):
        if n % p == 0:
            break
    else:
        raise ValueError(f"{gen} is a unit")
    for P in factor_rational_prime(p):
        if P.norm == n and P.contains(gen):
            return P
    raise ValueError(f"{gen} does not generate a prime ideal")


def factor_ideal(gen: RingElement) -> list[tuple[PrimeIdeal, int]]:
    """Factor the principal ideal (gen) into prime powers."""
    gen = RingElement.coerce(gen)
    n = abs(gen.norm())
    if n == 0:
        raise ValueError("zero ideal")
    out = []
    x = gen
    p = 2
    while n > 1:
        if n % p == 0:
            while n % p == 0:
                n //= p
            for P in factor_rational_prime(p):
                e = 0
                while P.contains(x):
                    x = x.exact_div(P.generator)
                    e += 1
                if e:
                    out.append((P, e))
        p += 1
    assert x.is_unit(), x
    out.sort(key=lambda t: (t[0].norm, t[0].generator.a, t[0].generator.b))
    return out


def _hnf2(rows) -> tuple[int, int, int]:
    """For a full-rank lattice in Z^2, return (A, c, D) with basis
    (A, 0), (c, D), A, D > 0 and 0 <= c < A."""
    (x1, y1), (x2, y2) = rows
    g, s, t = _xgcd(y1, y2)
    c = s * x1 + t * x2
    D = g
    A = abs((y2 // g) * x1 - (y1 // g) * x2)
    if D < 0:
        c, D = -c, -D
    return A, c % A, D


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


MAX_TABLE_SIZE = 8192  # size^2 int64 entries per table


class ResidueRing:
    """O_F / P^e with elements indexed 0..size-1.

    Index of a + b*w is a + A*b where (a, b) is reduced against the Hermite
    basis (A, 0), (c, D) of the ideal lattice. Lookup tables for the ring
    operations are built lazily as numpy arrays.
    """

    def __init__(self, prime: PrimeIdeal, e: int = 1):
        if e < 1:
            raise ValueError("exponent must be >= 1")
        self.prime = prime
        self.e = e
        self.modulus = prime.generator ** e
        m = self.modulus
        self.A, self.c, self.D = _hnf2([(m.a, m.b), (m.b, m.a + m.b)])
        self.size = self.A * self.D
        assert self.size == prime.norm ** e

    def __repr__(self):
        return f"ResidueRing({self.prime.label}^{self.e})"

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and (self.prime, self.e) == (other.prime, other.e)

    def __hash__(self):
        return hash((self.prime, self.e))

    # scalar interface -------------------------------------------------
    def reduce(self, x) -> int:
        x = RingElement.coerce(x)
        a, b = x.a, x.b
        k = b // self.D
        a -= k * self.c
        b -= k * self.D
        return a % self.A + self.A * b

    def reduce_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        k = np.floor_divide(b, self.D)
        a = a - k * self.c
        b = b - k * self.D
        return np.mod(a, self.A) + self.A * b

    def lift(self, i: int) -> RingElement:
        return RingElement(i % self.A, i // self.A)

    def element(self, x) -> "ResidueElement":
        return ResidueElement(self, self.reduce(x))

    def elements(self):
        return [ResidueElement(self, i) for i in range(self.size)]

    # tables -----------------------------------------------------------
    @cached_property
    def pairs(self) -> np.ndarray:
        if self.size > MAX_TABLE_SIZE:
            raise ValueError(f"{self!r} has {self.size} elements; lookup tables stop at {MAX_TABLE_SIZE}")
        idx = np.arange(self.size)
        return np.stack([idx % self.A, idx // self.A], axis=1)

    @cached_property
    def add(self) -> np.ndarray:
        p = self.pairs
        return self.reduce_array(p[:, None, 0] + p[None, :, 0], p[:, None, 1] + p[None, :, 1])

    @cached_property
    def mul(self) -> np.ndarray:
        p = self.pairs
        a, b = p[:, None, 0], p[:, None, 1]
        c, d = p[None, :, 0], p[None, :, 1]
        return self.reduce_array(a * c + b * d, a * d + b * c + b * d)

    @cached_property
    def neg(self) -> np.ndarray:
        p = self.pairs
        return self.reduce_array(-p[:, 0], -p[:, 1])

    @cached_property
    def sub(self) -> np.ndarray:
        return self.add[:, self.neg]

    @cached_property
    def is_unit(self) -> np.ndarray:
        return (self.mul == self.one).any(axis=1)

    @cached_property
    def inv(self) -> np.ndarray:
        hits = self.mul == self.one
        out = np.where(hits.any(axis=1), hits.argmax(axis=1), -1)
        return out.astype(np.int64)

    @cached_property
    def one(self) -> int:
        return self.reduce(ONE)

    @cached_property
    def pi(self) -> int:
        return self.reduce(self.prime.generator)

    @cached_property
    def pi_powers(self) -> list[int]:
        out = [self.one]
        for _ in range(self.e):
            out.append(int(self.mul[out[-1], self.pi]))
        return out

    @cached_property
    def valuation(self) -> np.ndarray:
        """v(x) in 0..e, with v(0) = e."""
        val = np.full(self.size, self.e, dtype=np.int64)
        units = self.is_unit
        for v in range(self.e - 1, -1, -1):
            hit = np.unique(self.mul[self.pi_powers[v], units])
            val[hit] = v
        return val

    @cached_property
    def unit_part(self) -> np.ndarray:
        """u(x): a unit with x = pi^v(x) * u(x) (u(0) = 1)."""
        out = np.full(self.size, self.one, dtype=np.int64)
        units = np.flatnonzero(self.is_unit)
        for v in range(self.e):
            img = self.mul[self.pi_powers[v], units]
            # first unit hitting each image
            order = np.argsort(img, kind="stable")
            img_s = img[order]
            first = np.r_[True, img_s[1:] != img_s[:-1]]
            out[img_s[first]] = units[order[first]]
        return out

    @cached_property
    def div_pi_power(self) -> np.ndarray:
        """t = div_pi_power[v, y] satisfies pi^v * t = y whenever v(y) >= v."""
        out = np.zeros((self.e + 1, self.size), dtype=np.int64)
        for v in range(self.e + 1):
            img = self.mul[self.pi_powers[v], :]
            order = np.argsort(img, kind="stable")
            img_s = img[order]
            first = np.r_[True, img_s[1:] != img_s[:-1]]
            out[v, img_s[first]] = order[first]
        return out

    @cached_property
    def reduce_mod_pi_power(self) -> np.ndarray:
        """Canonical representative in O/P^e of the class of y mod P^v."""
        out = np.zeros((self.e + 1, self.size), dtype=np.int64)
        p = self.pairs
        for v in range(self.e + 1):
            if v == 0:
                continue
            sub = ResidueRing(self.prime, v)
            reps = sub.reduce_array(p[:, 0], p[:, 1])
            out[v] = self.reduce_array(reps % sub.A, reps // sub.A)
        return out

    def to_residue_field(self) -> np.ndarray:
        """Reduction map O/P^e -> O/P as an index table."""
        f = ResidueRing(self.prime, 1)
        return f.reduce_array(self.pairs[:, 0], self.pairs[:, 1])


@dataclass(frozen=True)
class ResidueElement:
    ring: ResidueRing
    index: int

    def _wrap(self, i) -> "ResidueElement":
        return ResidueElement(self.ring, int(i))

    def _other(self, o) -> int:
        if isinstance(o, ResidueElement):
            if o.ring != self.ring:
                raise ValueError("mismatched residue rings")
            return o.index
        return self.ring.reduce(o)

    def __add__(self, o):
        return self._wrap(self.ring.add[self.index, self._other(o)])

    __radd__ = __add__

    def __sub__(self, o):
        return self._wrap(self.ring.sub[self.index, self._other(o)])

    def __neg__(self):
        return self._wrap(self.ring.neg[self.index])

    def __mul__(self, o):
        return self._wrap(self.ring.mul[self.index, self._other(o)])

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return bool(self.ring.is_unit[self.index])

    def is_zero(self) -> bool:
        return self.index == 0

    def inverse(self) -> "ResidueElement":
        i = int(self.ring.inv[self.index])
        if i < 0:
            raise NotInvertibleError(f"{self.lift()} is not a unit mod {self.ring}")
        return self._wrap(i)

    def lift(self) -> RingElement:
        return self.ring.lift(self.index)

    def __repr__(self):
        return f"{self.lift()} mod {self.ring.prime.label}^{self.ring.e}"


class QuadExtElement:
    """a + b*w_D in Q(sqrt D) (D = 1 means Q).

    w_D = (1 + sqrt D)/2 when D = 1 mod 4, sqrt D otherwise.
    """

    __slots__ = ("disc", "a", "b")

    def __init__(self, disc: int, a=0, b=0):
        a, b = Fraction(a), Fraction(b)
        if disc == 1 and b != 0:
            raise ValueError("rational element with nonzero w-coefficient")
        self.disc = int(disc)
        self.a = a
        self.b = b

    @property
    def _c(self) -> Fraction:
        # w_D^2 = s*w_D + c
        return Fraction(self.disc - 1, 4) if self.disc % 4 == 1 else Fraction(self.disc)

    @property
    def _s(self) -> int:
        return 1 if self.disc % 4 == 1 else 0

    def _coerce(self, o) -> "QuadExtElement":
        if isinstance(o, QuadExtElement):
            if o.disc == self.disc:
                return o
            if o.b == 0:
                return QuadExtElement(self.disc, o.a, 0)
            if self.b == 0:
                return o  # handled by caller via promote
            raise ValueError(f"mixed fields Q(w_{self.disc}) and Q(w_{o.disc})")
        return QuadExtElement(self.disc, o, 0)

    @staticmethod
    def _promote(x, y):
        if isinstance(y, QuadExtElement) and isinstance(x, QuadExtElement):
            if x.disc != y.disc:
                if x.b == 0:
                    x = QuadExtElement(y.disc, x.a)
                elif y.b == 0:
                    y = QuadExtElement(x.disc, y.a)
                else:
                    raise ValueError(f"mixed fields Q(w_{x.disc}) and Q(w_{y.disc})")
            return x, y
        if isinstance(x, QuadExtElement):
            return x, QuadExtElement(x.disc, y)
        return QuadExtElement(y.disc, x), y

    def __add__(self, o):
        x, y = self._promote(self, o)
        return QuadExtElement(x.disc, x.a + y.a, x.b + y.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElement(self.disc, -self.a, -self.b)

    def __sub__(self, o):
        x, y = self._promote(self, o)
        return QuadExtElement(x.disc, x.a - y.a, x.b - y.b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        x, y = self._promote(self, o)
        c, s = x._c, x._s
        bd = x.b * y.b
        return QuadExtElement(x.disc, x.a * y.a + c * bd, x.a * y.b + x.b * y.a + s * bd)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = QuadExtElement(self.disc, 1)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "QuadExtElement":
        if self._s:
            return QuadExtElement(self.disc, self.a + self.b, -self.b)
        return QuadExtElement(self.disc, self.a, -self.b)

    def norm(self) -> Fraction:
        p = self * self.conj()
        return p.a

    def trace(self) -> Fraction:
        return (self + self.conj()).a

    def inverse(self) -> "QuadExtElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadExtElement(self.disc, c.a / n, c.b / n)

    def __truediv__(self, o):
        x, y = self._promote(self, o)
        return x * y.inverse()

    def __rtruediv__(self, o):
        return QuadExtElement(self.disc, o) / self

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __float__(self):
        return float(self.embeddings()[0])

    def embeddings(self) -> tuple[float, float]:
        if self.disc == 1:
            return (float(self.a), float(self.a))
        r = math.sqrt(self.disc)
        w, wc = ((1 + r) / 2, (1 - r) / 2) if self._s else (r, -r)
        return (float(self.a) + float(self.b) * w, float(self.a) + float(self.b) * wc)

    def __eq__(self, o):
        if not isinstance(o, QuadExtElement):
            try:
                o = QuadExtElement(self.disc, Fraction(o))
            except TypeError:
                return NotImplemented
        if self.b == 0 and o.b == 0:
            return self.a == o.a
        return (self.disc, self.a, self.b) == (o.disc, o.a, o.b)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.disc, self.a, self.b))

    def to_json(self) -> list:
        return [self.disc, _frac_json(self.a), _frac_json(self.b)]

    @classmethod
    def from_json(cls, v) -> "QuadExtElement":
        D, a, b = v
        return cls(int(D), _frac_parse(a), _frac_parse(b))

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*w{self.disc}"


def _frac_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _frac_parse(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator()


def squarefree_part(n: int) -> tuple[int, int]:
    """n = f^2 * D with D squarefree (n > 0). Returns (D, f)."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    D, f = 1, 1
    p = 2
    m = n
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            f *= p
        if m % p == 0:
            m //= p
            D *= p
        p += 1
    return D * m, f


def quadratic_roots(t: int, n: int) -> tuple[QuadExtElement, QuadExtElement]:
    """Roots of x^2 - t x + n as elements of Q(w_D), larger real root first."""
    disc = t * t - 4 * n
    if disc <= 0:
        raise ValueError("expected real irrational roots")
    D, f = squarefree_part(disc)
    if D == 1:
        r1, r2 = Fraction(t + f, 2), Fraction(t - f, 2)
        return QuadExtElement(1, r1), QuadExtElement(1, r2)
    if D % 4 == 1:
        # sqrt D = 2 w_D - 1
        plus = QuadExtElement(D, Fraction(t - f, 2), f)
    else:
        plus = QuadExtElement(D, Fraction(t, 2), Fraction(f, 2))
    return plus, plus.conj()
