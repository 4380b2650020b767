"""Exact arithmetic in Q and quadratic fields Q(sqrt d), with their places.

Absolute values are normalized so that the product formula holds with no
weights: for a place w of K above p,

    log|x|_w = -(f_w * log p) * v_w(x) / [K:Q]

and for an archimedean place log|x|_w = (n_w / [K:Q]) * log|sigma(x)| with
n_w = 1 for real and 2 for complex places.

Field elements and valuations are exact.  Logarithms are mpmath floats at a
caller-supplied binary precision (default 192 bits) plus guard bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Union

import flint
import mpmath
from sympy import isprime, primerange
from sympy.ntheory import sqrt_mod

DEFAULT_PREC = 192
GUARD_BITS = 32

# Radicands are reduced by trial division up to this bound; see QuadField.
_TRIAL_BOUND = 1 << 12
_SMALL_PRIMES = tuple(primerange(2, _TRIAL_BOUND))


def prime_divisors(n: int) -> set[int]:
    """The set of primes dividing the nonzero integer n (FLINT factoring)."""
    n = abs(int(n))
    if n <= 1:
        return set()
    return {int(p) for p, _ in flint.fmpz(n).factor()}


class ZeroElement(ArithmeticError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


class FieldMismatch(ValueError):
    pass


def _vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ZeroElement("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_rat(q: Fraction, p: int) -> int:
    return _vp(q.numerator, p) - _vp(q.denominator, p)


def square_core(n: int) -> tuple[int, int]:
    """Split n = root**2 * core, removing square factors found by trial division.

    Every prime below 2**12 is stripped to exponent <= 1, and a perfect-square
    cofactor is absorbed.  When |n| < 2**36 the core is certified squarefree;
    beyond that a square of a large prime could survive, which only affects
    the choice of representative, never local computations (those re-strip
    p locally).
    """
    if n == 0:
        raise ValueError("square_core of 0")
    sign = -1 if n < 0 else 1
    m = abs(n)
    core, root = 1, 1
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p:
            continue
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        root *= p ** (e // 2)
        if e % 2:
            core *= p
    r = math.isqrt(m)
    if r * r == m:
        root *= r
    else:
        core *= m
    return sign * core, root


@lru_cache(maxsize=4096)
def _is_perfect_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadField:
    """The field Q(sqrt d).

    ``d`` must be free of square factors below the trial-division bound and
    must not be a square; ``from_radicand`` performs the reduction.
    """

    d: int

    def __post_init__(self) -> None:
        if not isinstance(self.d, int):
            raise TypeError("radicand must be an integer")
        if self.d in (0, 1) or _is_perfect_square(self.d):
            raise ValueError(f"Q(sqrt {self.d}) is not a quadratic field")
        core, root = square_core(self.d)
        if root != 1:
            raise ValueError(f"radicand {self.d} is not squarefree")

    @classmethod
    def from_radicand(cls, r: int) -> tuple["QuadField | None", int]:
        """Return (K, s) with r = s**2 * K.d, or (None, s) when r = s**2."""
        if r == 0:
            raise ValueError("zero radicand")
        core, root = square_core(r)
        if core == 1:
            return None, root
        return cls(core), root

    @property
    def degree(self) -> int:
        return 2

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


def field_degree(K: QuadField | None) -> int:
    return 1 if K is None else 2


Number = Union[int, Fraction, "QuadElem"]


class QuadElem:
    """a + b*sqrt(d) with rational a, b; rational elements carry field None."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0,
                 field: QuadField | None = None) -> None:
        a = Fraction(a)
        b = Fraction(b)
        if b and field is None:
            raise ValueError("irrational part needs a field")
        self.a = a
        self.b = b
        self.field = field if b else None

    @classmethod
    def coerce(cls, x: Number) -> "QuadElem":
        if isinstance(x, QuadElem):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot convert {x!r} to a field element")

    @classmethod
    def sqrt(cls, r: int | Fraction) -> "QuadElem":
        """The element sqrt(r), in Q when r is a rational square."""
        r = Fraction(r)
        num = r.numerator * r.denominator
        K, s = QuadField.from_radicand(num)
        coeff = Fraction(s, r.denominator)
        if K is None:
            return cls(coeff)
        return cls(0, coeff, K)

    @property
    def d(self) -> int:
        return 1 if self.field is None else self.field.d

    def is_rational(self) -> bool:
        return self.b == 0

    def _join(self, other: "QuadElem") -> QuadField | None:
        if self.field is None:
            return other.field
        if other.field is None or other.field == self.field:
            return self.field
        raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: Number) -> "QuadElem":
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElem(self.a + o.a, self.b + o.b, self._join(o))

    __radd__ = __add__

    def __neg__(self) -> "QuadElem":
        return QuadElem(-self.a, -self.b, self.field)

    def __sub__(self, other: Number) -> "QuadElem":
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElem(self.a - o.a, self.b - o.b, self._join(o))

    def __rsub__(self, other: Number) -> "QuadElem":
        return QuadElem.coerce(other) - self

    def __mul__(self, other: Number) -> "QuadElem":
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        K = self._join(o)
        d = 1 if K is None else K.d
        return QuadElem(self.a * o.a + d * self.b * o.b,
                        self.a * o.b + self.b * o.a, K)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "QuadElem":
        try:
            o = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero field element")
        q = self * o.conjugate()
        return QuadElem(q.a / n, q.b / n, q.field)

    def __rtruediv__(self, other: Number) -> "QuadElem":
        return QuadElem.coerce(other) / self

    def __pow__(self, e: int) -> "QuadElem":
        if e < 0:
            return QuadElem(1) / self ** (-e)
        result = QuadElem(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, QuadElem):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.field == other.field

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadElem({self.a})"
        return f"QuadElem({self.a}, {self.b}, d={self.field.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt({self.field.d})"

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.field)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def integral_parts(self) -> tuple[int, int, int]:
        """Integers (A, B, D) with self = (A + B*sqrt d) / D and D > 0."""
        D = math.lcm(self.a.denominator, self.b.denominator)
        return int(self.a * D), int(self.b * D), D


def conjugate(x: Number) -> QuadElem:
    return QuadElem.coerce(x).conjugate()


def conjugates(x: Number) -> list[QuadElem]:
    x = QuadElem.coerce(x)
    if x.is_rational():
        return [x]
    return [x, x.conjugate()]


# ---------------------------------------------------------------------------
# places


SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"


def _local_radicand(d: int, p: int) -> tuple[int, int]:
    """Return (d_p, k) with d = p**(2k) * d_p and v_p(d_p) in {0, 1}."""
    k = 0
    while d % (p * p) == 0:
        d //= p * p
        k += 1
    return d, k


def splitting_type(K: QuadField, p: int) -> str:
    """Decomposition of the rational prime p in K."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    dp, _ = _local_radicand(K.d, p)
    if p == 2:
        if dp % 2 == 0 or dp % 4 == 3:
            return RAMIFIED
        return SPLIT if dp % 8 == 1 else INERT
    if dp % p == 0:
        return RAMIFIED
    return SPLIT if pow(dp % p, (p - 1) // 2, p) == 1 else INERT


@dataclass(frozen=True)
class Place:
    """A place of Q or of a quadratic field.

    ``index`` tells apart the two real embeddings (0: sqrt d > 0) and the two
    primes above a split p (0: sqrt d maps to the canonical p-adic root).
    """

    field: QuadField | None
    kind: str  # "real" | "complex" | "finite"
    p: int | None = None
    splitting: str | None = None
    index: int = 0
    e: int = 1
    f: int = 1

    @property
    def archimedean(self) -> bool:
        return self.p is None

    @property
    def local_degree(self) -> int:
        if self.kind == "complex":
            return 2
        return self.e * self.f

    @property
    def weight(self) -> Fraction:
        """[K_w : Q_v] / [K : Q]."""
        return Fraction(self.local_degree, field_degree(self.field))

    def conjugate(self) -> "Place":
        """The place obtained by composing with the nontrivial automorphism."""
        if self.field is None:
            return self
        if self.kind == "real" or self.splitting == SPLIT:
            return Place(self.field, self.kind, self.p, self.splitting,
                         1 - self.index, self.e, self.f)
        return self

    def __str__(self) -> str:
        if self.p is None:
            if self.field is None:
                return "inf"
            return f"inf[{self.kind}{'' if self.kind == 'complex' else self.index}]"
        if self.field is None or self.splitting != SPLIT:
            return f"{self.p}" if self.field is None else f"{self.p}[{self.splitting}]"
        return f"{self.p}[split{self.index}]"


INF = "inf"


def places_above(K: QuadField | None, v: int | str) -> list[Place]:
    """All places of K over the rational place v (a prime or ``"inf"``)."""
    if v == INF or v is None:
        if K is None:
            return [Place(None, "real")]
        if K.d > 0:
            return [Place(K, "real", index=0), Place(K, "real", index=1)]
        return [Place(K, "complex")]
    p = int(v)
    if not isprime(p):
        raise ValueError(f"{v} is not a prime or 'inf'")
    if K is None:
        return [Place(None, "finite", p)]
    kind = splitting_type(K, p)
    if kind == SPLIT:
        return [Place(K, "finite", p, SPLIT, 0, 1, 1), Place(K, "finite", p, SPLIT, 1, 1, 1)]
    if kind == INERT:
        return [Place(K, "finite", p, INERT, 0, 1, 2)]
    return [Place(K, "finite", p, RAMIFIED, 0, 2, 1)]


@dataclass(frozen=True)
class PlaceSet:
    """A finite set S of places of Q."""

    primes: frozenset[int] = frozenset()
    archimedean: bool = True

    def __post_init__(self) -> None:
        for p in self.primes:
            if not isprime(p):
                raise ValueError(f"{p} is not prime")

    @classmethod
    def parse(cls, items: Iterable[int | str]) -> "PlaceSet":
        primes, arch = set(), False
        for it in items:
            if isinstance(it, str) and it.strip().lower() in ("inf", "infinity", "oo", "∞"):
                arch = True
            else:
                primes.add(int(it))
        return cls(frozenset(primes), arch)

    def base_places(self) -> list[int | str]:
        out: list[int | str] = [INF] if self.archimedean else []
        return out + sorted(self.primes)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Place):
            return self.archimedean if item.archimedean else item.p in self.primes
        if item == INF:
            return self.archimedean
        return item in self.primes

    def __len__(self) -> int:
        return len(self.primes) + int(self.archimedean)

    def lift(self, K: QuadField | None) -> list[Place]:
        """S_K: the places of K above S, in a fixed order."""
        return [w for v in self.base_places() for w in places_above(K, v)]

    def __str__(self) -> str:
        return "{" + ",".join(str(v) for v in self.base_places()) + "}"


# ---------------------------------------------------------------------------
# valuations


@lru_cache(maxsize=8192)
def _canonical_root_mod_p(dp: int, p: int) -> int:
    """The square root of the unit dp labelled index 0 (reduced mod p or 8)."""
    if p == 2:
        return 1
    roots = sqrt_mod(dp % p, p, all_roots=True)
    return min(roots)


def padic_sqrt(dp: int, p: int, k: int) -> int:
    """Square root of the p-adic unit dp modulo p**k, lifting the index-0 root."""
    if p == 2:
        # dp = 1 mod 8; the root = 1 mod 4 is lifted bit by bit.
        r, j = 1, 3
        while j < k + 1:
            if (r * r - dp) % (1 << (j + 1)):
                r += 1 << (j - 1)
            j += 1
        return r % (1 << k)
    r = _canonical_root_mod_p(dp, p)
    mod, j = p, 1
    while j < k:
        j = min(2 * j, k)
        mod = p ** j
        r = (r - (r * r - dp) * pow(2 * r, -1, mod)) % mod
    return r % p ** k


def _split_valuation(A: int, B: int, d: int, p: int, index: int, depth: int) -> int:
    dp, kk = _local_radicand(d, p)
    r = padic_sqrt(dp, p, depth) * p ** kk
    if index:
        r = -r
    mod = p ** depth
    t = (A + B * r) % mod
    if t == 0:
        raise PrecisionExhausted(f"lift depth {depth} at p={p}")
    return _vp(t, p)


def valuation(x: Number, P: Place) -> int:
    """The normalized (integer-valued) valuation v_P(x) at a finite place."""
    x = QuadElem.coerce(x)
    if not x:
        raise ZeroElement("valuation of 0")
    if P.p is None:
        raise ValueError("valuation needs a finite place")
    if x.field is not None and x.field != P.field:
        raise FieldMismatch(f"element of {x.field} at place of {P.field}")
    p = P.p
    if P.field is None or P.splitting in (INERT, RAMIFIED):
        if x.is_rational():
            return P.e * _vp_rat(x.a, p)
        A, B, D = x.integral_parts()
        vn = _vp(A * A - P.field.d * B * B, p)
        core = vn // 2 if P.splitting == INERT else vn
        return core - P.e * _vp(D, p)
    # split place
    if x.is_rational():
        return _vp_rat(x.a, p)
    A, B, D = x.integral_parts()
    depth = _vp(A * A - P.field.d * B * B, p) + 8
    while True:
        try:
            v = _split_valuation(A, B, P.field.d, p, P.index, depth)
            break
        except PrecisionExhausted:
            depth *= 2
    return v - _vp(D, p)


# ---------------------------------------------------------------------------
# logarithmic absolute values


@lru_cache(maxsize=1024)
def _log_int_cached(n: int, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.log(n)


def _log_int(n: int) -> mpmath.mpf:
    return _log_int_cached(n, mpmath.mp.prec)


def _log_rat(q: Fraction) -> mpmath.mpf:
    q = abs(q)
    return mpmath.log(q.numerator) - mpmath.log(q.denominator)


def _log_embedding(x: QuadElem, sign: int) -> mpmath.mpf:
    """log|sigma(x)| for the real embedding sqrt d -> sign * sqrt d."""
    if x.is_rational():
        return _log_rat(x.a)
    t = sign * x.b
    if x.a == 0 or (x.a > 0) == (t > 0):
        a = mpmath.mpf(x.a.numerator) / x.a.denominator
        bb = mpmath.mpf(t.numerator) / t.denominator
        return mpmath.log(abs(a + bb * mpmath.sqrt(x.field.d)))
    # opposite signs: evaluate through the conjugate to avoid cancellation
    a = mpmath.mpf(x.a.numerator) / x.a.denominator
    bb = mpmath.mpf(t.numerator) / t.denominator
    return _log_rat(x.norm()) - mpmath.log(abs(a - bb * mpmath.sqrt(x.field.d)))


def _log_abs(x: QuadElem, P: Place) -> mpmath.mpf:
    """log|x|_P at the ambient mpmath precision."""
    deg = field_degree(P.field)
    if P.p is not None:
        v = valuation(x, P)
        if v == 0:
            return mpmath.mpf(0)
        return -(P.f * v) * _log_int(P.p) / deg
    if x.field is not None and x.field != P.field:
        raise FieldMismatch(f"element of {x.field} at place of {P.field}")
    if not x:
        raise ZeroElement("log of 0")
    if P.kind == "complex":
        return _log_rat(x.norm()) / 2
    return _log_embedding(x, 1 if P.index == 0 else -1) / deg


def log_abs(x: Number, P: Place, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """The normalized log|x|_P."""
    x = QuadElem.coerce(x)
    if not x:
        raise ZeroElement("log of 0")
    with mpmath.workprec(prec + GUARD_BITS):
        return _log_abs(x, P)


def support_primes(x: QuadElem) -> list[int]:
    """Rational primes below which x can have nonzero valuation."""
    A, B, D = x.integral_parts()
    n = abs(A * A - x.d * B * B)
    return sorted(prime_divisors(D) | prime_divisors(n))


def all_places(K: QuadField | None, primes: Iterable[int]) -> Iterator[Place]:
    """Archimedean places of K followed by the places above the given primes."""
    yield from places_above(K, INF)
    for p in sorted(set(primes)):
        yield from places_above(K, p)


def product_formula_defect(x: Number, prec: int = DEFAULT_PREC,
                           field: QuadField | None = None) -> mpmath.mpf:
    """Sum of log|x|_w over every place of the field; zero up to rounding.

    ``field`` allows evaluating a rational x over a quadratic field.
    """
    x = QuadElem.coerce(x)
    if not x:
        raise ZeroElement("product formula for 0")
    K = x.field if field is None else field
    if x.field is not None and x.field != K:
        raise FieldMismatch(f"element of {x.field} over {K}")
    with mpmath.workprec(prec + GUARD_BITS):
        total = mpmath.mpf(0)
        for w in all_places(K, support_primes(x)):
            total += _log_abs(x, w)
        return total


def is_s_unit(x: Number, S: PlaceSet, K: QuadField | None = None) -> bool:
    """True when x has valuation zero at every finite place outside S."""
    x = QuadElem.coerce(x)
    if not x:
        raise ZeroElement("0 is not a unit")
    if K is None:
        K = x.field
    for p in support_primes(x):
        if p in S.primes:
            continue
        if any(valuation(x, w) != 0 for w in places_above(K, p)):
            return False
    return True
