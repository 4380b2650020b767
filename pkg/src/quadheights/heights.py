"""Projective points, homogeneous forms, heights and local Weil functions.

The representative of each Weil function is fixed by the max-formula

    lambda_{H,w}(P) = d * log max_i |x_i|_w - log |f(P)|_w

applied to the canonical coordinates of P and the coprime-integer
normalization of f.  All constants reported elsewhere refer to this choice.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .numfield import (
    DEFAULT_PREC,
    GUARD_BITS,
    FieldMismatch,
    Number,
    Place,
    PlaceSet,
    QuadElem,
    QuadField,
    _log_abs,
    all_places,
    field_degree,
    prime_divisors,
    valuation,
)


class AllZero(ValueError):
    pass


class PointOnDivisor(ValueError):
    pass


class ZeroHeight(ValueError):
    pass


class UnsupportedDegree(ValueError):
    pass


def _common_field(xs: Iterable[QuadElem]) -> QuadField | None:
    K = None
    for x in xs:
        if x.field is None:
            continue
        if K is None:
            K = x.field
        elif x.field != K:
            raise FieldMismatch(f"coordinates in {K} and {x.field}")
    return K


def _sign_normalize(parts: list[int]) -> int:
    for c in parts:
        if c:
            return 1 if c > 0 else -1
    return 1


class ProjPoint:
    """A point of P^n with coordinates in Q or one quadratic field.

    Always built through ``canonicalize``: the coordinates are scaled so the
    last nonzero one is rational, then put in Z[sqrt d] with coprime integer
    components and the first nonzero component positive.  Two inputs give the
    same ProjPoint exactly when they are the same projective point.
    ``field`` is the field generated by the coordinate ratios.
    """

    __slots__ = ("coords", "field")

    def __init__(self, coords: tuple[QuadElem, ...], field: QuadField | None) -> None:
        self.coords = coords
        self.field = field

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def degree(self) -> int:
        return field_degree(self.field)

    def is_rational(self) -> bool:
        return self.field is None

    def conjugate(self) -> "ProjPoint":
        return canonicalize([x.conjugate() for x in self.coords])

    def int_coords(self) -> tuple[int, ...]:
        if self.field is not None:
            raise UnsupportedDegree("point is not rational")
        return tuple(int(x.a) for x in self.coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> QuadElem:
        return self.coords[i]

    def __repr__(self) -> str:
        return "(" + " : ".join(str(x) for x in self.coords) + ")"


def canonicalize(raw: Sequence[Number] | ProjPoint) -> ProjPoint:
    if isinstance(raw, ProjPoint):
        raw = raw.coords
    xs = [QuadElem.coerce(x) for x in raw]
    if len(xs) < 2:
        raise ValueError("a projective point needs at least two coordinates")
    if not any(xs):
        raise AllZero("all coordinates are zero")
    K = _common_field(xs)
    if K is not None:
        # dividing by the last nonzero coordinate makes the representative
        # depend only on the point, not on the scaling of the input
        last = next(x for x in reversed(xs) if x)
        xs = [x / last for x in xs]
        if all(r.is_rational() for r in xs):
            K = None
    den = math.lcm(*(c.denominator for x in xs for c in (x.a, x.b)))
    parts = [int(c * den) for x in xs for c in (x.a, x.b)]
    g = math.gcd(*parts) * _sign_normalize(parts)
    coords = tuple(QuadElem(parts[2 * i] // g, parts[2 * i + 1] // g, K)
                   for i in range(len(xs)))
    return ProjPoint(coords, K)


def point(*coords: Number) -> ProjPoint:
    return canonicalize(coords)


# ---------------------------------------------------------------------------
# forms


def _exponents(nvars: int, degree: int):
    """Exponent vectors of the given degree, x_0 heaviest first."""
    if nvars == 1:
        yield (degree,)
        return
    for e in range(degree, -1, -1):
        for rest in _exponents(nvars - 1, degree - e):
            yield (e,) + rest


class HyperForm:
    """A homogeneous form over Q, normalized to coprime integer coefficients
    whose leading term (in descending lex order) is positive."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, terms: dict[tuple[int, ...], int | Fraction]) -> None:
        items = {tuple(e): Fraction(c) for e, c in terms.items() if c}
        if not items:
            raise ValueError("the zero form defines no hypersurface")
        lengths = {len(e) for e in items}
        degrees = {sum(e) for e in items}
        if len(lengths) != 1 or len(degrees) != 1:
            raise ValueError("form is not homogeneous")
        nvars, = lengths
        deg, = degrees
        if deg < 1 or nvars < 2:
            raise ValueError("need degree >= 1 in at least two variables")
        den = math.lcm(*(c.denominator for c in items.values()))
        ints = {e: int(c * den) for e, c in items.items()}
        order = sorted(ints, reverse=True)
        g = math.gcd(*ints.values())
        if ints[order[0]] < 0:
            g = -g
        self.n = nvars - 1
        self.degree = deg
        self.terms = tuple((e, ints[e] // g) for e in order)

    @classmethod
    def linear(cls, coeffs: Sequence[int | Fraction]) -> "HyperForm":
        m = len(coeffs)
        return cls({tuple(int(i == j) for j in range(m)): c for i, c in enumerate(coeffs)})

    @classmethod
    def from_coefficients(cls, nvars: int, degree: int,
                          coeffs: Sequence[int | Fraction]) -> "HyperForm":
        """Coefficients listed in the order of descending-lex exponent vectors."""
        exps = list(_exponents(nvars, degree))
        if len(coeffs) != len(exps):
            raise ValueError(f"expected {len(exps)} coefficients")
        return cls(dict(zip(exps, coeffs)))

    def linear_coefficients(self) -> tuple[int, ...]:
        if self.degree != 1:
            raise ValueError("form is not linear")
        out = [0] * (self.n + 1)
        for e, c in self.terms:
            out[e.index(1)] = c
        return tuple(out)

    def __call__(self, coords: Sequence[Number]) -> QuadElem:
        if len(coords) != self.n + 1:
            raise ValueError("dimension mismatch")
        xs = [QuadElem.coerce(x) for x in coords]
        total = QuadElem(0)
        for e, c in self.terms:
            term = QuadElem(c)
            for x, k in zip(xs, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def l1_norm(self) -> int:
        return sum(abs(c) for _, c in self.terms)

    def coefficient_constant(self, prec: int = DEFAULT_PREC) -> mpmath.mpf:
        """log of the sum of |coefficients|.

        At an archimedean place w, lambda_{H,w} >= -weight(w) * this value,
        and at finite places lambda_{H,w} >= 0, so the sum of lambda over any
        set of places is at least minus this constant.
        """
        with mpmath.workprec(prec + GUARD_BITS):
            return mpmath.log(self.l1_norm())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HyperForm):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        names = "xyz" if self.n == 2 else None
        out = []
        for e, c in self.terms:
            mono = "*".join(
                (names[i] if names else f"x{i}") + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e) if k)
            out.append(f"{c:+d}" + ("*" + mono if mono else ""))
        return "HyperForm(" + " ".join(out) + ")"


def line(a: int, b: int, c: int) -> HyperForm:
    return HyperForm.linear((a, b, c))


class Arrangement:
    """An ordered collection of pairwise distinct forms on a common P^n."""

    __slots__ = ("forms",)

    def __init__(self, forms: Iterable[HyperForm | Sequence[int]]) -> None:
        fs = tuple(f if isinstance(f, HyperForm) else HyperForm.linear(f) for f in forms)
        if not fs:
            raise ValueError("empty arrangement")
        if len({f.n for f in fs}) != 1:
            raise ValueError("forms live on different projective spaces")
        if len(set(fs)) != len(fs):
            raise ValueError("arrangement has repeated components")
        self.forms = fs

    @property
    def n(self) -> int:
        return self.forms[0].n

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.forms)

    def __iter__(self):
        return iter(self.forms)

    def __len__(self) -> int:
        return len(self.forms)

    def __getitem__(self, i: int) -> HyperForm:
        return self.forms[i]

    def coefficient_constant(self, prec: int = DEFAULT_PREC) -> mpmath.mpf:
        """C(D) with m_{D,S}(P) <= deg(D) * h(P) + C(D) for every S and P."""
        with mpmath.workprec(prec + GUARD_BITS):
            return mpmath.fsum(mpmath.log(f.l1_norm()) for f in self.forms)

    def __repr__(self) -> str:
        return f"Arrangement({list(self.forms)})"


def _components(D: Arrangement | HyperForm | Iterable[HyperForm]) -> tuple[HyperForm, ...]:
    if isinstance(D, HyperForm):
        return (D,)
    if isinstance(D, Arrangement):
        return D.forms
    return Arrangement(D).forms


# ---------------------------------------------------------------------------
# heights


def _check_place(P: ProjPoint, w: Place) -> None:
    if P.field is not None and w.field != P.field:
        raise FieldMismatch(f"place of {w.field} for a point over {P.field}")


def _log_max(coords: Sequence[QuadElem], w: Place) -> mpmath.mpf:
    nz = [x for x in coords if x]
    if w.p is not None:
        v = min(valuation(x, w) for x in nz)
        if v == 0:
            return mpmath.mpf(0)
        return -(w.f * v) * mpmath.log(w.p) / field_degree(w.field)
    return max(_log_abs(x, w) for x in nz)


def _height_primes(coords: Sequence[QuadElem]) -> set[int]:
    """Primes where max_i |x_i|_w can differ from 1."""
    den = math.lcm(*(c.denominator for x in coords for c in (x.a, x.b)))
    g = 0
    for x in coords:
        if x:
            y = x * den
            g = math.gcd(g, int(y.norm()))
    return prime_divisors(den) | prime_divisors(g)


def height_by_places(coords: Sequence[Number], field: QuadField | None = None,
                     prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """sum_w log max_i |x_i|_w over all places of ``field`` (or of the
    coordinates' own field), without any rescaling of the coordinates."""
    xs = [QuadElem.coerce(x) for x in coords]
    if not any(xs):
        raise AllZero("all coordinates are zero")
    K = _common_field(xs)
    if field is not None:
        if K is not None and K != field:
            raise FieldMismatch(f"coordinates over {K} summed over {field}")
        K = field
    with mpmath.workprec(prec + GUARD_BITS):
        return mpmath.fsum(_log_max(xs, w) for w in all_places(K, _height_primes(xs)))


def height(P: ProjPoint | Sequence[Number], prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Absolute logarithmic Weil height."""
    if not isinstance(P, ProjPoint):
        P = canonicalize(P)
    if P.field is None:
        with mpmath.workprec(prec + GUARD_BITS):
            return mpmath.log(max(abs(c) for c in P.int_coords()))
    return height_by_places(P.coords, P.field, prec)


def relative_height_factor(P: ProjPoint) -> int:
    """[K(P):Q]; log H_{K(P)}(P) = factor * h(P)."""
    return P.degree


_ROOT_OF_UNITY_EXPONENT = 12  # every root of unity in a quadratic field has order | 4 or 6


def has_zero_height(P: ProjPoint) -> bool:
    """Exact test: h(P) = 0 iff all nonzero coordinate ratios are roots of unity."""
    nz = [x for x in P.coords if x]
    lead = nz[0]
    return all((x / lead) ** _ROOT_OF_UNITY_EXPONENT == 1 for x in nz[1:])


# ---------------------------------------------------------------------------
# Weil functions and proximity


def _local_weil(H: HyperForm, P: ProjPoint, w: Place, fP: QuadElem) -> mpmath.mpf:
    return H.degree * _log_max(P.coords, w) - _log_abs(fP, w)


def _eval_off(H: HyperForm, P: ProjPoint) -> QuadElem:
    if H.n != P.n:
        raise ValueError(f"form on P^{H.n}, point in P^{P.n}")
    fP = H(P.coords)
    if not fP:
        raise PointOnDivisor(f"{P} lies on {H}")
    return fP


def local_weil(H: HyperForm, P: ProjPoint, w: Place, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    _check_place(P, w)
    fP = _eval_off(H, P)
    with mpmath.workprec(prec + GUARD_BITS):
        return _local_weil(H, P, w, fP)


def proximity(D: Arrangement | HyperForm | Iterable[HyperForm], S: PlaceSet,
              P: ProjPoint, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """m_{D,S}(P): local Weil functions summed over places of K(P) above S."""
    if not isinstance(P, ProjPoint):
        P = canonicalize(P)
    if P.degree > 2:
        raise UnsupportedDegree("points of degree > 2 are not supported")
    comps = _components(D)
    values = [(H, _eval_off(H, P)) for H in comps]
    places = S.lift(P.field)
    with mpmath.workprec(prec + GUARD_BITS):
        logmax = {w: _log_max(P.coords, w) for w in places}
        return mpmath.fsum(H.degree * logmax[w] - _log_abs(fP, w)
                           for H, fP in values for w in places)


def weil_sum_defect(H: HyperForm, P: ProjPoint, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """(sum of lambda_{H,w}(P) over all places w) - deg(H) * h(P)."""
    if not isinstance(P, ProjPoint):
        P = canonicalize(P)
    fP = _eval_off(H, P)
    primes = _height_primes(P.coords)
    A, B, Dn = fP.integral_parts()
    primes |= prime_divisors(Dn) | prime_divisors(A * A - fP.d * B * B)
    with mpmath.workprec(prec + GUARD_BITS):
        total = mpmath.fsum(_local_weil(H, P, w, fP) for w in all_places(P.field, primes))
        return total - H.degree * height(P, prec)


def ratio(D: Arrangement | HyperForm | Iterable[HyperForm], S: PlaceSet, P: ProjPoint,
          prec: int = DEFAULT_PREC) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """(h(P), m_{D,S}(P), m/h)."""
    if not isinstance(P, ProjPoint):
        P = canonicalize(P)
    if has_zero_height(P):
        raise ZeroHeight(f"{P} has height 0")
    h = height(P, prec)
    m = proximity(D, S, P, prec)
    with mpmath.workprec(prec + GUARD_BITS):
        return h, m, m / h
