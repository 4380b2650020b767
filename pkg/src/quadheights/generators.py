"""Families of points that are S-integral with respect to 2*delta points of P^1.

If phi = F/G : P^1 -> P^1 has phi^*(0) = P_1 + ... + P_delta and
phi^*(inf) = P_{delta+1} + ... + P_{2 delta}, then every solution of
F(x, y) = u G(x, y) with u an S-unit has degree <= delta, and summing the
proximity to the P_i over S gives 2*delta*h(P) + O(1).  The constructions
below push these points into the plane (onto a line, or onto the conic
y^2 = xz) to produce the extremal configurations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Sequence

import mpmath
import sympy

from .arrangements import general_position
from .heights import (
    Arrangement,
    HyperForm,
    ProjPoint,
    canonicalize,
    has_zero_height,
    height,
    line,
    proximity,
)
from .linalg import rank
from .numfield import DEFAULT_PREC, GUARD_BITS, PlaceSet, QuadElem, is_s_unit

log = logging.getLogger(__name__)


class DegenerateDiscriminant(ArithmeticError):
    pass


class ConstructionFailed(RuntimeError):
    pass


def s_units_Q(S: PlaceSet, max_exp: int) -> list[Fraction]:
    """All +-prod p^e_p (p finite in S, |e_p| <= max_exp), ordered by
    exponent vector (lexicographic, primes ascending), then sign + before -."""
    if not S.archimedean:
        raise ValueError("S must contain the archimedean place")
    if max_exp < 0:
        raise ValueError("max_exp must be nonnegative")
    primes = sorted(S.primes)
    out = []
    for exps in product(range(-max_exp, max_exp + 1), repeat=len(primes)):
        u = Fraction(1)
        for p, e in zip(primes, exps):
            u *= Fraction(p) ** e
        out.extend((u, -u))
    return out


# ---------------------------------------------------------------------------
# binary forms


def _root_form(pt: Sequence[int]) -> tuple[int, int]:
    """Coefficients (of x, y) of the linear form vanishing at (a : b),
    sign-normalized like a HyperForm."""
    f = HyperForm.linear((pt[1], -pt[0]))
    return f.linear_coefficients()


def _mul(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return tuple(out)


def _eval_binary(coeffs: Sequence[int], x: QuadElem, y: QuadElem) -> QuadElem:
    deg = len(coeffs) - 1
    total = QuadElem(0)
    for i, c in enumerate(coeffs):
        if c:
            total = total + c * x ** (deg - i) * y ** i
    return total


def _rational_roots(coeffs: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Roots on P^1 of a binary form that splits over Q, with multiplicity."""
    x, y = sympy.symbols("x y")
    deg = len(coeffs) - 1
    poly = sum(int(c) * x ** (deg - i) * y ** i for i, c in enumerate(coeffs))
    if poly == 0:
        raise ValueError("zero form")
    roots: list[tuple[int, int]] = []
    for fac, mult in sympy.factor_list(poly)[1]:
        p = sympy.Poly(fac, x, y)
        if p.total_degree() != 1:
            raise ValueError(f"{coeffs} does not split over Q")
        a, b = int(p.coeff_monomial(x)), int(p.coeff_monomial(y))
        roots.extend([(-b, a)] * mult)
    return tuple(roots)


def _p1(pt: Sequence[int]) -> tuple[int, int]:
    return canonicalize(pt).int_coords()


@dataclass(frozen=True)
class BinaryFormPair:
    """F, G of degree delta with F's roots ``zeros`` and G's roots ``poles``.

    Coefficients are listed from x^delta down to y^delta.
    """

    zeros: tuple[tuple[int, int], ...]
    poles: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        zs = tuple(_p1(p) for p in self.zeros)
        ps = tuple(_p1(p) for p in self.poles)
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "poles", ps)
        if len(zs) != len(ps) or len(zs) not in (1, 2):
            raise ValueError("need delta zeros and delta poles, delta in {1, 2}")
        if set(zs) & set(ps):
            raise ValueError("F and G share a root")

    @classmethod
    def from_coefficients(cls, F: Sequence[int], G: Sequence[int]) -> "BinaryFormPair":
        """Build the pair from coefficient lists (x^delta first); both forms
        must split into linear factors over Q."""
        if len(F) != len(G) or len(F) not in (2, 3):
            raise ValueError("F and G need equal degree 1 or 2")
        pair = cls(_rational_roots(F), _rational_roots(G))
        for given, built in ((F, pair.F), (G, pair.G)):
            proportional = all(given[i] * built[j] == given[j] * built[i]
                               for i in range(len(given)) for j in range(len(given)))
            if not proportional:
                raise ValueError(f"{given} is not determined by its roots")
        return pair

    @property
    def delta(self) -> int:
        return len(self.zeros)

    @property
    def F(self) -> tuple[int, ...]:
        out: tuple[int, ...] = (1,)
        for z in self.zeros:
            out = _mul(out, _root_form(z))
        return out

    @property
    def G(self) -> tuple[int, ...]:
        out: tuple[int, ...] = (1,)
        for z in self.poles:
            out = _mul(out, _root_form(z))
        return out

    def points(self) -> tuple[tuple[int, int], ...]:
        return self.zeros + self.poles

    def divisor_forms(self) -> list[HyperForm]:
        """The 2*delta points as linear forms on P^1."""
        return [HyperForm.linear(_root_form(p)) for p in self.points()]


@dataclass
class StreamPoint:
    point: ProjPoint
    u: Fraction
    index: int
    degenerate: bool = False
    integrality_defect: mpmath.mpf | None = None


@dataclass
class PointStream:
    family: str
    points: list[StreamPoint] = field(default_factory=list)

    def __iter__(self) -> Iterator[StreamPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def map(self, fn, family: str | None = None) -> "PointStream":
        return PointStream(family or self.family,
                           [StreamPoint(fn(sp.point), sp.u, sp.index, sp.degenerate,
                                        sp.integrality_defect) for sp in self.points])


def fiber(pair: BinaryFormPair, u: Fraction) -> list[tuple[ProjPoint, bool]]:
    """Points of P^1 with F = u G and G != 0, flagged when the fiber is a
    double point (emitted once)."""
    F, G = pair.F, pair.G
    Q = [Fraction(f) - u * g for f, g in zip(F, G)]
    if pair.delta == 1:
        a, b = Q
        pts = [((-b, a), False)]
    else:
        A, B, C = Q
        if A == 0:
            # (1 : 0) is a root; the other is (-C : B)
            pts = [((1, 0), False), ((-C, B), False)]
        else:
            disc = B * B - 4 * A * C
            if disc == 0:
                pts = [((-B, 2 * A), True)]
            else:
                root = QuadElem.sqrt(disc)
                pts = [((-B + root, 2 * A), False), ((-B - root, 2 * A), False)]
    out = []
    for (x, y), degen in pts:
        P = canonicalize((x, y))
        xs, ys = P.coords
        g = _eval_binary(G, xs, ys)
        if not g:
            continue
        if _eval_binary(F, xs, ys) != u * g:
            raise ArithmeticError(f"fiber point {P} fails F = {u} G")
        out.append((P, degen))
    return out


def integrality_defect(pair: BinaryFormPair, S: PlaceSet, P: ProjPoint,
                       prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """sum_i m_{P_i,S}(P) - 2 delta h(P) on P^1."""
    with mpmath.workprec(prec + GUARD_BITS):
        return (proximity(pair.divisor_forms(), S, P, prec)
                - 2 * pair.delta * height(P, prec))


def unit_fibers(pair: BinaryFormPair, S: PlaceSet, max_exp: int,
                prec: int = DEFAULT_PREC, record_defect: bool = True) -> PointStream:
    stream = PointStream(f"fibers(delta={pair.delta})")
    idx = 0
    for u in s_units_Q(S, max_exp):
        for P, degen in fiber(pair, u):
            if degen:
                log.info("double fiber point at u=%s: %s", u, P)
            x, y = P.coords
            assert is_s_unit(_eval_binary(pair.F, x, y) / _eval_binary(pair.G, x, y), S)
            sp = StreamPoint(P, u, idx, degen)
            if record_defect:
                sp.integrality_defect = integrality_defect(pair, S, P, prec)
            stream.points.append(sp)
            idx += 1
    return stream


# ---------------------------------------------------------------------------
# Example: 2*delta*n hyperplanes whose groups meet at collinear points


# Certified delta = 2 instance on the carrier z = 0 (re-derived by scripts/search_exinf.py):
# groups {0,1}, {2,3}, {4,5}, {6,7} meet at (1:0:0), (0:1:0), (1:1:0), (1:-1:0).
EXINF_22_LINES = (
    (0, 1, -1), (0, 1, 1),
    (1, 0, 1), (1, 0, -1),
    (1, -1, 3), (1, -1, -3),
    (1, 1, -3), (1, 1, 3),
)
EXINF_CARRIER_POINTS = {1: ((1, 0), (0, 1)), 2: ((1, 0), (0, 1), (1, 1), (1, -1))}


@dataclass(frozen=True)
class ExinfConfig:
    n: int
    delta: int
    arrangement: Arrangement
    carrier: HyperForm | None
    points: tuple[ProjPoint, ...]
    param_points: tuple[tuple[int, int], ...]
    groups: tuple[tuple[int, ...], ...]

    def embed(self, P: ProjPoint) -> ProjPoint:
        """Parametrization (s : t) -> (s : t : 0) of the carrier z = 0."""
        if self.n == 1:
            return P
        s, t = P.coords
        return canonicalize((s, t, 0))

    def pair(self) -> BinaryFormPair:
        # phi^*(0) is the second half of the points so that, for delta = 1,
        # phi = x/y and u maps to (u : 1 : 0).
        d = self.delta
        return BinaryFormPair(self.param_points[d:], self.param_points[:d])

    def validate(self) -> None:
        if self.n == 1:
            if len(set(self.points)) != 2 * self.delta:
                raise ConstructionFailed("points on P^1 are not distinct")
            return
        lines = list(self.arrangement)
        if not general_position(lines):
            raise ConstructionFailed("lines are not in general position")
        if len(set(self.points)) != len(self.points):
            raise ConstructionFailed("intersection points are not distinct")
        for grp, P in zip(self.groups, self.points):
            rows = [lines[i].linear_coefficients() for i in grp]
            if rank(rows) != self.n or any(lines[i](P.coords) for i in grp):
                raise ConstructionFailed(f"group {grp} does not meet exactly at {P}")
            if self.carrier(P.coords):
                raise ConstructionFailed(f"{P} is off the carrier line")


def search_exinf_lines(bound: int = 3) -> tuple[tuple[int, int, int], ...]:
    """Smallest-offset rational 8-line instance for n = 2, delta = 2.

    Through each carrier point (a : b : 0) the candidate lines are
    b x - a y + c z with 0 < |c| <= bound; the first general-position choice
    in (max |c|, lexicographic) order is returned.
    """
    offsets = sorted((c for c in range(-bound, bound + 1) if c), key=lambda c: (abs(c), -c))
    pairs = [tuple(sorted(p, key=lambda c: (abs(c), -c))) for p in combinations(offsets, 2)]
    pairs.sort(key=lambda p: (max(abs(c) for c in p), [(abs(c), -c) for c in p]))
    pts = EXINF_CARRIER_POINTS[2]

    def lines_for(j: int, cs: tuple[int, int]) -> list[tuple[int, int, int]]:
        a, b = pts[j]
        return [line(b, -a, c).linear_coefficients() for c in cs]

    def extend(j: int, chosen: list[tuple[int, int, int]]):
        if j == len(pts):
            return tuple(chosen)
        for cs in pairs:
            cand = chosen + lines_for(j, cs)
            if general_position(cand):
                found = extend(j + 1, cand)
                if found:
                    return found
        return None

    found = extend(0, [])
    if found is None:
        raise ConstructionFailed(f"no instance with offsets up to {bound}")
    return found


def exinf_config(n: int, delta: int) -> ExinfConfig:
    if n not in (1, 2) or delta not in (1, 2):
        raise ValueError("n and delta must be 1 or 2")
    params = EXINF_CARRIER_POINTS[delta]
    if n == 1:
        forms = [HyperForm.linear(_root_form(p)) for p in params]
        cfg = ExinfConfig(1, delta, Arrangement(forms), None,
                          tuple(canonicalize(p) for p in params), params,
                          tuple((i,) for i in range(2 * delta)))
    else:
        rows = ((0, 1, -1), (0, 1, 1), (1, 0, -1), (1, 0, 1)) if delta == 1 else EXINF_22_LINES
        cfg = ExinfConfig(2, delta, Arrangement(rows), line(0, 0, 1),
                          tuple(canonicalize((a, b, 0)) for a, b in params), params,
                          tuple((2 * j, 2 * j + 1) for j in range(2 * delta)))
    cfg.validate()
    return cfg


def _drop_trivial(stream: PointStream) -> PointStream:
    kept = [sp for sp in stream if not has_zero_height(sp.point)]
    return PointStream(stream.family, kept)


def exinf_points(config: ExinfConfig, S: PlaceSet, max_exp: int,
                 prec: int = DEFAULT_PREC, record_defect: bool = True) -> PointStream:
    if not S.archimedean or len(S) < 2:
        raise ValueError("S must contain inf and have at least two places")
    base = unit_fibers(config.pair(), S, max_exp, prec, record_defect)
    stream = base.map(config.embed, f"exinf(n={config.n},delta={config.delta})")
    return _drop_trivial(stream)


# ---------------------------------------------------------------------------
# Example: tangent lines to the conic y^2 = xz


CONIC = HyperForm({(0, 2, 0): 1, (1, 0, 1): -1})
TANGENCY_PARAMS = ((1, 0), (0, 1), (1, 1), (1, -1))


def nu(s: QuadElem | int, t: QuadElem | int) -> ProjPoint:
    """Parametrization (s : t) -> (s^2 : st : t^2) of y^2 = xz."""
    s = QuadElem.coerce(s)
    t = QuadElem.coerce(t)
    return canonicalize((s * s, s * t, t * t))


def chord(p: Sequence[int], q: Sequence[int]) -> HyperForm:
    """The line through nu(p) and nu(q); the tangent at nu(p) when p = q.

    Restricted to the conic it is (t0 s - s0 t)(t1 s - s1 t)."""
    s0, t0 = p
    s1, t1 = q
    return line(t0 * t1, -(s0 * t1 + s1 * t0), s0 * s1)


@dataclass(frozen=True)
class ExconConfig:
    conic: HyperForm
    tangency: tuple[tuple[int, int], ...]
    tangents: tuple[HyperForm, ...]
    chords: tuple[HyperForm, ...]
    chord_params: tuple[tuple[int, int], ...]
    points: tuple[ProjPoint, ...]

    @property
    def arrangement(self) -> Arrangement:
        return Arrangement(self.tangents + self.chords)

    def pair(self) -> BinaryFormPair:
        return BinaryFormPair(self.tangency[:2], self.tangency[2:])

    def validate(self) -> None:
        if not general_position(list(self.tangents + self.chords)):
            raise ConstructionFailed("the eight lines are not in general position")
        for p, L, M, P in zip(self.tangency, self.tangents, self.chords, self.points):
            if self.conic(P.coords) or L(P.coords) or M(P.coords):
                raise ConstructionFailed(f"{P} is not on the conic, its tangent and chord")
            if not is_tangent(L, self.conic):
                raise ConstructionFailed(f"{L} is not tangent to the conic")


def is_tangent(L: HyperForm, conic: HyperForm = CONIC) -> bool:
    """Tangency to y^2 = xz: L(nu(s, t)) is a perfect square binary quadratic."""
    if conic != CONIC:
        raise NotImplementedError("tangency certificate is for y^2 = xz")
    a, b, c = L.linear_coefficients()
    # a s^2 + b s t + c t^2
    return b * b - 4 * a * c == 0


def excon_config(bound: int = 3) -> ExconConfig:
    """Tangents at nu(1:0), nu(0:1), nu(1:1), nu(1:-1), and for each P_i a
    chord to a further point nu(q_i), the q_i found by ordered search."""
    tangents = tuple(chord(p, p) for p in TANGENCY_PARAMS)
    cands = sorted({_p1((s, t)) for s in range(-bound, bound + 1)
                    for t in range(0, bound + 1) if (s, t) != (0, 0)},
                   key=lambda q: (max(abs(q[0]), abs(q[1])), q[1], abs(q[0]), -q[0]))
    cands = [q for q in cands if q not in TANGENCY_PARAMS]

    def extend(i: int, chosen: list[tuple[int, int]]):
        if i == 4:
            return chosen
        for q in cands:
            if q in chosen:
                continue
            lines = list(tangents) + [chord(TANGENCY_PARAMS[j], chosen[j]) for j in range(i)]
            lines.append(chord(TANGENCY_PARAMS[i], q))
            if general_position(lines):
                found = extend(i + 1, chosen + [q])
                if found:
                    return found
        return None

    qs = extend(0, [])
    if qs is None:
        raise ConstructionFailed("no chord choice in general position")
    chords = tuple(chord(p, q) for p, q in zip(TANGENCY_PARAMS, qs))
    cfg = ExconConfig(CONIC, TANGENCY_PARAMS, tangents, chords, tuple(qs),
                      tuple(nu(*p) for p in TANGENCY_PARAMS))
    cfg.validate()
    return cfg


def excon_points(config: ExconConfig, S: PlaceSet, max_exp: int,
                 prec: int = DEFAULT_PREC, record_defect: bool = True) -> PointStream:
    if not S.archimedean or len(S) < 2:
        raise ValueError("S must contain inf and have at least two places")
    base = unit_fibers(config.pair(), S, max_exp, prec, record_defect)
    stream = base.map(lambda P: nu(*P.coords), "excon")
    return _drop_trivial(stream)
