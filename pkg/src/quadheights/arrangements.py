"""Line arrangements in P^2 and the symmetric-square embedding Sym^2 P^2 -> P^5.

A pair of plane points (x, y, z), (x~, y~, z~) maps to

    (x x~, y y~, z z~, x y~ + x~ y, x z~ + x~ z, y z~ + y~ z),

and a line l = a x + b y + c z pulls back from the hyperplane with
coefficient vector (a^2, b^2, c^2, ab, ac, bc), i.e.

    l(x, y, z) * l(x~, y~, z~) = H(image coordinates).
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import mpmath
import sympy

from .heights import (
    Arrangement,
    HyperForm,
    PointOnDivisor,
    ProjPoint,
    UnsupportedDegree,
    canonicalize,
    height,
    line,
    proximity,
)
from .linalg import det, nullspace, rank
from .numfield import DEFAULT_PREC, GUARD_BITS, Number, PlaceSet, QuadElem

LineLike = HyperForm | Sequence[int]


class TooFewForms(ValueError):
    pass


def as_line(l: LineLike) -> HyperForm:
    if isinstance(l, HyperForm):
        if l.degree != 1 or l.n != 2:
            raise ValueError(f"{l} is not a line in P^2")
        return l
    return line(*l)


def _coeffs(lines: Iterable[LineLike]) -> list[tuple[int, ...]]:
    return [as_line(l).linear_coefficients() for l in lines]


def general_position(lines: Iterable[LineLike]) -> bool:
    """Pairwise distinct and no three concurrent."""
    rows = _coeffs(lines)
    if len(set(rows)) != len(rows):
        return False
    if len(rows) < 3:
        return all(rank([a, b]) == 2 for a, b in combinations(rows, 2))
    return all(det(list(t)) != 0 for t in combinations(rows, 3))


def _no_common_zero(forms: Sequence[HyperForm]) -> bool:
    # Empty projective zero set <=> the ideal is zero-dimensional, i.e. every
    # variable has a pure power among the Groebner leading monomials.
    nvars = forms[0].n + 1
    xs = sympy.symbols(f"x0:{nvars}")
    polys = [sum(c * sympy.prod(x ** k for x, k in zip(xs, e)) for e, c in f.terms)
             for f in forms]
    G = sympy.groebner(polys, *xs, order="grevlex")
    if list(G.exprs) == [1]:
        return True
    leads = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    return all(any(m[i] > 0 and sum(m) == m[i] for m in leads) for i in range(nvars))


def m_subgeneral(forms: Sequence[LineLike | HyperForm], m: int) -> bool:
    """Every m+1 of the forms have no common zero in P^n."""
    fs = [f if isinstance(f, HyperForm) else HyperForm.linear(f) for f in forms]
    if len(fs) <= m:
        raise TooFewForms(f"need more than {m} forms, got {len(fs)}")
    n = fs[0].n
    if all(f.degree == 1 for f in fs):
        rows = [f.linear_coefficients() for f in fs]
        return all(rank(list(sub)) == n + 1 for sub in combinations(rows, m + 1))
    return all(_no_common_zero(list(sub)) for sub in combinations(fs, m + 1))


def dual_point(l: LineLike) -> ProjPoint:
    return canonicalize(as_line(l).linear_coefficients())


def veronese_row(l: LineLike) -> tuple[int, ...]:
    a, b, c = as_line(l).linear_coefficients()
    return (a * a, b * b, c * c, a * b, a * c, b * c)


def conic_dependence(lines: Sequence[LineLike]) -> list[tuple[int, ...]]:
    """Null space of the Veronese-row matrix.

    A null vector (d1..d6) is the conic d1 x^2 + d2 y^2 + d3 z^2 + d4 xy +
    d5 xz + d6 yz through all the dual points; it is nontrivial exactly when
    the products l_i(x,y,z) l_i(x~,y~,z~) are linearly dependent.
    """
    if len(lines) != 6:
        raise ValueError("conic_dependence takes six lines")
    return nullspace([veronese_row(l) for l in lines])


def five_rank_check(lines: Sequence[LineLike]) -> bool:
    """Every five of the pulled-back hyperplanes in P^5 meet in a single point."""
    rows = [veronese_row(l) for l in lines]
    if len(rows) < 5:
        raise TooFewForms("five_rank_check needs at least five lines")
    return all(rank(list(sub)) == 5 for sub in combinations(rows, 5))


def no_four_concurrent(lines: Sequence[LineLike]) -> bool:
    rows = _coeffs(lines)
    return all(rank(list(sub)) == 3 for sub in combinations(rows, 4)) if len(rows) >= 4 else True


# ---------------------------------------------------------------------------
# symmetric square


def _sym2_coords(P: Sequence[QuadElem], Q: Sequence[QuadElem]) -> list[QuadElem]:
    x, y, z = P
    u, v, w = Q
    return [x * u, y * v, z * w, x * v + u * y, x * w + u * z, y * w + v * z]


def sym2_embed(P: ProjPoint | Sequence[Number], Q: ProjPoint | Sequence[Number]) -> ProjPoint:
    P = canonicalize(P)
    Q = canonicalize(Q)
    if P.n != 2 or Q.n != 2:
        raise ValueError("sym2_embed takes two points of P^2")
    return canonicalize(_sym2_coords(P.coords, Q.coords))


def sym2_point(P: ProjPoint | Sequence[Number]) -> ProjPoint:
    """The rational point of P^5 representing {P, conjugate(P)}."""
    P = canonicalize(P)
    if P.degree != 2:
        raise UnsupportedDegree("sym2_point needs a quadratic point; use sym2_embed(P, P)")
    img = canonicalize(_sym2_coords(P.coords, [x.conjugate() for x in P.coords]))
    assert img.is_rational()
    return img


def line_sq_hyperplane(l: LineLike) -> HyperForm:
    return HyperForm.linear(veronese_row(l))


def pullback_residual(l: LineLike) -> sympy.Expr:
    """l(x,y,z) l(x~,y~,z~) - H(sym2 coordinates), expanded; zero identically."""
    x, y, z, u, v, w = sympy.symbols("x y z u v w")
    a, b, c = as_line(l).linear_coefficients()
    lhs = (a * x + b * y + c * z) * (a * u + b * v + c * w)
    H = line_sq_hyperplane(l).linear_coefficients()
    img = [x * u, y * v, z * w, x * v + u * y, x * w + u * z, y * w + v * z]
    rhs = sum(h * t for h, t in zip(H, img))
    return sympy.expand(lhs - rhs)


def height_product_defect(P: ProjPoint | Sequence[Number], Q: ProjPoint | Sequence[Number],
                          prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """h(sym2_embed(P, Q)) - h(P) - h(Q); at most log 2."""
    P = canonicalize(P)
    Q = canonicalize(Q)
    with mpmath.workprec(prec + GUARD_BITS):
        return height(sym2_embed(P, Q), prec) - height(P, prec) - height(Q, prec)


def proximity_transfer_defect(l: LineLike, S: PlaceSet, P: ProjPoint | Sequence[Number],
                              prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """m_{H,S}(sym2_point(P)) - 2 m_{l,S}(P) for a quadratic point P."""
    P = canonicalize(P)
    L = as_line(l)
    if P.degree != 2:
        raise UnsupportedDegree("transfer defect is defined for quadratic points")
    if not L(P.coords):
        raise PointOnDivisor(f"{P} lies on {L}")
    with mpmath.workprec(prec + GUARD_BITS):
        return (proximity(line_sq_hyperplane(L), S, sym2_point(P), prec)
                - 2 * proximity(L, S, P, prec))


def intersection_point(l1: LineLike, l2: LineLike) -> ProjPoint:
    a = as_line(l1).linear_coefficients()
    b = as_line(l2).linear_coefficients()
    cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    return canonicalize(cross)


def line_through(P: ProjPoint | Sequence[Number], Q: ProjPoint | Sequence[Number]) -> HyperForm:
    P = canonicalize(P).int_coords()
    Q = canonicalize(Q).int_coords()
    cross = (P[1] * Q[2] - P[2] * Q[1], P[2] * Q[0] - P[0] * Q[2], P[0] * Q[1] - P[1] * Q[0])
    return line(*cross)


def candidate_exceptional_lines(lines: Sequence[LineLike]) -> list[HyperForm]:
    """The given lines plus every line through four distinct intersection
    points of them.  Reported as candidates only; completeness is not claimed."""
    Ls = [as_line(l) for l in lines]
    pts = sorted({intersection_point(a, b) for a, b in combinations(Ls, 2)},
                 key=lambda p: p.int_coords())
    found = list(Ls)
    seen = set(Ls)
    for P, Q in combinations(pts, 2):
        L = line_through(P, Q)
        if L in seen:
            continue
        on = sum(1 for R in pts if not L(R.coords))
        if on >= 4:
            seen.add(L)
            found.append(L)
    return found


def arrangement_from_json(rows: Sequence[Sequence[int]]) -> Arrangement:
    return Arrangement([HyperForm.linear(r) for r in rows])
