from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sympy import primerange

from quadheights.numfield import (
    INERT,
    INF,
    RAMIFIED,
    SPLIT,
    PlaceSet,
    QuadElem,
    QuadField,
    ZeroElement,
    conjugate,
    conjugates,
    is_s_unit,
    log_abs,
    padic_sqrt,
    places_above,
    product_formula_defect,
    splitting_type,
    square_core,
    valuation,
)
from quadheights.sampling import TEST_RADICANDS

from strategies import elements, nonzero_elements, radicands

TOL = mpmath.mpf(2) ** (-192 + 8)


def near(x, ref):
    """|x - ref| <= TOL with ref evaluated at 256 bits."""
    with mpmath.workprec(256):
        return abs(x - ref()) <= TOL


def qi():
    return QuadField(-1)


# -- fields and splitting ----------------------------------------------------


@pytest.mark.parametrize("d", [0, 1, 4, 9, 12, -8])
def test_bad_radicands_rejected(d):
    with pytest.raises(ValueError):
        QuadField(d)


def test_from_radicand_strips_squares():
    K, s = QuadField.from_radicand(-12)
    assert K == QuadField(-3) and s == 2
    assert QuadField.from_radicand(49) == (None, 7)


def test_square_core_of_large_radicand():
    r = 3 * 4093**2 * 104729
    core, root = square_core(r)
    assert (core, root) == (3 * 104729, 4093)
    # a square of a prime beyond the trial bound is only absorbed when the
    # whole cofactor is a perfect square
    assert square_core(5 * 7919**2) == (5, 7919)
    core, root = square_core(3 * 7919**2 * 104729)
    assert core * root * root == 3 * 7919**2 * 104729


def test_discriminant():
    assert QuadField(5).discriminant == 5
    assert QuadField(-1).discriminant == -4
    assert QuadField(2).discriminant == 8


@pytest.mark.parametrize("p,expected", [(5, SPLIT), (3, INERT), (2, RAMIFIED)])
def test_splitting_gaussian(p, expected):
    assert splitting_type(qi(), p) == expected


def test_splitting_at_two():
    assert splitting_type(QuadField(17), 2) == SPLIT
    assert splitting_type(QuadField(5), 2) == INERT
    assert splitting_type(QuadField(-7), 2) == SPLIT
    assert splitting_type(QuadField(3), 2) == RAMIFIED


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        splitting_type(qi(), 9)


def _legendre_oracle(disc, p):
    """Dedekind splitting from the discriminant by counting roots of x^2 - disc mod p."""
    if disc % p == 0:
        return RAMIFIED
    if p == 2:
        return SPLIT if disc % 8 == 1 else INERT
    roots = sum(1 for t in range(p) if (t * t - disc) % p == 0)
    return SPLIT if roots == 2 else INERT


@pytest.mark.parametrize("d", TEST_RADICANDS + (6, -5, 21, -15))
def test_splitting_matches_root_count(d):
    K = QuadField(d)
    for p in primerange(2, 60):
        assert splitting_type(K, p) == _legendre_oracle(K.discriminant, p)


def test_places_above_infinity():
    real = places_above(QuadField(2), INF)
    assert [w.kind for w in real] == ["real", "real"]
    assert all(w.local_degree == 1 for w in real)
    cx = places_above(qi(), INF)
    assert len(cx) == 1 and cx[0].local_degree == 2


def test_places_above_eleven_in_sqrt5():
    assert 4**2 % 11 == 5
    ws = places_above(QuadField(5), 11)
    assert len(ws) == 2 and all(w.e == w.f == 1 for w in ws)


@given(radicands, st.sampled_from(list(primerange(2, 200))))
def test_place_completeness(d, p):
    K = QuadField(d)
    assert sum(w.e * w.f for w in places_above(K, p)) == 2


# -- valuations --------------------------------------------------------------


def test_valuation_examples():
    assert valuation(2, places_above(None, 2)[0]) == 1
    (P,) = places_above(qi(), 2)
    assert valuation(QuadElem(1, 1, qi()), P) == 1
    K = QuadField(5)
    x = QuadElem(3, 1, K)
    assert x.norm() == 4
    (P,) = places_above(K, 2)
    assert P.splitting == INERT
    assert valuation(x, P) == 1


def test_valuation_of_zero():
    with pytest.raises(ZeroElement):
        valuation(0, places_above(None, 3)[0])


def test_padic_sqrt_is_a_root():
    for dp, p in [(5, 11), (2, 7), (-1, 5), (17, 2), (-7, 2), (13, 3)]:
        for k in (1, 3, 10):
            if p == 2 and k < 3:
                continue
            r = padic_sqrt(dp, p, k)
            assert (r * r - dp) % p**k == 0


def _brute_split_valuation(x, p, index, kmax=6):
    """Valuation at a split place by exhaustive search for the compatible
    square roots of d modulo p^k (no lifting)."""
    d = x.d
    A, B, D = x.integral_parts()
    # the index-0 place sends sqrt d to the root with the smallest residue
    # mod p (or = 1 mod 4 when p = 2)
    roots1 = [t for t in range(p) if (t * t - d) % p == 0]
    if p == 2:
        base = [t for t in range(8) if (t * t - d) % 16 == 0 and t % 4 == 1]
        start, mod0 = base[0], 8
    else:
        start, mod0 = min(roots1), p
    v = 0
    for k in range(1, kmax + 1):
        mod = p**k
        cands = [t for t in range(mod) if (t * t - d) % mod == 0 and t % mod0 == start % mod0]
        if p == 2 and k < 4:
            cands = [t for t in range(mod) if t % min(mod, 4) == 1 % min(mod, 4)]
        r = cands[0] if index == 0 else -cands[0]
        if (A + B * r) % mod == 0:
            v = k
        else:
            break
    vd = 0
    while D % p == 0:
        D //= p
        vd += 1
    return v - vd


@pytest.mark.parametrize("d,p", [(-1, 5), (-1, 13), (5, 11), (2, 7), (-2, 3), (13, 3)])
def test_split_valuation_against_brute_force(d, p):
    K = QuadField(d)
    P0, P1 = places_above(K, p)
    seen = 0
    for a in range(-12, 13):
        for b in range(1, 7):
            x = QuadElem(a, b, K)
            exp = _brute_split_valuation(x, p, 0)
            if exp >= 5:
                continue
            assert valuation(x, P0) == exp, (x, p)
            assert valuation(x, P1) == _brute_split_valuation(x, p, 1)
            seen += exp
    assert seen > 0


@given(nonzero_elements, st.sampled_from(list(primerange(2, 40))))
def test_split_valuations_sum_to_norm(x, p):
    assume(x.field is not None)
    ws = places_above(x.field, p)
    assume(ws[0].splitting == SPLIT)
    nv = Fraction(x.norm())
    vn = 0
    num, den = nv.numerator, nv.denominator
    while num % p == 0:
        num //= p
        vn += 1
    while den % p == 0:
        den //= p
        vn -= 1
    assert valuation(x, ws[0]) + valuation(x, ws[1]) == vn


@given(elements(d=-1, bound=200), elements(d=-1, bound=200))
def test_valuation_is_additive(x, y):
    assume(x and y)
    K = qi()
    for p in (2, 3, 5, 13):
        for w in places_above(K, p):
            assert valuation(x * y, w) == valuation(x, w) + valuation(y, w)


# -- absolute values ---------------------------------------------------------


def test_log_abs_examples():
    assert near(log_abs(2, places_above(None, INF)[0]), lambda: mpmath.log(2))
    assert near(log_abs(Fraction(1, 3), places_above(None, 3)[0]), lambda: mpmath.log(3))
    u = QuadElem(1, 1, QuadField(2))
    with mpmath.workprec(224):
        total = mpmath.fsum(log_abs(u, w) for w in places_above(QuadField(2), INF))
    assert abs(total) < TOL
    assert abs(product_formula_defect(u)) < TOL


def test_complex_place_uses_full_norm():
    (w,) = places_above(qi(), INF)
    assert near(log_abs(QuadElem(1, 1, qi()), w), lambda: mpmath.log(2) / 2)


def test_real_embeddings_without_cancellation():
    K = QuadField(2)
    x = QuadElem(-(10**40), 7071067811865475244008443621048490392848, K)
    w0, w1 = places_above(K, INF)
    # |x| at the +sqrt2 embedding is tiny; compute it through the norm
    with mpmath.workprec(400):
        exact = mpmath.log(abs(mpmath.mpf(-(10**40)) + 7071067811865475244008443621048490392848 * mpmath.sqrt(2))) / 2
    assert abs(log_abs(x, w0) - exact) < mpmath.mpf(2) ** -150


@pytest.mark.parametrize("x", [QuadElem(6), QuadElem(Fraction(3, 2), Fraction(1, 2), QuadField(5)),
                               QuadElem(1)])
def test_product_formula_examples(x):
    assert abs(product_formula_defect(x)) < TOL


def test_product_formula_exact_zero_for_one():
    assert product_formula_defect(1) == 0


@given(nonzero_elements)
def test_product_formula_property(x):
    assert abs(product_formula_defect(x)) <= TOL


@given(nonzero_elements)
def test_galois_symmetry(x):
    assume(x.field is not None)
    K = x.field
    xb = conjugate(x)
    for v in (INF, 2, 3, 5, 7, 13):
        for w in places_above(K, v):
            assert log_abs(xb, w) == log_abs(x, w.conjugate())


@given(elements())
def test_norm_identity(x):
    assert x * conjugate(x) == QuadElem(x.a * x.a - x.d * x.b * x.b)


def test_conjugates():
    K = QuadField(2)
    assert conjugate(QuadElem(1, 1, K)) == QuadElem(1, -1, K)
    assert conjugates(5) == [QuadElem(5)]
    assert conjugates(QuadElem(1, 1, K)) == [QuadElem(1, 1, K), QuadElem(1, -1, K)]


# -- S-units -----------------------------------------------------------------


def test_s_unit_examples():
    S = PlaceSet.parse(["inf", 2, 3])
    assert is_s_unit(6, S)
    assert not is_s_unit(10, S)
    assert is_s_unit(QuadElem(1, 1, qi()), PlaceSet.parse(["inf", 2]))


def test_placeset_membership():
    S = PlaceSet.parse(["inf", 2])
    assert INF in S and 2 in S and 3 not in S
    w = places_above(QuadField(-7), 2)[1]
    assert w in S
    assert places_above(QuadField(-7), INF)[0] in S
    assert places_above(QuadField(-7), 3)[0] not in S
    assert len(S.lift(QuadField(-7))) == 3
