import itertools

import mpmath
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from quadheights.arrangements import (
    TooFewForms,
    candidate_exceptional_lines,
    conic_dependence,
    dual_point,
    five_rank_check,
    general_position,
    height_product_defect,
    intersection_point,
    line_sq_hyperplane,
    m_subgeneral,
    no_four_concurrent,
    proximity_transfer_defect,
    pullback_residual,
    sym2_embed,
    sym2_point,
    veronese_row,
)
from quadheights.generators import EXINF_22_LINES, excon_config
from quadheights.heights import HyperForm, PointOnDivisor, UnsupportedDegree, canonicalize, point
from quadheights.numfield import PlaceSet, QuadElem, QuadField
from quadheights.verify import conic_oracle

from strategies import lines, point_pairs, quadratic_points, rational_points

with mpmath.workprec(256):
    LOG2_TOL = mpmath.log(2) + mpmath.mpf(2) ** -180
X, Y, Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)


# -- position predicates --------------------------------------------------------


def test_general_position_examples():
    assert general_position([X, Y, Z, (1, 1, 1)])
    assert not general_position([X, Y, (1, 1, 0)])
    assert general_position([(0, 1, -1), (0, 1, 1), (1, 0, -1), (1, 0, 1)])
    assert not general_position([X, (2, 0, 0), Y])


def _concurrent_oracle(a, b, c):
    return sympy.Matrix([a, b, c]).det() == 0


@given(st.lists(lines, min_size=3, max_size=6, unique=True))
def test_general_position_matches_determinants(rows):
    forms = [HyperForm.linear(r) for r in rows]
    assume(len(set(forms)) == len(forms))
    coeffs = [f.linear_coefficients() for f in forms]
    brute = not any(_concurrent_oracle(*t) for t in itertools.combinations(coeffs, 3))
    assert general_position(forms) == brute


def test_m_subgeneral_examples():
    assert m_subgeneral([X, Y, Z, (1, 1, 1)], 2)
    assert not m_subgeneral([X, Y, (1, 1, 0), Z], 2)
    with pytest.raises(TooFewForms):
        m_subgeneral([X, Y], 2)


def test_m_subgeneral_nonlinear():
    conic = HyperForm({(0, 2, 0): 1, (1, 0, 1): -1})
    # the conic, y and x share the point (0:0:1)
    assert not m_subgeneral([conic, HyperForm.linear(Y), HyperForm.linear(X)], 2)
    assert m_subgeneral([conic, HyperForm.linear(Z), HyperForm.linear((1, 0, -1))], 1) is False
    # two tangents and z: no three of the four share a point
    assert m_subgeneral([conic, HyperForm.linear((1, -2, 1)), HyperForm.linear((1, 2, 1)),
                         HyperForm.linear(Z)], 2)


def test_dual_points_and_rows():
    assert dual_point(X).int_coords() == (1, 0, 0)
    assert dual_point((0, 1, 1)).int_coords() == (0, 1, 1)
    assert dual_point((2, -3, 0)).int_coords() == (2, -3, 0)
    assert veronese_row(X) == (1, 0, 0, 0, 0, 0)
    assert veronese_row((1, 1, 0)) == (1, 1, 0, 1, 0, 0)
    assert veronese_row((1, 1, 1)) == (1,) * 6


# -- conics through dual points -------------------------------------------------


def test_conic_dependence_trivial():
    six = [X, Y, Z, (1, 1, 0), (1, 0, 1), (0, 1, 1)]
    assert conic_dependence(six) == []
    assert sympy.Matrix([veronese_row(l) for l in six]).det() != 0
    assert conic_oracle([HyperForm.linear(l) for l in six]) == 0


def test_conic_dependence_on_xz_eq_y2():
    six = [(t * t, t, 1) for t in (0, 1, -1, 2, 3)] + [X]
    null = conic_dependence(six)
    assert len(null) == 1
    (v,) = null
    assert canonicalize(list(v)) == canonicalize([0, 1, 0, 0, -1, 0])
    for l in six:
        assert sum(a * b for a, b in zip(veronese_row(l), v)) == 0


@given(st.lists(lines, min_size=6, max_size=6))
def test_conic_dependence_matches_interpolation(rows):
    forms = [HyperForm.linear(r) for r in rows]
    assert len(conic_dependence(forms)) == conic_oracle(forms)


@given(st.lists(lines, min_size=5, max_size=5, unique=True))
def test_five_admissible_lines_have_rank_five(rows):
    forms = [HyperForm.linear(r) for r in rows]
    assume(len(set(forms)) == 5 and no_four_concurrent(forms))
    assert sympy.Matrix([veronese_row(f) for f in forms]).rank() == 5


def test_five_rank_check_examples():
    assert five_rank_check([HyperForm.linear(r) for r in EXINF_22_LINES])
    assert five_rank_check(list(excon_config().arrangement))
    gp5 = [X, Y, Z, (1, 1, 1), (1, 2, 3)]
    assert general_position(gp5) and five_rank_check(gp5)
    # four lines through (0:0:1) plus one more
    concurrent = [X, Y, (1, 1, 0), (1, -1, 0), Z]
    assert not no_four_concurrent(concurrent)
    assert not five_rank_check(concurrent)
    with pytest.raises(TooFewForms):
        five_rank_check([X, Y, Z, (1, 1, 1)])


@given(st.lists(lines, min_size=5, max_size=7, unique=True))
def test_general_position_implies_five_rank(rows):
    forms = [HyperForm.linear(r) for r in rows]
    assume(len(set(forms)) == len(forms) and general_position(forms))
    assert five_rank_check(forms)


# -- symmetric square -----------------------------------------------------------


def test_sym2_embed_examples():
    assert sym2_embed(X, Y).int_coords() == (0, 0, 0, 1, 0, 0)
    assert sym2_embed(X, X).int_coords() == (1, 0, 0, 0, 0, 0)
    assert sym2_embed((1, 1, 1), (1, 2, 3)).int_coords() == (1, 2, 3, 3, 4, 5)


@given(point_pairs())
def test_sym2_symmetric(pair):
    P, Q = pair
    assert sym2_embed(P, Q) == sym2_embed(Q, P)


def test_sym2_point_examples():
    i = QuadElem(0, 1, QuadField(-1))
    assert sym2_point(point(i, 1, 0)).int_coords() == (1, 1, 0, 0, 0, 0)
    P = point(QuadElem(1, 1, QuadField(2)), 1, 0)
    assert sym2_point(P) == canonicalize([-1, 1, 0, 2, 0, 0])
    with pytest.raises(UnsupportedDegree):
        sym2_point(point(1, 2, 3))


@given(quadratic_points())
def test_sym2_point_is_rational(P):
    assume(P.field is not None)
    assert sym2_point(P).is_rational()


def test_line_sq_hyperplane():
    assert line_sq_hyperplane(X).linear_coefficients() == (1, 0, 0, 0, 0, 0)
    assert line_sq_hyperplane((2, -1, 0)).linear_coefficients() == (4, 1, 0, -2, 0, 0)
    assert pullback_residual((1, 1, 1)) == 0


@given(lines)
def test_pullback_identity(row):
    assert pullback_residual(row) == 0


def test_height_product_defect_examples():
    assert height_product_defect(X, X) == 0
    with mpmath.workprec(256):
        ref = mpmath.log(mpmath.mpf(5) / 3)
    assert abs(height_product_defect((1, 2, 3), (1, 1, 1)) - ref) < mpmath.mpf(2) ** -180


@given(rational_points(bound=10**6), rational_points(bound=10**6))
def test_height_product_defect_bounded(P, Q):
    assert height_product_defect(P, Q) <= LOG2_TOL


@given(quadratic_points(bound=10**4))
def test_height_product_defect_bounded_quadratic(P):
    assume(P.field is not None)
    assert height_product_defect(P, P.conjugate()) <= LOG2_TOL


def test_transfer_defect_example():
    i = QuadElem(0, 1, QuadField(-1))
    dft = proximity_transfer_defect(Z, PlaceSet.parse(["inf"]), point(i, 1, 1))
    assert abs(dft) <= mpmath.log(3)
    with mpmath.workprec(256):
        assert abs(dft - mpmath.log(2)) < mpmath.mpf(2) ** -180
    with pytest.raises(UnsupportedDegree):
        proximity_transfer_defect(Z, PlaceSet.parse(["inf"]), point(1, 1, 1))
    with pytest.raises(PointOnDivisor):
        proximity_transfer_defect(Z, PlaceSet.parse(["inf"]), point(i, 1, 0))


# -- exceptional-line candidates ------------------------------------------------


def test_candidate_lines_include_the_arrangement():
    rows = [X, Y, Z, (1, 1, 1), (1, -1, 0), (1, 0, -1)]
    found = candidate_exceptional_lines(rows)
    assert [f.linear_coefficients() for f in found[:6]] == [HyperForm.linear(r).linear_coefficients()
                                                            for r in rows]
    pts = {intersection_point(a, b) for a, b in itertools.combinations(rows, 2)}
    for L in found[6:]:
        assert sum(1 for P in pts if not L(P.coords)) >= 4
