from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st

from quadheights.linalg import det, nullspace, primitive, rank


def matrices(max_rows=6, max_cols=6, lo=-4, hi=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


@given(matrices())
def test_rank_matches_sympy(M):
    assert rank(M) == sympy.Matrix(M).rank()


@given(matrices(lo=-1, hi=1))
def test_rank_of_sparse_matrices(M):
    assert rank(M) == sympy.Matrix(M).rank()


@given(st.integers(1, 6).flatmap(lambda n: st.lists(
    st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(M):
    assert det(M) == sympy.Matrix(M).det()


def test_det_rational_entries():
    M = [[Fraction(1, 2), 1], [3, Fraction(2, 3)]]
    assert det(M) == Fraction(1, 3) - 3


@given(matrices())
def test_nullspace_is_a_basis(M):
    ns = nullspace(M)
    ncols = len(M[0])
    assert len(ns) == ncols - sympy.Matrix(M).rank()
    for v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)
    if ns:
        assert sympy.Matrix(ns).rank() == len(ns)


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(-1, 3)]) == (3, -2)
