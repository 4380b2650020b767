"""Exact linear algebra over Q by fraction-free (Bareiss) elimination."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence[int | Fraction]]


def _to_int_rows(M: Matrix) -> list[list[int]]:
    rows = []
    for r in M:
        den = math.lcm(*(Fraction(c).denominator for c in r)) if r else 1
        rows.append([int(Fraction(c) * den) for c in r])
    return rows


def bareiss_echelon(M: Matrix) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form and its pivot columns.

    Row scaling does not change rank or null space, so rows with rational
    entries are cleared to integers first.
    """
    A = _to_int_rows(M)
    if not A:
        return A, []
    nrows, ncols = len(A), len(A[0])
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                A[i][j] = (A[r][c] * A[i][j] - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = A[r][c]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: Matrix) -> int:
    return len(bareiss_echelon(M)[1])


def det(M: Matrix) -> Fraction:
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    scale = Fraction(1)
    for r in M:
        scale /= math.lcm(*(Fraction(c).denominator for c in r))
    A = _to_int_rows(M)
    sign = 1
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[k][k] * A[i][j] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1] * scale


def nullspace(M: Matrix) -> list[tuple[int, ...]]:
    """Basis of the right null space, each vector primitive with integer entries."""
    if not M:
        return []
    ncols = len(M[0])
    E, pivots = bareiss_echelon(M)
    # back-substitute on the echelon form with exact fractions
    R = [[Fraction(x) for x in row] for row in E[:len(pivots)]]
    for i in range(len(R) - 1, -1, -1):
        c = pivots[i]
        p = R[i][c]
        R[i] = [x / p for x in R[i]]
        for k in range(i):
            f = R[k][c]
            if f:
                R[k] = [a - f * b for a, b in zip(R[k], R[i])]
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][free]
        basis.append(primitive(v))
    return basis


def primitive(v: Sequence[int | Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero > 0."""
    den = math.lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * den) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector")
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return tuple(x // g for x in ints)
