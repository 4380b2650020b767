"""Seeded random field elements, points and lines for the verification suites."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .heights import HyperForm, ProjPoint, _exponents, canonicalize, line
from .numfield import QuadElem, QuadField

TEST_RADICANDS = (-1, 2, -2, 3, -3, 5, -7, 13)


def random_rational(rng: random.Random, bound: int) -> Fraction:
    num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


def random_element(rng: random.Random, bound: int,
                   radicands: Sequence[int] = TEST_RADICANDS) -> QuadElem:
    """A nonzero element of Q or of one of the test fields."""
    while True:
        d = rng.choice((1,) + tuple(radicands))
        a = random_rational(rng, bound)
        b = random_rational(rng, bound) if d != 1 else Fraction(0)
        x = QuadElem(a, b, QuadField(d) if d != 1 else None)
        if x:
            return x


def random_point(rng: random.Random, n: int, bound: int, d: int | None = None) -> ProjPoint:
    """A point of P^n; quadratic over Q(sqrt d) when d is given (and almost surely)."""
    K = QuadField(d) if d is not None else None
    while True:
        xs = []
        for _ in range(n + 1):
            a = rng.randint(-bound, bound)
            b = rng.randint(-bound, bound) if K is not None else 0
            xs.append(QuadElem(a, b, K if b else None))
        if any(xs):
            return canonicalize(xs)


def random_line(rng: random.Random, bound: int) -> HyperForm:
    while True:
        c = [rng.randint(-bound, bound) for _ in range(3)]
        if any(c):
            return line(*c)


def random_quadratic_form(rng: random.Random, bound: int, nvars: int = 3) -> HyperForm:
    exps = list(_exponents(nvars, 2))
    while True:
        coeffs = [rng.randint(-bound, bound) for _ in exps]
        if any(coeffs):
            return HyperForm(dict(zip(exps, coeffs)))
