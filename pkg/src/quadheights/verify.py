"""Invariant suites run by ``quadheights verify <suite>``.

Each suite draws a seeded sample, checks one identity exactly or at a
stated tolerance, and returns a SuiteResult.  Tolerances are powers of two
relative to the working precision.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import sympy

from .arrangements import (
    conic_dependence,
    five_rank_check,
    general_position,
    no_four_concurrent,
    proximity_transfer_defect,
    pullback_residual,
    veronese_row,
)
from .heights import PointOnDivisor, height, height_by_places, weil_sum_defect
from .numfield import DEFAULT_PREC, GUARD_BITS, PlaceSet, QuadField, product_formula_defect
from .sampling import (
    TEST_RADICANDS,
    random_element,
    random_line,
    random_point,
    random_quadratic_form,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.checked} cases; {self.detail}"


def _tol(prec: int, slack: int) -> mpmath.mpf:
    return mpmath.mpf(2) ** (-prec + slack)


def suite_product_formula(samples: int = 1000, seed: int = 0, prec: int = DEFAULT_PREC,
                          bound: int = 10**6) -> SuiteResult:
    rng = random.Random(seed)
    tol = _tol(prec, 8)
    worst = mpmath.mpf(0)
    for _ in range(samples):
        worst = max(worst, abs(product_formula_defect(random_element(rng, bound), prec)))
    return SuiteResult("product-formula", worst <= tol, samples,
                       f"max |defect| = {mpmath.nstr(worst, 5)} (tol 2^{-prec + 8})",
                       {"max_defect": worst})


def _weil_cases(rng: random.Random, samples: int):
    for i in range(samples):
        d = rng.choice((None,) + TEST_RADICANDS)
        P = random_point(rng, 2, 30, d)
        H = random_quadratic_form(rng, 9) if i % 2 else random_line(rng, 9)
        yield H, P


def suite_weil_sum(samples: int = 200, seed: int = 0, prec: int = DEFAULT_PREC) -> SuiteResult:
    rng = random.Random(seed)
    tol = _tol(prec, 10)
    worst = mpmath.mpf(0)
    checked = 0
    for H, P in _weil_cases(rng, samples):
        try:
            r = weil_sum_defect(H, P, prec)
        except PointOnDivisor:
            continue
        worst = max(worst, abs(r))
        checked += 1
    return SuiteResult("weil-sum", worst <= tol, checked,
                       f"max |residual| = {mpmath.nstr(worst, 5)} (tol 2^{-prec + 10})",
                       {"max_residual": worst})


def suite_base_change(samples: int = 50, seed: int = 0, prec: int = DEFAULT_PREC) -> SuiteResult:
    rng = random.Random(seed)
    tol = _tol(prec, 10)
    worst = mpmath.mpf(0)
    for _ in range(samples):
        P = random_point(rng, rng.choice((1, 2, 3)), 10**4)
        with mpmath.workprec(prec + GUARD_BITS):
            h = height(P, prec)
            for d in TEST_RADICANDS:
                worst = max(worst, abs(height_by_places(P.coords, QuadField(d), prec) - h))
    return SuiteResult("base-change", worst <= tol, samples,
                       f"max |h_K - h_Q| = {mpmath.nstr(worst, 5)} over {len(TEST_RADICANDS)} fields",
                       {"max_diff": worst})


def suite_positions(samples: int = 200, seed: int = 0) -> SuiteResult:
    """General position agrees with brute-force concurrency, and implies the
    five-rank condition."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        lines = [random_line(rng, 4) for _ in range(rng.randint(5, 7))]
        if len(set(lines)) != len(lines):
            continue
        gp = general_position(lines)
        brute = all(sympy.Matrix([a.linear_coefficients(), b.linear_coefficients(),
                                  c.linear_coefficients()]).det() != 0
                    for i, a in enumerate(lines) for j, b in enumerate(lines[i + 1:], i + 1)
                    for c in lines[j + 1:])
        if gp != brute or (gp and not five_rank_check(lines)):
            bad += 1
    return SuiteResult("positions", bad == 0, samples, f"{bad} disagreements")


def conic_oracle(lines) -> int:
    """Dimension of the space of conics through the six dual points, by
    interpolation with sympy."""
    x, y, z = sympy.symbols("x y z")
    cs = sympy.symbols("c0:6")
    conic = cs[0] * x**2 + cs[1] * y**2 + cs[2] * z**2 + cs[3] * x * y + cs[4] * x * z + cs[5] * y * z
    eqs = []
    for l in lines:
        a, b, c = l.linear_coefficients()
        eqs.append(conic.subs({x: a, y: b, z: c}))
    M = sympy.Matrix([[sympy.diff(e, ci) for ci in cs] for e in eqs])
    return 6 - M.rank()


def suite_conic_lemma(samples: int = 200, seed: int = 0, bound: int = 9) -> SuiteResult:
    rng = random.Random(seed)
    bad = 0
    quintuples = 0
    for _ in range(samples):
        lines = [random_line(rng, bound) for _ in range(6)]
        null = conic_dependence(lines)
        if len(null) != conic_oracle(lines):
            bad += 1
        for v in null:
            if any(sum(r * c for r, c in zip(veronese_row(l), v)) for l in lines):
                bad += 1
        five = lines[:5]
        if len(set(five)) == 5 and no_four_concurrent(five):
            quintuples += 1
            if sympy.Matrix([veronese_row(l) for l in five]).rank() != 5:
                bad += 1
    return SuiteResult("conic-lemma", bad == 0, samples,
                       f"{bad} disagreements; {quintuples} admissible quintuples at rank 5")


def suite_sym2_identity(samples: int = 100, seed: int = 0) -> SuiteResult:
    rng = random.Random(seed)
    bad = sum(1 for _ in range(samples) if pullback_residual(random_line(rng, 50)) != 0)
    return SuiteResult("sym2-identity", bad == 0, samples, f"{bad} nonzero residuals")


def suite_transfer_defect(samples: int = 200, seed: int = 0, prec: int = DEFAULT_PREC,
                          S: PlaceSet | None = None) -> SuiteResult:
    """Bounded transfer defect, uncorrelated with height (|r| < 3/sqrt(N))."""
    rng = random.Random(seed)
    S = S or PlaceSet.parse(["inf", 2, 3])
    hs, ds = [], []
    while len(hs) < samples:
        bound = 10 ** rng.randint(1, 12)
        P = random_point(rng, 2, bound, rng.choice(TEST_RADICANDS))
        if P.degree != 2:
            continue
        l = random_line(rng, 5)
        try:
            dft = proximity_transfer_defect(l, S, P, prec)
        except PointOnDivisor:
            continue
        hs.append(float(height(P, prec)))
        ds.append(abs(float(dft)))
    r = statistics.correlation(hs, ds) if len(set(ds)) > 1 else 0.0
    limit = 3 / len(hs) ** 0.5
    bound = max(ds)
    return SuiteResult("transfer-defect", abs(r) < limit, len(hs),
                       f"max |defect| = {bound:.4f}, corr(|defect|, h) = {r:+.3f} (limit {limit:.3f})",
                       {"max_defect": bound, "correlation": r})


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "product-formula": suite_product_formula,
    "weil-sum": suite_weil_sum,
    "base-change": suite_base_change,
    "positions": suite_positions,
    "conic-lemma": suite_conic_lemma,
    "sym2-identity": suite_sym2_identity,
    "transfer-defect": suite_transfer_defect,
}


def verify(name: str, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)
