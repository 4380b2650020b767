"""Command-line interface: ``quadheights <subcommand> ...``.

Exit status is 0 on success, 1 when a verification suite or a campaign
check fails, and 2 on malformed input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import mpmath

from .arrangements import candidate_exceptional_lines
from .campaign import (
    CampaignConfig,
    ConfigError,
    bound_table,
    checks_passed,
    fmt,
    format_coords,
    parse_form,
    parse_point,
    run_campaign,
)
from .generators import (
    BinaryFormPair,
    excon_config,
    excon_points,
    exinf_config,
    exinf_points,
    s_units_Q,
    unit_fibers,
)
from .heights import (
    HyperForm,
    height,
    local_weil,
    proximity,
    relative_height_factor,
    weil_sum_defect,
)
from .numfield import (
    DEFAULT_PREC,
    GUARD_BITS,
    INF,
    PlaceSet,
    QuadElem,
    QuadField,
    log_abs,
    places_above,
    valuation,
)
from .verify import SUITES, verify

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(ValueError):
    pass


def _place_set(text: str) -> PlaceSet:
    try:
        return PlaceSet.parse([t for t in text.split(",") if t.strip()])
    except ValueError as e:
        raise UsageError(f"--S: {e}") from e


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{what}: {e.msg} at column {e.colno}") from e


def _forms(text: str) -> list[HyperForm]:
    obj = _json_arg(text, "--arrangement")
    if not isinstance(obj, list) or not obj:
        raise UsageError("--arrangement: expected a nonempty JSON list of forms")
    if all(isinstance(c, int) for c in obj):
        obj = [obj]
    return [parse_form(f) for f in obj]


def _point(text: str, d: int | None):
    return parse_point(_json_arg(text, "--point"), d)


# ---------------------------------------------------------------------------
# subcommands


def cmd_places(a: argparse.Namespace) -> int:
    K = QuadField(a.d) if a.d not in (None, 1) else None
    over = [INF] + a.primes if a.primes else [INF]
    x = None
    if a.element is not None:
        obj = _json_arg(a.element, "--element")
        x = QuadElem(*(obj if isinstance(obj, list) else [obj, 0]), K)
    for v in over:
        for w in places_above(K, v):
            line = str(w)
            if x is not None:
                parts = []
                if not w.archimedean:
                    parts.append(f"v={valuation(x, w)}")
                parts.append(f"log|x|={fmt(log_abs(x, w, a.prec))}")
                line += "  " + " ".join(parts)
            print(line)
    return EXIT_OK


def cmd_height(a: argparse.Namespace) -> int:
    P = _point(a.point, a.d)
    print(f"point  {P}")
    print(f"degree {P.degree}")
    print(f"h      {fmt(height(P, a.prec))}")
    print(f"[K:Q] factor {relative_height_factor(P)}")
    return EXIT_OK


def cmd_weil(a: argparse.Namespace) -> int:
    P = _point(a.point, a.d)
    H = parse_form(_json_arg(a.form, "--form"))
    over = [INF] + (a.primes or [])
    for v in over:
        for w in places_above(P.field, v):
            print(f"{w}  lambda={fmt(local_weil(H, P, w, a.prec))}")
    print(f"sum over all places - deg*h = {fmt(weil_sum_defect(H, P, a.prec))}")
    return EXIT_OK


def cmd_proximity(a: argparse.Namespace) -> int:
    P = _point(a.point, a.d)
    D = _forms(a.arrangement)
    S = _place_set(a.S)
    with mpmath.workprec(a.prec + GUARD_BITS):
        h = height(P, a.prec)
        m = proximity(D, S, P, a.prec)
        print(f"h     {fmt(h)}")
        print(f"m     {fmt(m)}")
        if h:
            print(f"m/h   {fmt(m / h)}")
    return EXIT_OK


def cmd_bounds(a: argparse.Namespace) -> int:
    table = bound_table(a.delta, a.n, a.m).as_strings()
    eps = a.epsilon
    for k, v in table.items():
        if k in ("delta", "m", "n"):
            print(f"{k:22s} {v}")
        elif v is None:
            print(f"{k:22s} undefined")
        else:
            print(f"{k:22s} {v}   (+eps: {float(mpmath.mpf(_frac(v))) + eps:.6g})")
    if a.lines is not None:
        lines = [HyperForm.linear(r) for r in _json_arg(a.lines, "--lines")]
        print("candidate exceptional lines (reported, completeness not claimed):")
        for L in candidate_exceptional_lines(lines):
            print(f"  {list(L.linear_coefficients())}")
    return EXIT_OK


def _frac(s: str) -> mpmath.mpf:
    num, _, den = s.partition("/")
    return mpmath.mpf(int(num)) / (int(den) if den else 1)


def _write_stream(stream, out=sys.stdout) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("index", "u", "d", "coords", "degenerate"))
    for sp in stream:
        d = 1 if sp.point.field is None else sp.point.field.d
        w.writerow((sp.index, sp.u, d, format_coords(sp.point), int(sp.degenerate)))


def cmd_gen(a: argparse.Namespace) -> int:
    S = _place_set(a.S)
    if a.kind == "sunits":
        for u in s_units_Q(S, a.max_exp):
            print(u)
        return EXIT_OK
    if a.kind == "fibers":
        zeros = [tuple(p) for p in _json_arg(a.zeros, "--zeros")]
        poles = [tuple(p) for p in _json_arg(a.poles, "--poles")]
        stream = unit_fibers(BinaryFormPair(tuple(zeros), tuple(poles)), S, a.max_exp,
                             a.prec, record_defect=False)
    elif a.kind == "exinf":
        stream = exinf_points(exinf_config(a.n, a.delta), S, a.max_exp, a.prec,
                              record_defect=False)
    else:
        stream = excon_points(excon_config(), S, a.max_exp, a.prec, record_defect=False)
    _write_stream(stream)
    return EXIT_OK


def cmd_campaign(a: argparse.Namespace) -> int:
    cfg = CampaignConfig.load(a.config)
    if a.epsilon is not None:
        cfg.epsilon = a.epsilon
    if a.jobs is not None:
        cfg.jobs = a.jobs
    stem = Path(a.config).stem
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    summary, _ = run_campaign(cfg, csv_path, json_path, a.timestamp)
    print(f"{summary['points']} points, {len(summary['errors'])} errors -> {csv_path}, {json_path}")
    for key in ("target", "min_ratio", "max_ratio", "min_defect", "max_defect", "fitted_constant"):
        if key in summary:
            print(f"  {key:16s} {summary[key]}")
    for name, c in summary["checks"].items():
        print(f"  check {name}: {'PASS' if c['passed'] else 'FAIL'} ({c['observed']})")
    return EXIT_OK if checks_passed(summary) else EXIT_FAIL


def cmd_verify(a: argparse.Namespace) -> int:
    kwargs = {}
    if a.samples is not None:
        kwargs["samples"] = a.samples
    if a.seed is not None:
        kwargs["seed"] = a.seed
    if a.prec is not None and a.suite in ("product-formula", "weil-sum", "base-change",
                                          "transfer-defect"):
        kwargs["prec"] = a.prec
    result = verify(a.suite, **kwargs)
    print(result.line())
    return EXIT_OK if result.passed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadheights",
                                description="Heights, proximity and extremal families for quadratic points.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_prec(sp):
        sp.add_argument("--prec", type=int, default=DEFAULT_PREC, help="working precision in bits")
        return sp

    sp = with_prec(sub.add_parser("places", help="places of Q(sqrt d) above given primes"))
    sp.add_argument("--d", type=int, default=None, help="radicand; omit for Q")
    sp.add_argument("primes", type=int, nargs="*")
    sp.add_argument("--element", help='element as [a, b] (a + b sqrt d), entries int or "p/q"')
    sp.set_defaults(func=cmd_places)

    sp = with_prec(sub.add_parser("height", help="absolute logarithmic height of a point"))
    sp.add_argument("point", help='JSON list of coordinates, e.g. "[[1,1],1,0]"')
    sp.add_argument("--d", type=int, default=None)
    sp.set_defaults(func=cmd_height)

    sp = with_prec(sub.add_parser("weil", help="local Weil functions of a form at a point"))
    sp.add_argument("--form", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("primes", type=int, nargs="*")
    sp.set_defaults(func=cmd_weil)

    sp = with_prec(sub.add_parser("proximity", help="h, m_{D,S} and m/h"))
    sp.add_argument("--arrangement", required=True, help="JSON list of forms")
    sp.add_argument("--S", default="inf")
    sp.add_argument("--point", required=True)
    sp.add_argument("--d", type=int, default=None)
    sp.set_defaults(func=cmd_proximity)

    sp = sub.add_parser("bounds", help="bound constants and candidate exceptional lines")
    sp.add_argument("--delta", type=int, default=2)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--lines", help="JSON list of integer triples")
    sp.set_defaults(func=cmd_bounds)

    sp = with_prec(sub.add_parser("gen", help="dump a generator stream as CSV"))
    sp.add_argument("kind", choices=("sunits", "fibers", "exinf", "excon"))
    sp.add_argument("--S", default="inf,2,3")
    sp.add_argument("--max-exp", type=int, default=3)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--zeros", default="[[1,0]]")
    sp.add_argument("--poles", default="[[0,1]]")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("campaign", help="run a family campaign")
    csub = sp.add_subparsers(dest="action", required=True)
    run = csub.add_parser("run")
    run.add_argument("config")
    run.add_argument("--out-dir", default="results")
    run.add_argument("--epsilon", type=float, default=None)
    run.add_argument("--jobs", type=int, default=None)
    run.add_argument("--timestamp", default=None, help="fixed timestamp for the CSV header")
    run.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("verify", help="run an invariant suite")
    sp.add_argument("suite", choices=sorted(SUITES))
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--prec", type=int, default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except (ConfigError, UsageError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, TypeError, ArithmeticError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
